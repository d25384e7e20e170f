import json

import numpy as np
import pytest

from lpbm import (
    box,
    dumps_canonical,
    enumerate_geometry,
    from_json_dict,
    read_polytope,
    require_same_normals,
    to_json_dict,
)
from lpbm.cli import main


def test_no_subcommand_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
    capsys.readouterr()


def test_gen_box_preset_matches_library_body(tmp_path):
    out = tmp_path / "k.json"
    assert main(["gen", "--dim", "2", "--facets", "4", "--preset", "box",
                 "--out", str(out)]) == 0
    assert out.read_text() == dumps_canonical(to_json_dict(box(2)))


def test_gen_writes_to_stdout_by_default(capsys):
    assert main(["gen", "--dim", "3", "--facets", "10", "--seed", "5"]) == 0
    sv = from_json_dict(json.loads(capsys.readouterr().out))
    assert sv.dim == 3
    assert enumerate_geometry(sv).nonempty.all()


def test_gen_output_is_byte_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["gen", "--facets", "12", "--seed", "9",
                     "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_usage_errors(tmp_path, capsys):
    assert main(["gen", "--dim", "2", "--facets", "7"]) == 2
    assert "lpbm: error:" in capsys.readouterr().err
    assert main(["gen", "--dim", "2", "--facets", "10",
                 "--preset", "box"]) == 2
    assert "box preset" in capsys.readouterr().err


def _gen(tmp_path, name, *extra):
    path = tmp_path / name
    assert main(["gen", "--out", str(path), *extra]) == 0
    return str(path)


def test_pair_perturb_keeps_normal_list(tmp_path, capsys):
    k_path = _gen(tmp_path, "k.json", "--seed", "1")
    out = tmp_path / "l.json"
    assert main(["pair", k_path, "--magnitude", "0.1", "--seed", "2",
                 "--out", str(out)]) == 0
    k_sv, l_sv = read_polytope(k_path), read_polytope(str(out))
    require_same_normals(k_sv, l_sv)
    assert not np.array_equal(k_sv.heights, l_sv.heights)


def test_pair_mode_flag_constraints(tmp_path, capsys):
    k_path = _gen(tmp_path, "k.json")
    assert main(["pair", k_path, "--out-k", str(tmp_path / "km.json")]) == 2
    assert "perturb" in capsys.readouterr().err
    assert main(["pair", k_path, "--mode", "independent-merge",
                 "--out", str(tmp_path / "lm.json")]) == 2
    assert "--out-k" in capsys.readouterr().err


def test_pair_merge_with_explicit_partner(tmp_path, capsys):
    k_path = _gen(tmp_path, "k.json", "--seed", "1")
    l0_path = _gen(tmp_path, "l0.json", "--seed", "2")
    km_path, lm_path = tmp_path / "km.json", tmp_path / "lm.json"
    assert main(["pair", k_path, "--mode", "independent-merge",
                 "--with", l0_path, "--seed", "3",
                 "--out-k", str(km_path), "--out", str(lm_path)]) == 0
    capsys.readouterr()
    km, lm = read_polytope(str(km_path)), read_polytope(str(lm_path))
    require_same_normals(km, lm)
    assert km.normals.shape[0] == 16  # union of two disjoint 8-facet lists
    assert enumerate_geometry(km).nonempty.all()
    assert enumerate_geometry(lm).nonempty.all()


def test_check_local_self_pair_passes(tmp_path, capsys):
    k_path = _gen(tmp_path, "k.json", "--preset", "box", "--dim", "2",
                  "--facets", "4")
    out = tmp_path / "verdict.json"
    rc = main(["check-local", k_path, k_path, "--p", "0.5",
               "--out", str(out)])
    payload = json.loads(capsys.readouterr().out)
    assert rc == 0
    assert payload["passed"] is True
    assert {"lhs", "max_eig", "kernel_residual", "passed", "p", "lambda",
            "tol"} <= set(payload)
    assert abs(payload["lhs"]) <= 1e-9
    assert payload["lambda"] == 0.0
    assert json.loads(out.read_text()) == payload


def test_check_local_exit_code_tracks_verdict(tmp_path, capsys):
    """--tol squeezes floating-point residuals into failures; the exit
    code must agree with the reported verdict either way."""
    codes = []
    for seed in range(6):
        k_path = _gen(tmp_path, f"k{seed}.json", "--seed", str(seed))
        l_path = tmp_path / f"l{seed}.json"
        assert main(["pair", k_path, "--magnitude", "0.2",
                     "--seed", str(seed + 50), "--out", str(l_path)]) == 0
        rc = main(["check-local", k_path, str(l_path), "--p", "0.0",
                   "--tol", "1e-30"])
        payload = json.loads(capsys.readouterr().out)
        assert rc == (0 if payload["passed"] else 1)
        codes.append(rc)
    assert 1 in codes


def test_check_local_bad_inputs(tmp_path, capsys):
    missing = str(tmp_path / "nope.json")
    k_path = _gen(tmp_path, "k.json")
    assert main(["check-local", missing, k_path]) == 2
    assert "nope.json" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim": 2, "normals": [')
    assert main(["check-local", str(bad), k_path]) == 2
    assert "bad.json" in capsys.readouterr().err


def test_scan_cli_end_to_end(tmp_path, capsys):
    k_path = _gen(tmp_path, "k.json", "--seed", "3")
    km_path, lm_path = tmp_path / "km.json", tmp_path / "lm.json"
    assert main(["pair", k_path, "--mode", "independent-merge",
                 "--activate", "target", "--seed", "4",
                 "--out-k", str(km_path), "--out", str(lm_path)]) == 0
    capsys.readouterr()
    csv_path = tmp_path / "scan.csv"
    rc = main(["scan", str(km_path), str(lm_path), "--p", "0.0",
               "--lambda-grid", "129", "--out", str(csv_path)])
    summary = json.loads(capsys.readouterr().out)
    assert rc == 0
    assert summary["grid_size"] == 129
    assert summary["events"] >= 1
    assert summary["concave"] is True
    assert summary["out"] == str(csv_path)

    lines = csv_path.read_text().splitlines()
    assert lines[0] == "lambda,value,d1,d2,signature_hash,event_flag"
    assert len(lines) == 130
    first = csv_path.read_bytes()
    assert main(["scan", str(km_path), str(lm_path), "--p", "0.0",
                 "--lambda-grid", "129", "--out", str(csv_path)]) == 0
    capsys.readouterr()
    assert csv_path.read_bytes() == first


def test_scan_rejects_tiny_grid(tmp_path, capsys):
    k_path = _gen(tmp_path, "k.json")
    assert main(["scan", k_path, k_path, "--lambda-grid", "2",
                 "--out", str(tmp_path / "s.csv")]) == 2
    assert "grid" in capsys.readouterr().err


def test_campaign_cli_config_with_overrides(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({
        "dim": 2, "facets": 8, "instances": 2, "p_list": [0.0],
        "pair_mode": "perturb", "magnitude": 0.1, "seed": 6,
    }))
    out_json = tmp_path / "summary.json"
    out_csv = tmp_path / "rows.csv"
    rc = main(["campaign", "--config", str(cfg_path), "--instances", "3",
               "--out-json", str(out_json), "--out-csv", str(out_csv)])
    summary = json.loads(capsys.readouterr().out)
    assert rc == 0
    assert summary["errors"] == []
    assert summary["rows"] == 3  # the flag overrides the config value
    assert summary["config"]["instances"] == 3
    assert json.loads(out_json.read_text()) == summary
    lines = out_csv.read_text().splitlines()
    assert lines[0].startswith("instance,p,lhs,")
    assert len(lines) == 4


def test_campaign_cli_flags_only(tmp_path, capsys):
    rc = main(["campaign", "--dim", "2", "--facets", "8", "--instances", "2",
               "--p-list", "0.0,1.0", "--seed", "1"])
    summary = json.loads(capsys.readouterr().out)
    assert rc == 0
    assert summary["rows"] == 4
    assert set(summary["per_p"]) == {"0.0", "1.0"}


def test_campaign_cli_instance_errors_exit_one(capsys):
    rc = main(["campaign", "--dim", "2", "--facets", "7", "--instances", "2"])
    summary = json.loads(capsys.readouterr().out)
    assert rc == 1
    assert len(summary["errors"]) == 2


def test_campaign_cli_usage_errors(tmp_path, capsys):
    assert main(["campaign", "--instances", "0"]) == 2
    assert "instances" in capsys.readouterr().err
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"instances": 2, "facet_count": 8}))
    assert main(["campaign", "--config", str(cfg_path)]) == 2
    assert "unknown campaign keys" in capsys.readouterr().err
    cfg_path.write_text("[1, 2]")
    assert main(["campaign", "--config", str(cfg_path)]) == 2
    assert "JSON object" in capsys.readouterr().err
    cfg_path.write_text("{broken")
    assert main(["campaign", "--config", str(cfg_path)]) == 2
    assert "invalid JSON" in capsys.readouterr().err
