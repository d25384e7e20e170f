import json
import os

import numpy as np
import pytest

from lpbm import (
    BadParameter,
    Campaign,
    campaign_from_dict,
    dumps_canonical,
    enumerate_geometry,
    evaluate_pair,
    independent_merge_pair,
    invariant_residuals,
    merge_pair,
    path_from_bodies,
    random_symmetric_body,
    run_campaign,
    scan,
    to_json_dict,
    worker_count,
)

SHAPES = [(2, 8), (2, 16), (3, 10), (3, 16), (4, 12)]


@pytest.mark.parametrize("dim,facets", SHAPES)
def test_random_body_is_simple_and_fully_active(dim, facets):
    sv = random_symmetric_body(dim, facets, seed=2024 + dim + facets)
    assert sv.dim == dim
    assert sv.normals.shape == (facets, dim)
    geom = enumerate_geometry(sv)
    assert geom.nonempty.all()
    # all facets active means the listed heights are the support numbers
    np.testing.assert_allclose(geom.support_numbers, sv.heights, rtol=1e-12)
    res = invariant_residuals(geom)
    assert res["minkowski"] <= 1e-8
    assert res["volume_support"] <= 1e-9


def test_random_body_deterministic_per_seed():
    a = random_symmetric_body(3, 12, seed=7)
    b = random_symmetric_body(3, 12, seed=7)
    c = random_symmetric_body(3, 12, seed=8)
    assert dumps_canonical(to_json_dict(a)) == dumps_canonical(to_json_dict(b))
    assert dumps_canonical(to_json_dict(a)) != dumps_canonical(to_json_dict(c))


def test_random_body_rejects_bad_counts():
    with pytest.raises(BadParameter, match="even"):
        random_symmetric_body(2, 7)
    with pytest.raises(BadParameter, match="at least"):
        random_symmetric_body(3, 4)


def test_merge_both_mode_activates_every_facet():
    for seed in range(6):
        k = random_symmetric_body(2, 8, seed=seed)
        km, lm = independent_merge_pair(k, 8, 0.05, seed=100 + seed)
        assert np.array_equal(km.normals, lm.normals)
        gk, gl = enumerate_geometry(km), enumerate_geometry(lm)
        assert gk.nonempty.all()
        assert gl.nonempty.all()
        np.testing.assert_allclose(gk.support_numbers, km.heights, rtol=1e-12)
        np.testing.assert_allclose(gl.support_numbers, lm.heights, rtol=1e-12)
        verdict = evaluate_pair(gk, lm, 0.0)
        assert verdict.passed


def test_merge_target_mode_keeps_k_and_forces_events():
    """Target mode: K is unchanged, foreign facets stay empty, and a
    p=0 scan from K to the merged L crosses at least one activation."""
    for seed in range(4):
        k = random_symmetric_body(2, 8, seed=seed)
        vol_k = enumerate_geometry(k).volume
        km, lm = independent_merge_pair(k, 8, 0.05, seed=40 + seed,
                                        activate="target")
        nk = k.normals.shape[0]
        assert np.array_equal(km.normals[:nk], k.normals)
        np.testing.assert_array_equal(km.heights[:nk], k.heights)
        gk = enumerate_geometry(km)
        assert gk.nonempty[:nk].all()
        assert not gk.nonempty[nk:].any()  # foreign constraints redundant
        assert abs(gk.volume - vol_k) <= 1e-12 * vol_k
        assert enumerate_geometry(lm).nonempty.all()
        rep = scan(path_from_bodies(km, lm, 0.0), grid_size=65)
        assert len(rep.events) >= 1


def test_merge_pair_validation():
    k = random_symmetric_body(2, 8, seed=0)
    l3 = random_symmetric_body(3, 8, seed=0)
    with pytest.raises(BadParameter, match="dimension"):
        merge_pair(k, l3)
    with pytest.raises(BadParameter, match="magnitude"):
        merge_pair(k, k, magnitude=0.0)
    with pytest.raises(BadParameter, match="activate"):
        merge_pair(k, k, activate="neither")


def test_worker_count_env_contract():
    assert worker_count(env={}) == 1
    assert worker_count(env={"LPBM_THREADS": ""}) == 1
    assert worker_count(env={"LPBM_THREADS": " 3 "}) == 3
    assert worker_count(env={"LPBM_THREADS": "0"}) == (os.cpu_count() or 1)
    with pytest.raises(BadParameter):
        worker_count(env={"LPBM_THREADS": "many"})
    with pytest.raises(BadParameter):
        worker_count(env={"LPBM_THREADS": "-2"})


def test_campaign_config_validation():
    with pytest.raises(BadParameter, match="unknown campaign keys"):
        campaign_from_dict({"dim": 2, "facet_count": 8})
    with pytest.raises(BadParameter, match="instances"):
        Campaign(instances=0)
    with pytest.raises(BadParameter, match="pair_mode"):
        Campaign(pair_mode="mix")
    with pytest.raises(BadParameter, match="scan_grid"):
        Campaign(scan_grid=2)
    with pytest.raises(BadParameter):
        Campaign(p_list=(0.0, -0.5))


def test_campaign_summary_and_files(tmp_path):
    cfg = campaign_from_dict({
        "dim": 2, "facets": 8, "instances": 4, "p_list": [0.0, 1.0],
        "seed": 11, "pair_mode": "perturb", "magnitude": 0.1,
        "scan_grid": 33,
        "out_csv": str(tmp_path / "rows.csv"),
        "out_json": str(tmp_path / "summary.json"),
    })
    summary = run_campaign(cfg)
    assert summary["errors"] == []
    assert summary["rows"] == 8
    per_p = summary["per_p"]
    assert set(per_p) == {"0.0", "1.0"}
    for stats in per_p.values():
        assert stats["rows"] == 4
        assert stats["pass_rate"] == 1.0
        assert stats["lhs_rel_max"] <= 0.0
        assert stats["concave_all"] is True

    csv_lines = (tmp_path / "rows.csv").read_text().splitlines()
    assert csv_lines[0] == ("instance,p,lhs,scale,max_eig,kernel_residual,"
                            "passed,events,concave")
    assert len(csv_lines) == 9
    on_disk = json.loads((tmp_path / "summary.json").read_text())
    assert on_disk == json.loads(dumps_canonical(summary))


def test_campaign_deterministic_across_worker_counts(tmp_path, monkeypatch):
    """Same config, different LPBM_THREADS: byte-identical outputs."""
    def run(tag, threads):
        if threads is None:
            monkeypatch.delenv("LPBM_THREADS", raising=False)
        else:
            monkeypatch.setenv("LPBM_THREADS", threads)
        cfg = Campaign(dim=2, facets=8, instances=6, p_list=(0.0,), seed=5,
                       pair_mode="independent-merge", magnitude=0.05,
                       scan_grid=33,
                       out_csv=str(tmp_path / f"{tag}.csv"),
                       out_json=str(tmp_path / f"{tag}.json"))
        run_campaign(cfg)
        return ((tmp_path / f"{tag}.csv").read_bytes(),
                (tmp_path / f"{tag}.json").read_bytes())

    serial = run("serial", None)
    pooled = run("pooled", "2")
    assert serial == pooled


def test_campaign_records_instance_errors():
    # odd facet counts are only caught inside the per-instance generator
    summary = run_campaign(Campaign(dim=2, facets=7, instances=3))
    assert summary["rows"] == 0
    assert len(summary["errors"]) == 3
    for rec in summary["errors"]:
        assert rec["error"].startswith("BadParameter")
    assert summary["per_p"]["0.0"]["pass_rate"] is None


def test_campaign_row_shape_in_merge_target_mode():
    """Target mode leaves verdict fields empty (K has empty facets) but
    still reports scan columns."""
    cfg = Campaign(dim=2, facets=8, instances=2, p_list=(0.0,), seed=3,
                   pair_mode="independent-merge", activate="target",
                   scan_grid=33)
    summary = run_campaign(cfg)
    assert summary["errors"] == []
    stats = summary["per_p"]["0.0"]
    assert stats["rows"] == 2
    assert stats["pass_rate"] is None
    assert stats["events_total"] >= 1
    assert stats["concave_all"] is True
