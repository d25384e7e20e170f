"""Command-line front end.

Subcommands: gen (random body), pair (companion body), check-local
(verdict for one pair), scan (lambda interpolation to CSV), campaign
(batch verification). Bodies travel as JSON, scans as CSV; outputs are
deterministic for fixed inputs and seed. Exit codes: 0 success / passed
verdict, 1 failed verdict or campaign instance errors, 2 usage,
validation or I/O problems.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .bodies import (
    box,
    dumps_canonical,
    from_pairs,
    read_polytope,
    to_json_dict,
    write_json_atomic,
    write_polytope,
)
from .combine import path_from_bodies
from .errors import FileFormatError, LpbmError
from .generate import (
    campaign_from_dict,
    independent_merge_pair,
    merge_pair,
    random_symmetric_body,
    run_campaign,
)
from .geometry import enumerate_geometry, perturb_within_atype
from .localform import evaluate_pair
from .scan import scan, write_scan_csv


def _emit_body(sv, out):
    if out:
        write_polytope(out, sv)
    else:
        sys.stdout.write(dumps_canonical(to_json_dict(sv)))


def _load_body(path, jitter, rng):
    """Read a body; with --jitter, scale each height pair by a random
    factor in [1-jitter, 1+jitter] to break degeneracies (opt-in: the
    verdict then refers to the jittered body, not the input)."""
    sv = read_polytope(path)
    if jitter:
        factors = 1.0 + rng.uniform(-jitter, jitter, size=len(sv.heights) // 2)
        sv = from_pairs(sv.normals[0::2], sv.heights[0::2] * factors)
    return sv


def cmd_gen(args) -> int:
    if args.preset == "box":
        if args.facets != 2 * args.dim:
            raise FileFormatError(
                f"the box preset has exactly {2 * args.dim} facets in "
                f"dimension {args.dim}, got --facets {args.facets}")
        sv = box(args.dim)
    else:
        sv = random_symmetric_body(args.dim, args.facets, args.seed)
    _emit_body(sv, args.out)
    return 0


def cmd_pair(args) -> int:
    k_sv = read_polytope(args.body)
    if args.mode == "perturb":
        if args.out_k:
            raise FileFormatError("--out-k only applies to merge mode "
                                  "(perturb leaves the input body unchanged)")
        l_sv = perturb_within_atype(k_sv, args.magnitude, seed=args.seed)
        _emit_body(l_sv, args.out)
        return 0
    if args.out_k is None:
        raise FileFormatError("independent-merge rewrites both bodies over "
                              "the union normal list; --out-k is required")
    if args.with_body:
        l0 = read_polytope(args.with_body)
        km, lm = merge_pair(k_sv, l0, args.magnitude, args.seed, args.activate)
    else:
        km, lm = independent_merge_pair(
            k_sv, args.facets, args.magnitude, args.seed, args.activate)
    write_polytope(args.out_k, km)
    _emit_body(lm, args.out)
    return 0


def cmd_check_local(args) -> int:
    rng = np.random.default_rng(args.seed)
    k_sv = _load_body(args.body_k, args.jitter, rng)
    l_sv = _load_body(args.body_l, args.jitter, rng)
    verdict = evaluate_pair(
        enumerate_geometry(k_sv), l_sv, args.p, lam=args.lam, tol=args.tol)
    payload = verdict.to_json_dict()
    if args.out:
        write_json_atomic(args.out, payload)
    sys.stdout.write(dumps_canonical(payload))
    return 0 if verdict.passed else 1


def cmd_scan(args) -> int:
    rng = np.random.default_rng(args.seed)
    k_sv = _load_body(args.body_k, args.jitter, rng)
    l_sv = _load_body(args.body_l, args.jitter, rng)
    path = path_from_bodies(k_sv, l_sv, args.p)
    report = scan(
        path,
        grid_size=args.lambda_grid,
        event_tol=args.event_tol,
        tol=args.tol,
        concavity_tol=args.concavity_tol,
    )
    write_scan_csv(report, args.out)
    sys.stdout.write(dumps_canonical({
        "concave": report.concave,
        "events": len(report.events),
        "grid_size": report.grid_size,
        "out": args.out,
    }))
    return 0


_CAMPAIGN_KEYS = (
    "dim", "facets", "instances", "seed", "pair_mode", "magnitude",
    "pair_facets", "activate", "scan_grid", "event_tol", "tol",
    "out_csv", "out_json",
)


def cmd_campaign(args) -> int:
    cfg: dict = {}
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                cfg = json.load(fh)
        except OSError as exc:
            raise FileFormatError(f"{args.config}: cannot read file: {exc}")
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"{args.config}: invalid JSON: {exc}")
        if not isinstance(cfg, dict):
            raise FileFormatError(f"{args.config}: expected a JSON object")
    # explicit flags override the config file
    for key in _CAMPAIGN_KEYS:
        val = getattr(args, key)
        if val is not None:
            cfg[key] = val
    if args.p_list is not None:
        cfg["p_list"] = [float(tok) for tok in args.p_list.split(",") if tok]
    summary = run_campaign(campaign_from_dict(cfg))
    sys.stdout.write(dumps_canonical(summary))
    return 1 if summary["errors"] else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lpbm",
        description="Support-vector polytopes: combinations, local "
                    "Brunn-Minkowski verdicts, lambda scans, campaigns.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a random symmetric simple body")
    g.add_argument("--dim", type=int, default=2, choices=(2, 3, 4))
    g.add_argument("--facets", type=int, default=8,
                   help="total facet count (even, >= 2*dim)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--preset", choices=("box",),
                   help="axis-aligned unit box instead of a random draw")
    g.add_argument("--out", help="output JSON path (default: stdout)")
    g.set_defaults(func=cmd_gen)

    pr = sub.add_parser("pair", help="build a companion body for BODY")
    pr.add_argument("body", help="polytope JSON of the base body K")
    pr.add_argument("--mode", choices=("perturb", "independent-merge"),
                    default="perturb")
    pr.add_argument("--magnitude", type=float, default=0.05)
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--facets", type=int, default=8,
                    help="facet count of the drawn partner (merge mode)")
    pr.add_argument("--with", dest="with_body", metavar="L0_JSON",
                    help="merge with this body instead of a random draw")
    pr.add_argument("--activate", choices=("both", "target"), default="both",
                    help="jitter K's foreign heights down (active) or up "
                         "(redundant, guarantees events)")
    pr.add_argument("--out", help="output JSON for L (default: stdout)")
    pr.add_argument("--out-k",
                    help="output JSON for K over the union list (merge mode)")
    pr.set_defaults(func=cmd_pair)

    ck = sub.add_parser("check-local",
                        help="local inequality + NSD verdict for a pair")
    ck.add_argument("body_k", metavar="K_JSON")
    ck.add_argument("body_l", metavar="L_JSON")
    ck.add_argument("--p", type=float, default=0.0)
    ck.add_argument("--lam", "--lambda", dest="lam", type=float, default=0.0,
                    help="evaluate the quadratic form at this path point")
    ck.add_argument("--tol", type=float, default=1e-9)
    ck.add_argument("--jitter", type=float, default=0.0,
                    help="random relative height jitter applied to both "
                         "inputs (degeneracy breaking, opt-in)")
    ck.add_argument("--seed", type=int, default=0, help="jitter seed")
    ck.add_argument("--out", help="also write the verdict JSON here")
    ck.set_defaults(func=cmd_check_local)

    sc = sub.add_parser("scan", help="scan the interpolation path to CSV")
    sc.add_argument("body_k", metavar="K_JSON")
    sc.add_argument("body_l", metavar="L_JSON")
    sc.add_argument("--p", type=float, default=0.0)
    sc.add_argument("--lambda-grid", type=int, default=257,
                    help="number of lambda grid points")
    sc.add_argument("--event-tol", type=float, default=1e-10,
                    help="event bracket width")
    sc.add_argument("--tol", type=float, default=1e-10,
                    help="facet incidence slack")
    sc.add_argument("--concavity-tol", type=float, default=1e-7)
    sc.add_argument("--jitter", type=float, default=0.0,
                    help="random relative height jitter applied to both "
                         "inputs (degeneracy breaking, opt-in)")
    sc.add_argument("--seed", type=int, default=0, help="jitter seed")
    sc.add_argument("--out", required=True, help="output CSV path")
    sc.set_defaults(func=cmd_scan)

    cp = sub.add_parser("campaign", help="batch verification campaign")
    cp.add_argument("--config", help="campaign config JSON")
    cp.add_argument("--dim", type=int)
    cp.add_argument("--facets", type=int)
    cp.add_argument("--instances", type=int)
    cp.add_argument("--p-list", help="comma-separated p values")
    cp.add_argument("--seed", type=int)
    cp.add_argument("--pair-mode", dest="pair_mode",
                    choices=("perturb", "independent-merge"))
    cp.add_argument("--magnitude", type=float)
    cp.add_argument("--pair-facets", dest="pair_facets", type=int)
    cp.add_argument("--activate", choices=("both", "target"))
    cp.add_argument("--scan-grid", dest="scan_grid", type=int,
                    help="lambda grid per instance (0 disables scanning)")
    cp.add_argument("--event-tol", dest="event_tol", type=float)
    cp.add_argument("--tol", type=float)
    cp.add_argument("--out-csv", dest="out_csv", help="per-instance CSV path")
    cp.add_argument("--out-json", dest="out_json", help="summary JSON path")
    cp.set_defaults(func=cmd_campaign)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LpbmError as exc:
        print(f"lpbm: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
