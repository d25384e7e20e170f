"""Small randomized campaign: merged pairs, verdicts, scans, summary."""

import argparse
import json

from lpbm import Campaign, run_campaign


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dim", type=int, default=2)
    ap.add_argument("--facets", type=int, default=8)
    ap.add_argument("--instances", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out-csv", default=None)
    args = ap.parse_args()

    cfg = Campaign(dim=args.dim, facets=args.facets,
                   instances=args.instances, p_list=(0.0, 0.5),
                   seed=args.seed, pair_mode="independent-merge",
                   magnitude=0.05, scan_grid=65, out_csv=args.out_csv)
    summary = run_campaign(cfg)

    print(json.dumps(summary["config"], indent=2, sort_keys=True))
    print(f"rows: {summary['rows']}, instance errors: "
          f"{len(summary['errors'])}")
    for p, stats in summary["per_p"].items():
        print(f"p = {p}:")
        print(f"  pass rate    {stats['pass_rate']}")
        print(f"  lhs/scale in [{stats['lhs_rel_min']:.4f}, "
              f"{stats['lhs_rel_max']:.4f}]")
        print(f"  max eig max  {stats['max_eig_max']:.3e}")
        print(f"  events total {stats['events_total']}, "
              f"all scans concave: {stats['concave_all']}")


if __name__ == "__main__":
    main()
