"""Evaluate the local quadratic-form inequality for one random pair.

Builds a merged pair over a shared normal list, prints the verdict
fields, and cross-checks the planar value against the Bonnesen route.
"""

import argparse

import numpy as np

from lpbm import (
    check_nsd,
    enumerate_geometry,
    evaluate_pair,
    independent_merge_pair,
    local_2d_via_bonnesen,
    mixed_volume_1,
    psi_form,
    random_symmetric_body,
)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--facets", type=int, default=10)
    ap.add_argument("--p", type=float, default=0.0)
    args = ap.parse_args()

    k0 = random_symmetric_body(2, args.facets, seed=args.seed)
    km, lm = independent_merge_pair(k0, args.facets, 0.05,
                                    seed=args.seed + 1)
    geom = enumerate_geometry(km)
    print(f"pair over {len(km.heights)} shared facets, "
          f"vol K = {geom.volume:.6f}")

    verdict = evaluate_pair(geom, lm, args.p)
    v1 = mixed_volume_1(lm, geom)
    scale = 2 * (2 - args.p) * v1 * v1
    print(f"p = {args.p}")
    print(f"  lhs            {verdict.lhs:.6e}  (lhs/scale "
          f"{verdict.lhs / scale:.4f})")
    print(f"  max even eig   {verdict.max_eig:.3e}")
    print(f"  kernel resid   {verdict.kernel_residual:.3e}")
    print(f"  passed         {verdict.passed}")

    if args.p == 0.0:
        bon = local_2d_via_bonnesen(geom, lm)
        print(f"  bonnesen route {bon:.6e}  "
              f"(gap {abs(bon - verdict.lhs):.2e})")

    # the form itself: largest restricted eigenvalue against the
    # Frobenius scale, and the kernel direction
    form = psi_form(geom, args.p)
    nsd = check_nsd(form)
    h = form.support_vector
    print(f"  ||M h|| / (||M||_F ||h||) = "
          f"{np.linalg.norm(form.matrix @ h) / (form.frobenius() * np.linalg.norm(h)):.3e}")
    print(f"  NSD on even variations: {nsd.passed}")


if __name__ == "__main__":
    main()
