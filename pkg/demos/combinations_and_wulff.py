"""p-means of support vectors and the Wulff shape.

The combination at p = 1 is the ordinary Minkowski interpolation, at
p = 0 the geometric mean. For p < 1 the combined heights need not be
consistent support numbers of any polytope; the Wulff shape is the body
the heights actually cut out.
"""

import numpy as np

from lpbm import (
    box,
    enumerate_geometry,
    from_pairs,
    lp_combine,
    regular_polygon,
    wulff_shape,
)


def main():
    k = box(2)
    l_sv = regular_polygon(4, height=2.0, phase=0.0)  # scaled, rotated square

    print("volumes along the p = 1 (Minkowski) path:")
    for lam in (0.0, 0.25, 0.5, 0.75, 1.0):
        body = lp_combine(k, l_sv, 1.0, lam)
        print(f"  lam {lam:.2f}: vol {enumerate_geometry(body).volume:.6f}")

    print("log path (p = 0) between the same bodies:")
    for lam in (0.0, 0.5, 1.0):
        body = lp_combine(k, l_sv, 0.0, lam)
        print(f"  lam {lam:.2f}: heights {np.round(body.heights[:4], 6)}")

    # shrink p toward 0 at fixed lambda: the combination converges to
    # the log combination at rate p
    lam = 0.5
    at0 = lp_combine(k, l_sv, 0.0, lam).heights
    print("sup-norm distance to the log combination:")
    for p in (1e-1, 1e-2, 1e-3, 5e-4):
        gap = np.abs(lp_combine(k, l_sv, p, lam).heights - at0).max()
        print(f"  p {p:7.1e}: {gap:.3e}")

    # Wulff shape of an inconsistent height vector: the redundant
    # diagonal is clipped to its support number
    d = 1 / np.sqrt(2)
    normals = np.array([[1, 0], [0, 1], [d, d], [d, -d]])
    tall = from_pairs(normals, np.array([1.0, 1.0, 9.0, 9.0]))
    geom = wulff_shape(tall)
    print(f"wulff shape of (1, 1, 9, 9) over square + diagonals: "
          f"vol {geom.volume:.6f}, diagonal support "
          f"{geom.support_numbers[4]:.6f}")
    print(f"enumerate_geometry volume of the same list: "
          f"{enumerate_geometry(tall).volume:.6f} (same body, "
          f"heights kept as stated)")


if __name__ == "__main__":
    main()
