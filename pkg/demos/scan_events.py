"""Scan a log-interpolation path that crosses a facet activation.

K is a square carrying redundant diagonal constraints (heights above
the corner support sqrt(2)), L an octagon holding them strictly below.
Along the path the diagonal heights cross the corner support at a
closed-form lambda*, the a-type changes, and the scan brackets it.
"""

import math

import numpy as np

from lpbm import from_pairs, path_from_bodies, scan, write_scan_csv

HI, LO = 1.06, 0.82


def main():
    d = 1 / math.sqrt(2)
    normals = np.array([[1, 0], [0, 1], [d, d], [d, -d]])
    s2 = math.sqrt(2)
    k = from_pairs(normals, np.array([1.0, 1.0, s2 * HI, s2 * HI]))
    l_sv = from_pairs(normals, np.array([1.0, 1.0, s2 * LO, s2 * LO]))

    # diagonal activates where HI^(1-lam) LO^lam = 1
    lam_star = math.log(HI) / math.log(HI / LO)
    print(f"closed-form activation at lambda* = {lam_star:.12f}")

    report = scan(path_from_bodies(k, l_sv, 0.0), grid_size=257)
    print(f"grid {report.grid_size}, concave = {report.concave}, "
          f"{len(report.events)} event(s)")
    for lo, hi in report.events:
        mid = 0.5 * (lo + hi)
        print(f"  bracket [{lo:.12f}, {hi:.12f}]")
        print(f"  center off by {abs(mid - lam_star):.2e}, "
              f"width {hi - lo:.2e}")

    # derivative columns are left empty only inside a bracket; the
    # value curve itself is defined everywhere
    finite_d2 = np.isfinite(report.d2).sum()
    print(f"d2 defined at {finite_d2} / {report.grid_size} grid points")

    out = "scan_events.csv"
    write_scan_csv(report, out)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
