"""Walk through the basic objects: support vectors, the dual-hull
enumeration, and what happens when a listed facet is redundant."""

import numpy as np

from lpbm import (
    box,
    enumerate_geometry,
    from_pairs,
    invariant_residuals,
    regular_polygon,
    volume,
)


def show(name, sv):
    geom = enumerate_geometry(sv)
    print(f"{name}: dim {sv.dim}, {len(sv.heights)} listed facets, "
          f"{int(geom.nonempty.sum())} nonempty, vol {geom.volume:.6f}")
    return geom


def main():
    square = show("unit square", box(2))
    print("  vertices:")
    for v in square.vertices:
        print(f"    {v}")

    hexagon = show("regular hexagon", regular_polygon(6))
    print(f"  facet measures: {np.round(hexagon.facet_measures, 6)}")
    print(f"  exact volume 2*sqrt(3) = {2 * np.sqrt(3):.6f}")

    # raise the height on one pair of diagonal directions above the
    # corner support sqrt(2): the constraint goes redundant, the body
    # stays the square, and the facet reads as empty
    d = 1 / np.sqrt(2)
    normals = np.array([[1, 0], [0, 1], [d, d], [d, -d]])
    cut = from_pairs(normals, np.array([1.0, 1.0, 1.5, 1.5]))
    geom = show("square + two redundant diagonal cuts", cut)
    print(f"  support numbers on the diagonals: "
          f"{geom.support_numbers[4]:.6f} (corner support sqrt(2))")

    # the same list with the diagonals pulled below sqrt(2) clips the
    # corners and all eight facets coexist
    cut2 = from_pairs(normals, np.array([1.0, 1.0, 1.2, 1.2]))
    show("square with clipped corners", cut2)

    print("\nconsistency residuals on a random 3d body:")
    from lpbm import random_symmetric_body
    body = enumerate_geometry(random_symmetric_body(3, 14, seed=4))
    for key, val in invariant_residuals(body).items():
        print(f"  {key:18s} {val:.3e}")
    print(f"  volume helper agrees: {volume(body):.9f}")


if __name__ == "__main__":
    main()
