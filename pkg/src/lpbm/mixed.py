"""Mixed volumes over a shared normal list.

With P enumerated and Q given by heights over the same list,

    V(Q, P[n-1])    = (1/n) sum_i h_i(Q) |F_i(P)|
    V(Q, Q, P[n-2]) = (1/(n(n-1))) sum_{i,j} h_i(Q) h_j(Q) Gamma_ij(P)

where Gamma is assembled from ridge measures and dihedral angles:
Gamma_ij = csc(theta_ij) |F_ij| for adjacent i != j, Gamma_ii =
- sum_k cot(theta_ik) |F_ik|, and zero otherwise. The row identity
sum_j h_j(P) Gamma_ij = (n-1) |F_i(P)| ties the matrix back to the facet
areas and is what the kernel of the local quadratic form rests on.

mixed_volume_oracle is the deliberately independent route: it never
touches Gamma, only volumes of P + tQ on an integer grid, and reads the
mixed volumes off the polynomial coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .bodies import SupportVector, require_same_normals
from .errors import BadParameter, EmptyFacet
from .geometry import PolytopeGeometry, enumerate_geometry


def surface_measure(geom: PolytopeGeometry) -> list:
    """Atoms (i, |F_i|) of the surface area measure, nonempty facets only."""
    return [(int(i), float(geom.facet_measures[i]))
            for i in np.flatnonzero(geom.nonempty)]


def mixed_volume_1(q: SupportVector, p_geom: PolytopeGeometry) -> float:
    """V(Q, P[n-1]) = (1/n) sum h_i(Q) |F_i(P)|.

    Q enters through its listed heights only; for the value to be the
    mixed volume of the bodies those heights must be support numbers.
    """
    require_same_normals(q, p_geom.source)
    return float(np.dot(q.heights, p_geom.facet_measures)) / p_geom.dim


def gamma_submatrix(geom: PolytopeGeometry, idx: np.ndarray) -> np.ndarray:
    """Gamma restricted to the facet subset idx (used by scans, where
    empty facets carry no surface measure and drop out of the sums)."""
    u_mat = geom.source.normals
    k = idx.size
    out = np.zeros((k, k))
    pos = {int(i): a for a, i in enumerate(idx)}
    for (i, j), rij in geom.ridge_measures.items():
        if i not in pos or j not in pos:
            continue
        dot = float(np.dot(u_mat[i], u_mat[j]))
        sin = np.sqrt(1.0 - dot * dot)
        csc, cot = 1.0 / sin, dot / sin
        a, b = pos[i], pos[j]
        out[a, b] += csc * rij
        out[b, a] += csc * rij
        out[a, a] -= cot * rij
        out[b, b] -= cot * rij
    return out


@dataclass(eq=False)
class GammaMatrix:
    """Dense symmetric N x N ridge matrix of an all-facets-nonempty body."""

    base: PolytopeGeometry
    matrix: np.ndarray

    def row_identity_residual(self) -> float:
        """max_i |sum_j h_j Gamma_ij - (n-1)|F_i|| / (n-1)|F_i|."""
        lhs = self.matrix @ self.base.source.heights
        rhs = (self.base.dim - 1) * self.base.facet_measures
        return float(np.max(np.abs(lhs - rhs) / np.abs(rhs)))


def gamma_matrix(p_geom: PolytopeGeometry) -> GammaMatrix:
    if not p_geom.nonempty.all():
        empty = np.flatnonzero(~p_geom.nonempty)
        raise EmptyFacet(
            f"Gamma is undefined with empty facets (indices {empty.tolist()})")
    idx = np.arange(len(p_geom))
    m = gamma_submatrix(p_geom, idx)
    m.flags.writeable = False
    return GammaMatrix(p_geom, m)


def mixed_volume_2(q: SupportVector, p_geom: PolytopeGeometry) -> float:
    """V(Q, Q, P[n-2]) through the Gamma quadratic form."""
    require_same_normals(q, p_geom.source)
    g = gamma_matrix(p_geom).matrix
    n = p_geom.dim
    return float(q.heights @ g @ q.heights) / (n * (n - 1))


def weighted_integral(l_sv: SupportVector, k_geom: PolytopeGeometry) -> float:
    """integral of h_L^2 / h_K against the surface measure of K."""
    require_same_normals(l_sv, k_geom.source)
    h_k = k_geom.source.heights
    return float(np.sum(l_sv.heights ** 2 / h_k * k_geom.facet_measures))


def mixed_volume_oracle(q: SupportVector, p: SupportVector, k: int,
                        tol: float = None) -> float:
    """V(Q[k], P[n-k]) by polynomial interpolation of vol(P + tQ).

    Enumerates the body with heights h_P + t h_Q for t = 0..n and solves
    the exact (n <= 4) Vandermonde system for the coefficients of
    vol = sum_k C(n,k) V(Q[k], P[n-k]) t^k. Valid whenever both height
    vectors are support numbers over the shared list, since every facet
    normal of P + tQ then lies in the list. Shares no code with the
    Gamma route.
    """
    require_same_normals(q, p)
    n = p.dim
    if not 0 <= k <= n:
        raise BadParameter(f"k must lie in 0..{n}, got {k}")
    ts = np.arange(n + 1, dtype=float)
    vols = []
    for t in ts:
        sv = p.with_heights(p.heights + t * q.heights)
        if tol is None:
            vols.append(enumerate_geometry(sv).volume)
        else:
            vols.append(enumerate_geometry(sv, tol).volume)
    coeffs = np.linalg.solve(np.vander(ts, increasing=True), np.asarray(vols))
    return float(coeffs[k]) / comb(n, k)
