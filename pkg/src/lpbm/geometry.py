"""Dual-hull enumeration of support-vector polytopes.

The polytope P = {x : <x, u_i> <= h_i} is recovered by lifting the
constraints to the polar dual points u_i / h_i, taking their convex hull,
and mapping dual facets back to primal vertices. Each candidate vertex is
then re-solved from its active n x n system, so qhull only supplies the
combinatorics. Only the simple regime is supported: a vertex with more
than n active constraints (within tolerance) raises DegenerateVertex.

Facet areas, ridge measures and dihedral angles feed the mixed-volume and
quadratic-form modules; the a-type signature (which facets are nonempty
plus the vertex-facet incidence structure) is the object the lambda scans
track for events.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .bodies import SupportVector, require_same_normals
from .errors import (
    BadParameter,
    DegenerateVertex,
    LpbmError,
    NearParallelFacets,
    NeighborhoodNotFound,
    Unbounded,
)

# Default relative slack for deciding that a constraint is active at a
# vertex: constraint i is active when h_i - <v, u_i> <= EMPTY_SLACK * h_i.
EMPTY_SLACK = 1e-10

# Adjacent facet normals with |<u_i, u_j>| beyond this are rejected; the
# csc/cot ridge weights blow up there.
NEAR_PARALLEL = 1.0 - 1e-12


@dataclass(frozen=True)
class ATypeSignature:
    """Combinatorial type of a body over a fixed normal list.

    normal_index_set: indices of nonempty facets. incidence_hash: sha256
    over the sorted vertex-facet incidence rows (order-canonical, so two
    enumerations of the same body always agree).
    """

    normal_index_set: tuple
    incidence_hash: str

    def short_hash(self) -> str:
        return self.incidence_hash[:16]


@dataclass(eq=False)
class PolytopeGeometry:
    """Everything the enumeration knows about one body.

    vertices are sorted by their active-constraint index sets, so the
    layout is deterministic. facet_measures[i] is zero exactly when
    constraint i is redundant (nonempty[i] is False). ridge_measures and
    angles are keyed by (i, j) with i < j, adjacent pairs only; in the
    plane the ridge "measure" is the counting measure (1 per shared
    vertex). support_numbers[i] = max_v <v, u_i> may sit strictly below
    heights[i] on empty facets.
    """

    source: SupportVector
    vertices: np.ndarray
    vertex_facet_incidence: np.ndarray
    facet_measures: np.ndarray
    nonempty: np.ndarray
    ridge_measures: dict
    angles: dict
    support_numbers: np.ndarray
    volume: float

    @property
    def dim(self) -> int:
        return self.source.dim

    def __len__(self) -> int:
        return len(self.source)

    def ridge(self, i: int, j: int) -> float:
        """|F_ij|, or 0.0 when facets i and j are not adjacent."""
        key = (i, j) if i < j else (j, i)
        return self.ridge_measures.get(key, 0.0)

    def angle(self, i: int, j: int) -> float:
        key = (i, j) if i < j else (j, i)
        try:
            return self.angles[key]
        except KeyError:
            raise BadParameter(f"facets {i} and {j} are not adjacent")

    def neighbors(self, i: int) -> list:
        out = [b for (a, b) in self.ridge_measures if a == i]
        out += [a for (a, b) in self.ridge_measures if b == i]
        return sorted(out)


def volume(geom: PolytopeGeometry) -> float:
    """Volume of the enumerated body (cached at enumeration time)."""
    return geom.volume


# -- enumeration -------------------------------------------------------------

def enumerate_geometry(sv: SupportVector, tol: float = EMPTY_SLACK) -> PolytopeGeometry:
    """Enumerate vertices, facets, ridges and angles of a support vector.

    Raises Unbounded when the normals do not span R^n, DegenerateVertex
    when some vertex has != n active constraints within the slack
    tolerance (the simple-polytope guard), NearParallelFacets when two
    adjacent normals are numerically parallel.
    """
    n, big_n = sv.dim, len(sv)
    u_mat, h = sv.normals, sv.heights
    if np.linalg.matrix_rank(u_mat, tol=1e-8) < n:
        raise Unbounded("facet normals do not span the ambient space")

    dual = u_mat / h[:, None]
    try:
        hull = ConvexHull(dual)
    except QhullError as exc:
        raise DegenerateVertex(f"dual hull construction failed: {exc}") from exc

    eqs = hull.equations
    offsets = eqs[:, n]
    if np.any(offsets >= -1e-300):
        raise Unbounded("origin is not interior to the dual hull")
    candidates = eqs[:, :n] / (-offsets[:, None])

    act_tol = tol * h
    slack = h[None, :] - candidates @ u_mat.T
    active_sets = set()
    for k, row in enumerate(slack):
        act = np.flatnonzero(row <= act_tol)
        if act.size != n:
            raise DegenerateVertex(
                f"vertex candidate {k} has {act.size} active constraints "
                f"(expected {n}); body is not simple within tolerance")
        active_sets.add(tuple(int(i) for i in act))

    verts = []
    for act in sorted(active_sets):
        try:
            v = np.linalg.solve(u_mat[list(act)], h[list(act)])
        except np.linalg.LinAlgError as exc:
            raise DegenerateVertex(
                f"active set {act} is numerically singular") from exc
        verts.append(v)
    vertices = np.array(verts)

    # Re-derive incidence from the refined coordinates; a borderline
    # constraint can move inside the slack band after the solve.
    slack = h[None, :] - vertices @ u_mat.T
    if np.any(slack < -act_tol[None, :]):
        raise DegenerateVertex("refined vertex violates a constraint")
    incidence = slack <= act_tol[None, :]
    counts = incidence.sum(axis=1)
    if np.any(counts != n):
        k = int(np.flatnonzero(counts != n)[0])
        raise DegenerateVertex(
            f"vertex {k} has {int(counts[k])} active constraints "
            f"(expected {n}); body is not simple within tolerance")

    nonempty = incidence.any(axis=0)
    support_numbers = (vertices @ u_mat.T).max(axis=0)

    facet_measures = np.zeros(big_n)
    for i in np.flatnonzero(nonempty):
        facet_measures[i] = _facet_measure(n, vertices[incidence[:, i]], u_mat[i])

    ridge_measures = {}
    angles = {}
    idx = np.flatnonzero(nonempty)
    for a in range(idx.size):
        for b in range(a + 1, idx.size):
            i, j = int(idx[a]), int(idx[b])
            shared = incidence[:, i] & incidence[:, j]
            cnt = int(shared.sum())
            if cnt == 0:
                continue
            dot = float(np.dot(u_mat[i], u_mat[j]))
            if abs(dot) > NEAR_PARALLEL:
                raise NearParallelFacets(
                    f"facets {i} and {j} are adjacent with |<u_i,u_j>| = {abs(dot):.17g}")
            ridge_measures[(i, j)] = _ridge_measure(
                n, vertices[shared], u_mat[i], u_mat[j], cnt, i, j)
            angles[(i, j)] = float(np.arccos(np.clip(dot, -1.0, 1.0)))

    vol = float(np.dot(h, facet_measures) / n)
    incidence = np.ascontiguousarray(incidence)
    for arr in (vertices, incidence, facet_measures, nonempty, support_numbers):
        arr.flags.writeable = False
    return PolytopeGeometry(
        source=sv,
        vertices=vertices,
        vertex_facet_incidence=incidence,
        facet_measures=facet_measures,
        nonempty=nonempty,
        ridge_measures=ridge_measures,
        angles=angles,
        support_numbers=support_numbers,
        volume=vol,
    )


def _orthonormal_complement(rows: np.ndarray) -> np.ndarray:
    # Columns spanning the orthogonal complement of the given row span.
    q, _ = np.linalg.qr(rows.T, mode="complete")
    return q[:, rows.shape[0]:]


def _sorted_polygon_area(coords: np.ndarray) -> float:
    # Shoelace after angular sort; valid because the point set is the
    # vertex set of a convex polygon.
    center = coords.mean(axis=0)
    rel = coords - center
    order = np.argsort(np.arctan2(rel[:, 1], rel[:, 0]))
    ring = coords[order]
    x, y = ring[:, 0], ring[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def _facet_measure(n: int, pts: np.ndarray, u: np.ndarray) -> float:
    if n == 2:
        if pts.shape[0] != 2:
            raise DegenerateVertex(
                f"edge with {pts.shape[0]} endpoints; body is not simple")
        return float(np.linalg.norm(pts[0] - pts[1]))
    if n == 3:
        if pts.shape[0] < 3:
            raise DegenerateVertex(
                f"2-face with {pts.shape[0]} vertices; body is not simple")
        basis = _orthonormal_complement(u[None, :])
        return _sorted_polygon_area(pts @ basis)
    # n == 4: the facet is a simple 3-polytope; qhull volume on the
    # projected coordinates.
    if pts.shape[0] < 4:
        raise DegenerateVertex(
            f"3-face with {pts.shape[0]} vertices; body is not simple")
    basis = _orthonormal_complement(u[None, :])
    try:
        return float(ConvexHull(pts @ basis).volume)
    except QhullError as exc:
        raise DegenerateVertex(f"flat 3-face: {exc}") from exc


def _ridge_measure(n, pts, u_i, u_j, cnt, i, j):
    if n == 2:
        if cnt != 1:
            raise DegenerateVertex(
                f"edges {i},{j} share {cnt} vertices; body is not simple")
        return 1.0  # counting measure on ridges in the plane
    if n == 3:
        if cnt != 2:
            raise DegenerateVertex(
                f"facets {i},{j} share {cnt} vertices; body is not simple")
        return float(np.linalg.norm(pts[0] - pts[1]))
    if cnt < 3:
        raise DegenerateVertex(
            f"facets {i},{j} share {cnt} vertices; body is not simple")
    basis = _orthonormal_complement(np.stack([u_i, u_j]))
    return _sorted_polygon_area(pts @ basis)


# -- combinatorial type ------------------------------------------------------

def atype_signature(geom: PolytopeGeometry) -> ATypeSignature:
    """Hashable signature of the a-type over the body's normal list."""
    nonempty_idx = tuple(int(i) for i in np.flatnonzero(geom.nonempty))
    rows = sorted(
        row.tobytes() for row in geom.vertex_facet_incidence.astype(np.uint8))
    hasher = hashlib.sha256()
    hasher.update(f"{geom.dim}:{len(geom)}:".encode())
    hasher.update(",".join(map(str, nonempty_idx)).encode())
    hasher.update(b"|")
    for row in rows:
        hasher.update(row)
        hasher.update(b";")
    return ATypeSignature(nonempty_idx, hasher.hexdigest())


def strongly_isomorphic(a: PolytopeGeometry, b: PolytopeGeometry) -> bool:
    """Equal a-type over one shared normal list.

    Raises NormalSetMismatch when the two bodies are not expressed over
    the same ordered list; comparing types across lists is meaningless.
    """
    require_same_normals(a.source, b.source)
    return atype_signature(a) == atype_signature(b)


def perturb_within_atype(
    sv: SupportVector,
    magnitude: float,
    seed: int = 0,
    retry_cap: int = 40,
    tol: float = EMPTY_SLACK,
) -> SupportVector:
    """Random height perturbation keeping the a-type.

    Multiplies each antipodal height pair by (1 + delta) with delta drawn
    uniformly from [-magnitude, magnitude]; halves the magnitude and
    retries while the perturbed body fails to enumerate or changes type.
    magnitude 0 returns an identical copy.
    """
    if magnitude < 0:
        raise BadParameter(f"magnitude must be >= 0, got {magnitude}")
    base = enumerate_geometry(sv, tol)
    if magnitude == 0:
        return sv.with_heights(sv.heights.copy())
    sig0 = atype_signature(base)
    rng = np.random.default_rng(seed)
    raw = rng.uniform(-1.0, 1.0, size=len(sv) // 2)
    mag = float(magnitude)
    for _ in range(retry_cap):
        deltas = np.repeat(raw * mag, 2)
        if np.all(1.0 + deltas > 0.0):
            try:
                cand = sv.with_heights(sv.heights * (1.0 + deltas))
                if atype_signature(enumerate_geometry(cand, tol)) == sig0:
                    return cand
            except LpbmError:
                pass
        mag *= 0.5
    raise NeighborhoodNotFound(
        f"no a-type-preserving perturbation found after {retry_cap} shrinks")


# -- distances and self-checks -----------------------------------------------

def _sphere_directions(dim: int, samples: int) -> np.ndarray:
    if dim == 2:
        ang = 2.0 * np.pi * (np.arange(samples) + 0.5) / samples
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    if dim == 3:
        # Fibonacci sphere.
        k = np.arange(samples) + 0.5
        phi = np.arccos(1.0 - 2.0 * k / samples)
        theta = np.pi * (1.0 + 5.0 ** 0.5) * k
        return np.stack(
            [np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)],
            axis=1)
    rng = np.random.default_rng(97531)  # fixed seed: deterministic estimate
    g = rng.standard_normal((samples, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def hausdorff_distance_upper(
    a: SupportVector, b: SupportVector, samples: int = 256) -> float:
    """Hausdorff distance estimate via support differences.

    Evaluates |h_A - h_B| on both normal lists, both vertex direction
    sets, and a deterministic sphere sample, and returns the maximum.
    For convex bodies the distance is sup over all directions, so this is
    a sampled estimate tightened by the support-relevant extreme
    directions of both bodies.
    """
    if a.dim != b.dim:
        raise BadParameter("bodies live in different dimensions")
    ga, gb = enumerate_geometry(a), enumerate_geometry(b)
    dirs = [a.normals, b.normals, _sphere_directions(a.dim, samples)]
    for g in (ga, gb):
        norms = np.linalg.norm(g.vertices, axis=1)
        keep = norms > 0
        if np.any(keep):
            dirs.append(g.vertices[keep] / norms[keep, None])
    cand = np.vstack(dirs)
    h_a = (ga.vertices @ cand.T).max(axis=0)
    h_b = (gb.vertices @ cand.T).max(axis=0)
    return float(np.max(np.abs(h_a - h_b)))


def invariant_residuals(geom: PolytopeGeometry) -> dict:
    """Internal consistency residuals (all should be ~ machine precision).

    minkowski: |sum |F_i| u_i| / sum |F_i| (closure of the surface
    measure). volume_support: volume recomputed from support numbers.
    facet_recursion: facet areas recomputed from ridge data through
    h_ij = h_j csc(theta) - h_i cot(theta). vertex_symmetry: distance
    from -V to V, scaled.
    """
    u_mat = geom.source.normals
    areas = geom.facet_measures
    total = float(areas.sum())
    res = {}
    res["minkowski"] = float(np.linalg.norm(areas @ u_mat)) / total

    vol2 = float(np.dot(geom.support_numbers, areas)) / geom.dim
    res["volume_support"] = abs(vol2 - geom.volume) / geom.volume

    h = geom.support_numbers
    worst = 0.0
    for i in np.flatnonzero(geom.nonempty):
        acc = 0.0
        for j in geom.neighbors(int(i)):
            th = geom.angle(int(i), j)
            acc += (h[j] / np.sin(th) - h[i] / np.tan(th)) * geom.ridge(int(i), j)
        acc /= max(geom.dim - 1, 1)
        worst = max(worst, abs(acc - areas[i]) / max(areas[i], 1e-300))
    res["facet_recursion"] = worst

    v = geom.vertices
    scale = float(np.max(np.linalg.norm(v, axis=1)))
    d = np.min(np.linalg.norm(v[:, None, :] + v[None, :, :], axis=2), axis=1)
    res["vertex_symmetry"] = float(np.max(d)) / scale
    return res
