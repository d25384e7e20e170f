"""Support-vector representation of origin-symmetric polytopes.

A body is stored as (dim, normals, heights): N outward unit facet normals
and N positive support heights, with antipodal normals adjacent in the
list (normals[2k+1] == -normals[2k]) and equal heights on each pair.
Heights may be redundant: the polytope is the intersection of half-spaces
{x : <x, u_i> <= h_i} and a given constraint need not touch it.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import BadParameter, FileFormatError, InvalidSupportVector, NotSymmetric

# Tolerances fixed across the package.
TAU_UNIT = 1e-12        # |norm(u) - 1| allowed on input normals
TAU_PAIR = 1e-12        # antipodal pairing / height equality (relative)
TAU_MATCH = 1e-9        # max |u_a - u_b| for "same normal list" checks


@dataclass(eq=False)
class SupportVector:
    """Heights over a fixed symmetric normal list.

    normals: (N, dim) float array, rows unit length, consecutive rows
    antipodal. heights: (N,) positive floats, equal on each pair. Arrays
    are locked read-only after validation; treat instances as immutable.
    """

    dim: int
    normals: np.ndarray
    heights: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        self.normals = np.ascontiguousarray(np.asarray(self.normals, dtype=float))
        self.heights = np.ascontiguousarray(np.asarray(self.heights, dtype=float))
        if self.validate:
            _check_support_vector(self.dim, self.normals, self.heights)
        self.normals.flags.writeable = False
        self.heights.flags.writeable = False

    def __len__(self) -> int:
        return self.normals.shape[0]

    @staticmethod
    def pair_index(k: int) -> int:
        """Index of the antipodal partner of constraint k."""
        return k ^ 1

    def with_heights(self, heights) -> "SupportVector":
        """Same normal list, new heights (re-validated)."""
        return SupportVector(self.dim, self.normals, np.asarray(heights, dtype=float))

    def scaled(self, c: float) -> "SupportVector":
        if c <= 0:
            raise BadParameter(f"scale factor must be positive, got {c}")
        return self.with_heights(self.heights * c)


def _check_support_vector(dim: int, normals: np.ndarray, heights: np.ndarray) -> None:
    if dim not in (2, 3, 4):
        raise InvalidSupportVector(f"dim must be 2, 3 or 4, got {dim}")
    if normals.ndim != 2 or normals.shape[1] != dim:
        raise InvalidSupportVector(
            f"normals must have shape (N, {dim}), got {normals.shape}")
    n_rows = normals.shape[0]
    if heights.shape != (n_rows,):
        raise InvalidSupportVector(
            f"heights must have shape ({n_rows},), got {heights.shape}")
    if n_rows < 2 * dim:
        raise InvalidSupportVector(
            f"need at least {2 * dim} normals in dimension {dim}, got {n_rows}")
    if n_rows % 2 != 0:
        raise NotSymmetric(f"normal count must be even, got {n_rows}")
    if not np.all(np.isfinite(normals)):
        raise InvalidSupportVector("normals contain non-finite entries")
    if not np.all(np.isfinite(heights)):
        raise InvalidSupportVector("heights contain non-finite entries")
    norms = np.linalg.norm(normals, axis=1)
    bad = np.flatnonzero(np.abs(norms - 1.0) > TAU_UNIT)
    if bad.size:
        k = int(bad[0])
        raise InvalidSupportVector(
            f"normals[{k}] is not unit length (norm {norms[k]:.17g})")
    nonpos = np.flatnonzero(heights <= 0.0)
    if nonpos.size:
        k = int(nonpos[0])
        raise InvalidSupportVector(
            f"heights[{k}] must be positive, got {heights[k]:.17g}")
    even = normals[0::2]
    odd = normals[1::2]
    mism = np.flatnonzero(np.linalg.norm(even + odd, axis=1) > TAU_PAIR)
    if mism.size:
        k = 2 * int(mism[0])
        raise NotSymmetric(
            f"normals[{k + 1}] is not the antipode of normals[{k}]")
    hs = heights.reshape(-1, 2)
    rel = np.abs(hs[:, 0] - hs[:, 1]) / np.maximum(hs[:, 0], hs[:, 1])
    hmism = np.flatnonzero(rel > TAU_PAIR)
    if hmism.size:
        k = 2 * int(hmism[0])
        raise NotSymmetric(
            f"heights[{k}] and heights[{k + 1}] differ on an antipodal pair")


def same_normal_list(a: SupportVector, b: SupportVector, tol: float = TAU_MATCH) -> bool:
    """True when a and b are expressed over the same ordered normal list."""
    if a.dim != b.dim or len(a) != len(b):
        return False
    return float(np.max(np.abs(a.normals - b.normals))) <= tol


def require_same_normals(a: SupportVector, b: SupportVector) -> None:
    from .errors import NormalSetMismatch
    if not same_normal_list(a, b):
        raise NormalSetMismatch(
            "bodies are not expressed over the same ordered normal list; "
            "merge normal lists (with redundant heights) first")


# -- constructors ------------------------------------------------------------

def from_pairs(directions, heights) -> SupportVector:
    """Build a SupportVector from one representative per antipodal pair.

    directions: (N/2, dim) unit rows; heights: (N/2,) positive. The result
    interleaves (u, -u) with equal heights.
    """
    directions = np.asarray(directions, dtype=float)
    heights = np.asarray(heights, dtype=float)
    half, dim = directions.shape
    normals = np.empty((2 * half, dim))
    normals[0::2] = directions
    normals[1::2] = -directions
    hh = np.repeat(heights, 2)
    return SupportVector(dim, normals, hh)


def box(dim: int, half_widths=None) -> SupportVector:
    """Axis-aligned box; heights are the half-widths (default all 1)."""
    if half_widths is None:
        half_widths = np.ones(dim)
    return from_pairs(np.eye(dim), np.asarray(half_widths, dtype=float))


def regular_polygon(sides: int, height: float = 1.0, phase: float = 0.0) -> SupportVector:
    """Regular polygon in the plane with an even number of sides.

    Normals sit at angles phase + 2*pi*j/sides; height is the common
    support value (inradius).
    """
    if sides % 2 != 0 or sides < 4:
        raise BadParameter(f"sides must be even and >= 4, got {sides}")
    ang = phase + 2.0 * np.pi * np.arange(sides // 2) / sides
    dirs = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    return from_pairs(dirs, np.full(sides // 2, float(height)))


# -- JSON round trip ---------------------------------------------------------

def to_json_dict(sv: SupportVector) -> dict:
    return {
        "dim": sv.dim,
        "normals": [[float(x) for x in row] for row in sv.normals],
        "heights": [float(h) for h in sv.heights],
    }


def from_json_dict(payload: dict, where: str = "<payload>") -> SupportVector:
    if not isinstance(payload, dict):
        raise FileFormatError(f"{where}: top-level JSON value must be an object")
    for key in ("dim", "normals", "heights"):
        if key not in payload:
            raise FileFormatError(f"{where}: missing required field '{key}'")
    dim = payload["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool):
        raise FileFormatError(f"{where}: field 'dim' must be an integer")
    try:
        normals = np.asarray(payload["normals"], dtype=float)
        heights = np.asarray(payload["heights"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise FileFormatError(f"{where}: normals/heights are not numeric arrays: {exc}")
    try:
        return SupportVector(dim, normals, heights)
    except InvalidSupportVector as exc:
        raise FileFormatError(f"{where}: {exc}") from exc


def read_polytope(path) -> SupportVector:
    """Read a body from a polytope JSON file, validating all invariants."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise FileFormatError(f"{path}: cannot read file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FileFormatError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return from_json_dict(payload, where=str(path))


def dumps_canonical(obj) -> str:
    """Deterministic JSON text: sorted keys, 2-space indent, repr floats."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json_atomic(path, obj) -> None:
    """Serialize obj deterministically and rename into place."""
    text = dumps_canonical(obj)
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_polytope(path, sv: SupportVector) -> None:
    write_json_atomic(path, to_json_dict(sv))
