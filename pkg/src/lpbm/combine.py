"""Log and L^p height combinations along a fixed normal list.

For p > 0 the combined heights are ((1-lam) h_K^p + lam h_L^p)^(1/p);
p = 0 is the log combination h_K^(1-lam) h_L^lam. Both are evaluated
through the per-facet exponent s_i (log h_L/h_K at p = 0, else
((h_L/h_K)^p - 1)/p), which keeps the two regimes on one numerically
stable footing: all coefficient formulas use expm1/log1p so that p down
to the 1e-8 cutoff loses no precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bodies import SupportVector, require_same_normals
from .errors import BadParameter
from .geometry import EMPTY_SLACK, PolytopeGeometry, enumerate_geometry

# p values in (0, P_MIN) are rejected: the L^p and log regimes become
# numerically indistinguishable there and callers should say which one
# they mean.
P_MIN = 1e-8


def check_p(p: float) -> float:
    p = float(p)
    if p == 0.0:
        return p
    if P_MIN <= p <= 1.0:
        return p
    raise BadParameter(
        f"p must be 0 or in [{P_MIN}, 1], got {p:.17g}")


def check_lambda(lam: float) -> float:
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise BadParameter(f"lambda must lie in [0, 1], got {lam:.17g}")
    return lam


def _exponents(base: SupportVector, target: SupportVector, p: float) -> np.ndarray:
    log_ratio = np.log(target.heights) - np.log(base.heights)
    if p == 0.0:
        return log_ratio
    return np.expm1(p * log_ratio) / p


@dataclass(eq=False)
class LambdaPath:
    """The one-parameter family lam -> K_lam between two bodies.

    Precomputes s_i once; heights_at(lam) = h_K,i * a_i(lam) with
    a_i = (1 + lam p s_i)^(1/p) (e^(lam s_i) at p = 0). coeffs returns
    the (a, b, c) exponent family driving the derivative formulas:
    b = a^(1-p), c = a^(1-2p), so that a' = s b and b' = (1-p) s c.
    """

    base: SupportVector
    target: SupportVector
    p: float
    s: np.ndarray = field(default=None)

    def __post_init__(self):
        require_same_normals(self.base, self.target)
        self.p = check_p(self.p)
        if self.s is None:
            self.s = _exponents(self.base, self.target, self.p)
        self.s.flags.writeable = False

    def coeffs(self, lam: float):
        lam = check_lambda(lam)
        if self.p == 0.0:
            a = np.exp(lam * self.s)
            return a, a, a
        # 1 + lam p s = (1-lam) + lam (h_L/h_K)^p > 0 on [0,1] always
        core = np.log1p(lam * self.p * self.s) / self.p
        a = np.exp(core)
        b = np.exp((1.0 - self.p) * core)
        c = np.exp((1.0 - 2.0 * self.p) * core)
        return a, b, c

    def heights_at(self, lam: float) -> np.ndarray:
        a, _, _ = self.coeffs(lam)
        return self.base.heights * a

    def body_at(self, lam: float) -> SupportVector:
        return self.base.with_heights(self.heights_at(lam))


def path_from_bodies(base: SupportVector, target: SupportVector, p: float) -> LambdaPath:
    """Validated LambdaPath between two bodies over one normal list."""
    return LambdaPath(base, target, p)


def path_coeffs(path: LambdaPath, lam: float):
    """(a_i, b_i, c_i) at lam; see LambdaPath.coeffs."""
    return path.coeffs(lam)


def lp_combine(base: SupportVector, target: SupportVector, p: float, lam: float) -> SupportVector:
    """Combined body at parameter lam (heights only, no enumeration)."""
    return path_from_bodies(base, target, p).body_at(lam)


def wulff_shape(sv: SupportVector, tol: float = EMPTY_SLACK) -> PolytopeGeometry:
    """Geometry of the intersection body of the listed half-spaces.

    Identical to enumerate_geometry; named for the role combined height
    vectors play: facets whose constraint is redundant come back with
    zero measure, and support_numbers <= heights everywhere.
    """
    return enumerate_geometry(sv, tol)
