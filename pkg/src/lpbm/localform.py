"""The local quadratic form and its negative-semidefiniteness check.

local_lhs(K, L, p) is the scalar whose nonpositivity is the local
inequality at K in direction L:

    vol(K) (n(n-1) V(L,L,K[n-2]) + (1-p) I) - n(n-p) V(L,K[n-1])^2,

with I the integral of h_L^2/h_K against K's surface measure. psi_form
packages the same data as a quadratic form Psi(X) = X^T M X over height
variations X, negative semidefinite on even variations (X(u) = X(-u),
the variation space of symmetric bodies) exactly when the local
inequality holds for every symmetric direction over K's normal list.
The heights of K always lie in the kernel of M (scaling K moves along
the path), so a sound check is the largest even-restricted eigenvalue
against tol * ||M||_F together with a small kernel residual; check_nsd
reports both.

In the plane there is a second, independent route through the Bonnesen
quadratic vol(L) - 2t V(K,L) + t^2 vol(K) <= 0 for t between the
relative in- and circumradius; local_2d_via_bonnesen evaluates the
integrated form 2 vol(K) vol(L) - 4 V(K,L)^2 + vol(K) I, numerically
equal to local_lhs(K, L, 0) but with vol(L) taken from a direct
enumeration of L rather than from Gamma.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bodies import SupportVector, require_same_normals
from .combine import check_p
from .errors import BadParameter, EigenFailure, EmptyFacet
from .geometry import PolytopeGeometry, enumerate_geometry
from .mixed import gamma_matrix, mixed_volume_1, mixed_volume_2, weighted_integral


def local_lhs(k_geom: PolytopeGeometry, l_sv: SupportVector, p: float) -> float:
    """Left-hand side of the local inequality at K in direction L.

    Requires every facet of K nonempty (the Gamma term). Degree-2
    homogeneous in L's heights; zero when L is a dilate of K;
    nonincreasing in p.
    """
    p = check_p(p)
    require_same_normals(k_geom.source, l_sv)
    if not k_geom.nonempty.all():
        empty = np.flatnonzero(~k_geom.nonempty)
        raise EmptyFacet(
            f"local form needs all facets of K nonempty (empty: {empty.tolist()})")
    n = k_geom.dim
    vol = k_geom.volume
    v2 = mixed_volume_2(l_sv, k_geom)
    wint = weighted_integral(l_sv, k_geom)
    v1 = mixed_volume_1(l_sv, k_geom)
    return vol * (n * (n - 1) * v2 + (1.0 - p) * wint) - n * (n - p) * v1 * v1


@dataclass(eq=False)
class PsiForm:
    """Quadratic form X -> X^T M X over height variations of one body.

    M = n vol ((1-p) diag(|F_i|/h_i) + Gamma) - (n-p) F F^T, symmetrized
    exactly. support_vector holds the heights of the base body, which
    span the (analytic) kernel of M.
    """

    matrix: np.ndarray
    support_vector: np.ndarray
    p: float
    lam: float
    vol: float

    def value(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ self.matrix @ x)

    def frobenius(self) -> float:
        return float(np.linalg.norm(self.matrix, "fro"))

    def kernel_residual(self) -> float:
        """||M h|| / (||M||_F ||h||) for the base heights h."""
        h = self.support_vector
        return float(np.linalg.norm(self.matrix @ h)
                     / (self.frobenius() * np.linalg.norm(h)))


def psi_form(k_geom: PolytopeGeometry, p: float, lam: float = 0.0) -> PsiForm:
    """Assemble the local quadratic form at an enumerated body.

    lam is carried as metadata (the path parameter the body came from)
    and does not enter the matrix.
    """
    p = check_p(p)
    g = gamma_matrix(k_geom).matrix  # raises EmptyFacet when undefined
    n = k_geom.dim
    vol = k_geom.volume
    h = k_geom.source.heights
    f = k_geom.facet_measures
    m = n * vol * ((1.0 - p) * np.diag(f / h) + g) - (n - p) * np.outer(f, f)
    m = 0.5 * (m + m.T)
    m.flags.writeable = False
    return PsiForm(matrix=m, support_vector=h.copy(), p=p, lam=float(lam), vol=vol)


@dataclass(eq=False)
class LocalVerdict:
    """Outcome of a local check; fields not computed stay None.

    near_zero_eig (when set) is the restricted eigenvalue closest to
    zero; reported for kernel diagnostics, never asserted against.
    """

    lhs: float
    max_eig: float
    kernel_residual: float
    passed: bool
    p: float
    lam: float
    tol: float
    near_zero_eig: float = None

    def to_json_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "max_eig": self.max_eig,
            "kernel_residual": self.kernel_residual,
            "passed": bool(self.passed),
            "p": self.p,
            "lambda": self.lam,
            "tol": self.tol,
        }


def _even_basis(n_rows: int) -> np.ndarray:
    # Orthonormal basis of {X : X(u) = X(-u)}: (e_2k + e_2k+1)/sqrt(2).
    half = n_rows // 2
    r = np.zeros((n_rows, half))
    r[0::2, :] = np.eye(half)
    r[1::2, :] = np.eye(half)
    return r / np.sqrt(2.0)


def check_nsd(form: PsiForm, tol: float = 1e-9) -> LocalVerdict:
    """Negative semidefiniteness of Psi over even height variations.

    The inequality concerns symmetric bodies, so the variation space is
    {X : X(u) = X(-u)}; odd directions (one-sided height shifts, i.e.
    asymmetric perturbations) are outside it and genuinely positive for
    p < 1 even on a square. The form is compressed onto an orthonormal
    basis of the even subspace and fully eigendecomposed there. passed
    when the largest restricted eigenvalue does not exceed
    tol * ||M||_F (Frobenius norm of the full matrix); the kernel
    residual and the eigenvalue nearest zero are reported alongside but
    do not gate.
    """
    if tol <= 0:
        raise BadParameter(f"tol must be positive, got {tol}")
    r = _even_basis(form.matrix.shape[0])
    try:
        eigs = np.linalg.eigvalsh(r.T @ form.matrix @ r)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(f"symmetric eigensolve failed: {exc}") from exc
    frob = form.frobenius()
    max_eig = float(eigs[-1])
    return LocalVerdict(
        lhs=None,
        max_eig=max_eig,
        kernel_residual=form.kernel_residual(),
        passed=bool(max_eig <= tol * frob),
        p=form.p,
        lam=form.lam,
        tol=float(tol),
        near_zero_eig=float(eigs[np.argmin(np.abs(eigs))]),
    )


def evaluate_pair(
    k_geom: PolytopeGeometry,
    l_sv: SupportVector,
    p: float,
    lam: float = 0.0,
    tol: float = 1e-9,
) -> LocalVerdict:
    """Combined verdict: scalar inequality for (K, L) plus NSD of Psi at K.

    The scalar side passes when lhs <= tol * n(n-p) V(L,K[n-1])^2 (the
    natural scale of the subtracted square); both sides must pass.
    """
    lhs = local_lhs(k_geom, l_sv, p)
    v1 = mixed_volume_1(l_sv, k_geom)
    n = k_geom.dim
    scale = n * (n - p) * v1 * v1
    nsd = check_nsd(psi_form(k_geom, p, lam), tol)
    return LocalVerdict(
        lhs=lhs,
        max_eig=nsd.max_eig,
        kernel_residual=nsd.kernel_residual,
        passed=bool(lhs <= tol * scale) and nsd.passed,
        p=float(p),
        lam=float(lam),
        tol=float(tol),
        near_zero_eig=nsd.near_zero_eig,
    )


# -- plane-only Bonnesen route -----------------------------------------------

def relative_radii(k_geom: PolytopeGeometry, l_geom: PolytopeGeometry):
    """(r, R): largest r with rK inside L, smallest R with L inside RK.

    Exact for bodies expressed over one shared normal list, because the
    list contains every facet normal of both bodies, and support-number
    domination on a body's facet normals characterizes containment.
    """
    require_same_normals(k_geom.source, l_geom.source)
    ratios = l_geom.support_numbers / k_geom.support_numbers
    return float(np.min(ratios)), float(np.max(ratios))


def bonnesen_2d(k_geom: PolytopeGeometry, l_geom: PolytopeGeometry, t: float) -> float:
    """vol(L) - 2t V(K,L) + t^2 vol(K); nonpositive on [r, R] in the plane."""
    if k_geom.dim != 2:
        raise BadParameter("the Bonnesen route is plane-only (dim 2)")
    r, big_r = relative_radii(k_geom, l_geom)
    slack = 1e-12 * max(1.0, big_r)
    if not (r - slack <= t <= big_r + slack):
        raise BadParameter(
            f"t = {t:.17g} outside the admissible range [{r:.17g}, {big_r:.17g}]")
    v1 = float(np.dot(l_geom.support_numbers, k_geom.facet_measures)) / 2.0
    return l_geom.volume - 2.0 * t * v1 + t * t * k_geom.volume


def local_2d_via_bonnesen(k_geom: PolytopeGeometry, l_sv: SupportVector) -> float:
    """Second route to local_lhs(K, L, 0) in the plane.

    2 vol(K) vol(L) - 4 V(K,L)^2 + vol(K) * integral(h_L^2/h_K dS_K),
    with vol(L) from a direct enumeration of L instead of the Gamma
    quadratic form. Matches local_lhs to ~1e-10 relative when L's
    heights are true support numbers (redundant heights would feed the
    integral and V(K,L) but not vol(L), and the routes then measure
    different things).
    """
    if k_geom.dim != 2:
        raise BadParameter("the Bonnesen route is plane-only (dim 2)")
    require_same_normals(k_geom.source, l_sv)
    if not k_geom.nonempty.all():
        empty = np.flatnonzero(~k_geom.nonempty)
        raise EmptyFacet(
            f"local form needs all facets of K nonempty (empty: {empty.tolist()})")
    vol_l = enumerate_geometry(l_sv).volume
    v1 = mixed_volume_1(l_sv, k_geom)
    wint = weighted_integral(l_sv, k_geom)
    return 2.0 * k_geom.volume * vol_l - 4.0 * v1 * v1 + k_geom.volume * wint
