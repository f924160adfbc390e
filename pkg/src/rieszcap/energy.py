"""Discrete Riesz energies, tangential gradients, and the continuous-sphere
energy constants with their analytic continuations.

Conventions fixed here once:
  * Energies run over ordered pairs j != k (each unordered pair twice).
  * s = 0 means the logarithmic kernel -log|x - y|.
  * Reductions: each kernel row is summed by numpy's pairwise tree, the row
    totals are combined with Neumaier compensation (single-chunk policy,
    bitwise deterministic for fixed N).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CoincidentPointsError, DomainError, PoleError, UnsupportedDimension
from .pointsets import PointSet
from .special_functions import (
    _check_dim,
    _require_finite,
    _sinpi,
    hex_lattice_zeta,
    riemann_zeta,
    sphere_surface_area,
)

COINCIDENCE_TOL = 1e-14     # below float distance resolution on the unit sphere
_BLOCK = 2048               # row-block height for large-N memory control


def neumaier_sum(values) -> float:
    """Compensated sequential sum; exact to one rounding of the true total."""
    total = 0.0
    comp = 0.0
    for v in np.asarray(values, dtype=np.float64).ravel():
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
    return total + comp


def _distance_matrix(X: np.ndarray) -> np.ndarray:
    # Exact quadratic form |x|^2 + |y|^2 - 2<x,y>; the direct difference
    # tensor is used at small N where near-pair cancellation matters most.
    n = X.shape[0]
    if n <= 1500:
        diff = X[:, None, :] - X[None, :, :]
        r2 = np.einsum("ijk,ijk->ij", diff, diff)
    else:
        sq = np.einsum("ij,ij->i", X, X)
        r2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.fill_diagonal(r2, 0.0)
    return np.sqrt(np.maximum(r2, 0.0))


def _check_separation(r: np.ndarray, s: float) -> None:
    if s < 0.0:
        return  # r = 0 contributes 0^(-s) = 0, legal
    n = r.shape[0]
    if n == 1:
        return
    masked = r + np.diag(np.full(n, np.inf))
    m = float(masked.min())
    if m < COINCIDENCE_TOL:
        raise CoincidentPointsError(
            f"minimal pair distance {m:.3g} below {COINCIDENCE_TOL:g} with s={s}"
        )


def _kernel_rows(r: np.ndarray, s: float) -> np.ndarray:
    # Row sums of the kernel matrix with a zero diagonal.
    n = r.shape[0]
    if s == 0.0:
        k = r + np.eye(n)  # diagonal -> log 1 = 0
        return np.sum(-np.log(k), axis=1)
    if s > 0.0:
        k = np.power(r + np.eye(n), -s)  # diagonal exact 1, zeroed below
    else:
        k = np.power(r, -s)  # r = 0 legitimately contributes 0
    np.fill_diagonal(k, 0.0)
    return np.sum(k, axis=1)


def riesz_energy(X: PointSet, s: float) -> float:
    """Riesz s-energy over ordered pairs; -log kernel at s=0.

    O(N^2) time, O(N * block) memory; deterministic reduction.
    """
    s = _require_finite("s", s)
    pts = X.points
    n = pts.shape[0]
    if n == 1:
        return 0.0
    if n <= _BLOCK:
        r = _distance_matrix(pts)
        _check_separation(r, s)
        return neumaier_sum(_kernel_rows(r, s))
    # blocked rows: each row sum is still the full-row numpy pairwise sum
    sq = np.einsum("ij,ij->i", pts, pts)
    rows = np.empty(n)
    for lo in range(0, n, _BLOCK):
        hi = min(lo + _BLOCK, n)
        r2 = sq[lo:hi, None] + sq[None, :] - 2.0 * (pts[lo:hi] @ pts.T)
        r2[np.arange(lo, hi) - lo, np.arange(lo, hi)] = 0.0
        r = np.sqrt(np.maximum(r2, 0.0))
        idx = np.arange(lo, hi)
        r_off = r.copy()
        r_off[idx - lo, idx] = np.inf
        if s >= 0.0 and float(r_off.min()) < COINCIDENCE_TOL:
            raise CoincidentPointsError(
                f"pair distance below {COINCIDENCE_TOL:g} with s={s}"
            )
        if s == 0.0:
            r[idx - lo, idx] = 1.0
            rows[lo:hi] = np.sum(-np.log(r), axis=1)
        else:
            if s > 0.0:
                r[idx - lo, idx] = 1.0
            k = np.power(r, -s)
            k[idx - lo, idx] = 0.0
            rows[lo:hi] = np.sum(k, axis=1)
    return neumaier_sum(rows)


def _energy_and_gradient_arrays(pts: np.ndarray, s: float):
    # Shared distance matrix for the optimizer's fused evaluation.
    r = _distance_matrix(pts)
    _check_separation(r, s)
    n = pts.shape[0]
    energy = neumaier_sum(_kernel_rows(r, s))
    safe = r + np.eye(n)
    if s == 0.0:
        w = -1.0 / (safe * safe)
    else:
        w = -s * np.power(safe, -s - 2.0)
    np.fill_diagonal(w, 0.0)
    # d/dx_j of the ordered-pair sum: each unordered pair appears twice,
    # hence the factor 2 on top of sum_k w_jk (x_j - x_k).
    grad = 2.0 * (w.sum(axis=1)[:, None] * pts - w @ pts)
    grad -= np.einsum("ij,ij->i", grad, pts)[:, None] * pts
    return energy, grad


def riesz_energy_and_gradient(X: PointSet, s: float) -> tuple[float, np.ndarray]:
    """Energy and tangential gradient from one distance matrix."""
    s = _require_finite("s", s)
    if X.n == 1:
        return 0.0, np.zeros_like(X.points)
    return _energy_and_gradient_arrays(X.points, s)


def riesz_gradient(X: PointSet, s: float) -> np.ndarray:
    """Tangential gradient of the ordered-pair energy, one row per point.

    Every row g_j satisfies <g_j, x_j> = 0 within 1e-12 relative to |g_j|
    (float dot products cannot certify tangency below eps * |g_j|).
    """
    return riesz_energy_and_gradient(X, s)[1]


# ----------------------------------------------------------------------------
# continuous energy of the sphere

def _is_pole_of_V(d: int, s: float) -> bool:
    # Gamma((d-s)/2) poles at s = d + 2k, k >= 0; for even d those with
    # s >= 2d are cancelled by Gamma(d - s/2) poles in the denominator.
    if s < d or s != math.floor(s):
        return False
    if (s - d) % 2 != 0:
        return False
    if d % 2 == 0:
        return s <= 2 * d - 2
    return True


def _log_abs_gamma(x: float) -> tuple[float, float]:
    if x > 0.0:
        return math.lgamma(x), 1.0
    # x < 0, non-integer: lgamma gives log|Gamma|; sign follows sin(pi x)
    # because Gamma(x) Gamma(1-x) = pi / sin(pi x) with Gamma(1-x) > 0.
    return math.lgamma(x), math.copysign(1.0, _sinpi(x))


def _gamma_ratio(a: float, b: float) -> float:
    # Gamma(a)/Gamma(b) continued across nonpositive arguments.  When both
    # hit nonpositive integers the limit is taken along the s-line, where
    # both arguments move at the same rate: (-1)^(p-q) q!/p!.
    a_int = a <= 0.0 and a == math.floor(a)
    b_int = b <= 0.0 and b == math.floor(b)
    if a_int and b_int:
        p, q = int(-a), int(-b)
        return (-1.0) ** (p - q) * math.factorial(q) / math.factorial(p)
    if b_int:
        return 0.0  # denominator pole only
    if a_int:
        raise PoleError(f"gamma ratio pole at numerator argument {a}")
    la, sa = _log_abs_gamma(a)
    lb, sb = _log_abs_gamma(b)
    return sa * sb * math.exp(la - lb)


def continuous_energy(d: int, s: float) -> float:
    """V_s(S^d) = 2^(d-s-1) Gamma((d+1)/2) Gamma((d-s)/2) / (sqrt pi Gamma(d-s/2)),
    continued analytically outside the poles (even d: s in {d,...,2d-2};
    odd d: s in {d, d+2, ...}).  The logarithmic case s=0 has no value here.
    """
    d = _check_dim(d)
    s = _require_finite("s", s)
    if s == 0.0:
        raise DomainError("s=0 logarithmic energy has no continuous value here")
    if _is_pole_of_V(d, s):
        raise PoleError(f"V_s(S^{d}) pole at s={s}")
    ratio = _gamma_ratio((d - s) / 2.0, d - s / 2.0)
    if ratio == 0.0:
        return 0.0
    log_lead = (
        (d - s - 1.0) * math.log(2.0)
        + math.lgamma((d + 1) / 2.0)
        - 0.5 * math.log(math.pi)
    )
    return math.copysign(1.0, ratio) * math.exp(log_lead + math.log(abs(ratio)))


def ball_sphere_ratio(d: int) -> float:
    """Volume of the unit d-ball over surface of S^d: Gamma((d+1)/2)/(d sqrt(pi) Gamma(d/2))."""
    d = _check_dim(d)
    return math.exp(
        math.lgamma((d + 1) / 2.0) - math.lgamma(d / 2.0)
    ) / (d * math.sqrt(math.pi))


def boundary_leading_term(d: int, n: float) -> float:
    """Leading term ratio(d) N^2 log N of the boundary-case s=d energy.

    N is integer in practice; real N >= 2 accepted for formal checks.
    """
    d = _check_dim(d)
    if d < 2:
        raise DomainError(f"boundary leading term needs d >= 2, got {d}")
    n = _require_finite("n", float(n))
    if n < 2.0:
        raise DomainError(f"N must be >= 2, got {n}")
    return ball_sphere_ratio(d) * n * n * math.log(n)


def conjectured_C(d: int, s: float) -> float:
    """Conjectured second-order energy coefficient C_{s,d}.

    d=1: 2 zeta(s) (pole at s=1); d=2: (sqrt3/2)^(s/2) zeta_hex(s) (pole at
    s=2), continued below the abscissa.  No closed form is known elsewhere.
    """
    d = _check_dim(d)
    s = _require_finite("s", s)
    if d == 1:
        if s == 1.0:
            raise PoleError("C_{s,1} pole at s=1")
        return 2.0 * riemann_zeta(s)
    if d == 2:
        if s == 2.0:
            raise PoleError("C_{s,2} pole at s=2")
        return (math.sqrt(3.0) / 2.0) ** (s / 2.0) * hex_lattice_zeta(s)
    raise UnsupportedDimension(f"no conjectured C for d={d}")


# ----------------------------------------------------------------------------
# report

@dataclass(frozen=True)
class EnergyReport:
    s: float
    d: int
    N: int
    energy: float
    continuous_prediction: float | None
    residual_normalized: float | None

    def to_json(self) -> dict:
        out = {"s": self.s, "d": self.d, "N": self.N, "energy": self.energy}
        if self.continuous_prediction is not None:
            out["continuous_prediction"] = self.continuous_prediction
            out["residual_normalized"] = self.residual_normalized
        return out


def energy_report(X: PointSet, s: float) -> EnergyReport:
    """Energy with the continuous prediction V_s N^2 attached on the
    potential-theoretic window -2 < s < d, s != 0, and the remainder scaled
    by N^(1+s/d)."""
    s = _require_finite("s", s)
    e = riesz_energy(X, s)
    pred = None
    resid = None
    if -2.0 < s < X.d and s != 0.0:
        v = continuous_energy(X.d, s)
        pred = v * X.n * X.n
        resid = (e - pred) / X.n ** (1.0 + s / X.d)
    return EnergyReport(
        s=s, d=X.d, N=X.n, energy=e,
        continuous_prediction=pred, residual_normalized=resid,
    )
