"""Ellipticity and p-ellipticity constants of complex coefficient matrices.

For a d x d complex matrix A the three constants are

* ``lambda_of(A)``: the largest lam with Re<A xi, xi> >= lam |xi|^2, i.e. the
  smallest eigenvalue of the Hermitian part of A;
* ``capital_lambda_of(A)``: the smallest Lam with |<A xi, eta>| <= Lam |xi||eta|,
  i.e. the spectral norm of A;
* ``delta_p(A, p)``: min over unit xi of Re<A xi, xi + |1-2/p| conj(xi)>.

The delta_p minimum is computed exactly: writing xi = u + iv turns the
objective into a real quadratic form on R^(2d), whose symmetric representative
matrix is assembled in closed form; the sphere minimum is its smallest
eigenvalue.  A Monte-Carlo sphere-sampling oracle (with a derivative-free
polish that only ever evaluates the objective) ships alongside as the
independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class NotEllipticError(ValueError):
    """Raised when an operation requires lambda_of(A) > 0 and it fails."""


def _check_square(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    return A


def lambda_of(A) -> float:
    """Smallest eigenvalue of the Hermitian part (A + A*)/2."""
    A = _check_square(A)
    H = 0.5 * (A + A.conj().T)
    return float(np.linalg.eigvalsh(H)[0])


def capital_lambda_of(A) -> float:
    """Spectral norm of A, the smallest valid boundedness constant."""
    A = _check_square(A)
    return float(np.linalg.norm(A, 2))


def _mu_of(p: float) -> float:
    if p <= 1 or not np.isfinite(p):
        raise ValueError(f"p must lie in (1, inf), got {p}")
    return abs(1.0 - 2.0 / p)


def delta_p_form_matrix(A, mu: float) -> np.ndarray:
    """Symmetric 2d x 2d representative of xi -> Re<A xi, xi + mu conj(xi)>.

    With xi = u + iv the objective splits as Re(xi* A xi) + mu Re(xi^T A xi);
    collecting terms gives the block matrix below.
    """
    A = _check_square(A)
    Ar, Ai = A.real, A.imag
    sym = lambda X: 0.5 * (X + X.T)
    Muu = (1.0 + mu) * sym(Ar)
    Mvv = (1.0 - mu) * sym(Ar)
    Muv = 0.5 * (-(1.0 + mu) * Ai + (1.0 - mu) * Ai.T)
    return np.block([[Muu, Muv], [Muv.T, Mvv]])


def delta_p(A, p: float) -> float:
    """p-ellipticity constant of A; positive iff A is p-elliptic."""
    mu = _mu_of(p)
    M = delta_p_form_matrix(A, mu)
    return float(np.linalg.eigvalsh(M)[0])


def _delta_min_at_mu(A: np.ndarray, mu: float) -> float:
    return float(np.linalg.eigvalsh(delta_p_form_matrix(A, mu))[0])


def mu_star(A, tol: float = 1e-8) -> float:
    """Largest mu in [0, 1] with positive form minimum, by bisection.

    mu -> lambda_min(form matrix) is a minimum of affine functions of mu,
    hence concave, so its positivity set is an interval [0, mu*) and
    bisection is valid.  Returns 1.0 when the form stays positive on [0, 1).
    """
    A = _check_square(A)
    if _delta_min_at_mu(A, 0.0) <= 0:
        raise NotEllipticError("matrix is not elliptic (lambda_of <= 0)")
    hi_probe = 1.0 - 1e-12
    if _delta_min_at_mu(A, hi_probe) > 0:
        return 1.0
    lo, hi = 0.0, hi_probe
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _delta_min_at_mu(A, mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def p_ellipticity_range(A, tol: float = 1e-8) -> tuple[float, float]:
    """Open interval (p_min, p_max) on which A is p-elliptic.

    p_max = 2/(1 - mu*) and p_min is its conjugate exponent; real elliptic
    matrices give (1, inf).
    """
    ms = mu_star(A, tol)
    if ms >= 1.0:
        return (1.0, math.inf)
    p_max = 2.0 / (1.0 - ms)
    p_min = 2.0 / (1.0 + ms)
    return (p_min, p_max)


@dataclass(frozen=True)
class EllipticityReport:
    lam: float
    capital_lambda: float
    delta_p: dict
    p_range: tuple[float, float]


def ellipticity_report(A, p_samples=(1.2, 1.5, 2.0, 3.0, 6.0)) -> EllipticityReport:
    A = _check_square(A)
    return EllipticityReport(
        lam=lambda_of(A),
        capital_lambda=capital_lambda_of(A),
        delta_p={float(p): delta_p(A, p) for p in p_samples},
        p_range=p_ellipticity_range(A),
    )


@dataclass(frozen=True)
class SobolevExponents:
    """Exponent arithmetic for the Sobolev-improved boundedness range, d >= 3."""

    d: int
    p: float
    two_star: float
    p_upper: float
    p_lower: float


def sobolev_exponents(d: int, p: float) -> SobolevExponents:
    if d < 3:
        raise ValueError(f"dimension must be >= 3, got {d}")
    if p < 2:
        raise ValueError(f"p must be >= 2, got {p}")
    two_star = 2.0 * d / (d - 2.0)
    p_upper = p * d / (d - 2.0)
    p_lower = p_upper / (p_upper - 1.0)
    return SobolevExponents(d=d, p=float(p), two_star=two_star, p_upper=p_upper, p_lower=p_lower)


# ---------------------------------------------------------------------------
# Sampling oracles.  These never touch the form-matrix reduction above: the
# objective is evaluated from A by complex arithmetic, minima are located by
# sphere sampling, and the polish step builds matrix-vector products out of
# objective evaluations alone (polarization of the quadratic form).
# ---------------------------------------------------------------------------


def _objective_batch(A: np.ndarray, mu: float, X: np.ndarray) -> np.ndarray:
    """Re<A xi, xi> + mu Re<A xi, conj(xi)> for rows xi of X (complex, unit)."""
    Y = X @ A.T
    t1 = np.einsum("ij,ij->i", Y, X.conj()).real
    t2 = np.einsum("ij,ij->i", Y, X).real
    return t1 + mu * t2


def _objective_real(A: np.ndarray, mu: float, x: np.ndarray) -> float:
    d = A.shape[0]
    xi = x[:d] + 1j * x[d:]
    y = A @ xi
    return float((y @ xi.conj()).real + mu * (y @ xi).real)


def sphere_min_oracle(
    A,
    p: float | None,
    n_samples: int = 1_000_000,
    seed: int = 0,
    n_polish: int = 4000,
) -> float:
    """Independent minimum of the p-ellipticity objective over the unit sphere.

    Draws ``n_samples`` uniform points on the complex sphere and keeps the
    best, then polishes by power iteration on (sigma I - M) where the action
    of the form matrix M is reconstructed from objective evaluations by
    polarization.  ``p=None`` (or p=2) gives the plain ellipticity constant.
    """
    A = _check_square(A)
    mu = 0.0 if p is None else _mu_of(p)
    d = A.shape[0]
    rng = np.random.default_rng(seed)

    X = rng.standard_normal((n_samples, d)) + 1j * rng.standard_normal((n_samples, d))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    vals = _objective_batch(A, mu, X)
    i0 = int(np.argmin(vals))
    sigma = 4.0 * float(np.abs(vals).max()) + 1.0

    n = 2 * d
    x = np.concatenate([X[i0].real, X[i0].imag])
    x /= np.linalg.norm(x)
    q = lambda v: _objective_real(A, mu, v)
    basis_vals = np.array([q(e) for e in np.eye(n)])

    def matvec(v):
        qv = q(v)
        return np.array(
            [0.5 * (q(v + np.eye(n)[j]) - qv - basis_vals[j]) for j in range(n)]
        )

    for _ in range(n_polish):
        y = sigma * x - matvec(x)
        ny = np.linalg.norm(y)
        if ny == 0:
            break
        x = y / ny
    return q(x)


def sphere_max_pairing_oracle(
    A,
    n_samples: int = 1_000_000,
    seed: int = 0,
    n_polish: int = 2000,
) -> float:
    """Independent maximum of |<A xi, eta>| over unit pairs.

    For each sampled xi the maximizing eta is A xi normalized, so the pair
    maximum equals max |A xi| over the sphere; that square is again a
    quadratic form, polished by power iteration with polarized matvecs.
    """
    A = _check_square(A)
    d = A.shape[0]
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n_samples, d)) + 1j * rng.standard_normal((n_samples, d))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    vals = np.linalg.norm(X @ A.T, axis=1)
    i0 = int(np.argmax(vals))

    n = 2 * d

    def q(v):
        xi = v[:d] + 1j * v[d:]
        y = A @ xi
        return float((y @ y.conj()).real)

    x = np.concatenate([X[i0].real, X[i0].imag])
    x /= np.linalg.norm(x)
    basis_vals = np.array([q(e) for e in np.eye(n)])

    def matvec(v):
        qv = q(v)
        return np.array(
            [0.5 * (q(v + np.eye(n)[j]) - qv - basis_vals[j]) for j in range(n)]
        )

    for _ in range(n_polish):
        y = matvec(x)
        ny = np.linalg.norm(y)
        if ny == 0:
            break
        x = y / ny
    return math.sqrt(q(x))


def mu_scan_oracle(A, step: float = 1e-4) -> float:
    """Dense scan locating the sign change of mu -> form minimum."""
    A = _check_square(A)
    mus = np.arange(0.0, 1.0, step)
    prev = _delta_min_at_mu(A, 0.0)
    if prev <= 0:
        raise NotEllipticError("matrix is not elliptic")
    for m in mus[1:]:
        cur = _delta_min_at_mu(A, float(m))
        if cur <= 0:
            return float(m)
        prev = cur
    return 1.0
