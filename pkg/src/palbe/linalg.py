"""Dense complex linear-algebra kernel.

Small-matrix routines every other module builds on: spectral norm, SVD,
Moore-Penrose pseudoinverse, unitary completion of a unit vector,
determinants and scalar polynomial roots.  SVD, pseudoinverse and
determinant are backed by LAPACK through numpy.linalg; the unitary
completion (single Householder reflector) and the simultaneous
Aberth-Ehrlich root iteration are implemented here because their
behaviour is part of the contract.

All functions are pure; inputs are never mutated.
"""

from dataclasses import dataclass

import numpy as np

from .errors import RootFindingError, ValidationError

__all__ = [
    "SvdResult",
    "svd",
    "spectral_norm",
    "frobenius_norm",
    "pseudoinverse",
    "unitary_completion",
    "determinant",
    "scalar_poly_roots",
]


def _as_matrix(a, name="matrix"):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.size == 0:
        raise ValidationError(f"{name} must be a nonempty 2-d array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} has non-finite entries")
    return a


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD ``A = U @ diag(singular_values) @ V.conj().T``."""

    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray

    def reconstruct(self):
        return (self.U * self.singular_values) @ self.V.conj().T


def svd(a):
    """Thin singular value decomposition of a complex matrix."""
    a = _as_matrix(a)
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    return SvdResult(U=u, singular_values=s, V=vh.conj().T)


def spectral_norm(a):
    """Largest singular value of ``a``."""
    a = _as_matrix(a)
    return float(np.linalg.svd(a, compute_uv=False)[0])


def frobenius_norm(a):
    return float(np.linalg.norm(np.asarray(a)))


def pseudoinverse(a, tol=None):
    """Moore-Penrose pseudoinverse.

    Singular values below ``tol * sigma_max`` are treated as zero.  The
    default ``tol`` is ``max(rows, cols) * machine_epsilon``, the standard
    rank decision for possibly rank-deficient blocks.
    """
    a = _as_matrix(a)
    if tol is None:
        tol = max(a.shape) * np.finfo(float).eps
    if tol < 0:
        raise ValidationError("pseudoinverse tolerance must be >= 0")
    res = svd(a)
    s = res.singular_values
    cutoff = tol * (s[0] if s.size else 0.0)
    inv = np.where(s > cutoff, 1.0 / np.where(s > cutoff, s, 1.0), 0.0)
    return (res.V * inv) @ res.U.conj().T


def unitary_completion(x):
    """Complete a unit vector ``x`` to a unitary matrix ``[x, Q1]``.

    Returns the n x (n-1) isometry ``Q1`` with ``Q1.conj().T @ x = 0``,
    built from one Householder reflector mapping ``x`` to a multiple of
    the first basis vector.  For n = 1 the completion is the empty 1 x 0
    matrix.
    """
    x = np.asarray(x, dtype=complex).reshape(-1)
    n = x.size
    if n == 0 or not np.all(np.isfinite(x)):
        raise ValidationError("x must be a nonempty finite vector")
    nrm = np.linalg.norm(x)
    if abs(nrm - 1.0) > 1e-12:
        raise ValidationError(f"x must have unit 2-norm, got {nrm!r}")
    if n == 1:
        return np.zeros((1, 0), dtype=complex)
    alpha = x[0] / abs(x[0]) if abs(x[0]) > 0 else 1.0
    u = x.copy()
    u[0] += alpha
    h = np.eye(n, dtype=complex) - 2.0 * np.outer(u, u.conj()) / np.vdot(u, u).real
    # h @ x = -alpha * e1, so the remaining columns of h are orthogonal to x.
    return h[:, 1:]


def determinant(a):
    """Determinant via pivoted elimination (LAPACK LU)."""
    a = _as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValidationError("determinant requires a square matrix")
    return complex(np.linalg.det(a))


def _horner_with_derivative(coeffs, z):
    p = coeffs[-1]
    dp = 0.0 + 0.0j
    for c in coeffs[-2::-1]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def scalar_poly_roots(coeffs, tol=1e-8, max_iter=500):
    """All roots of ``sum_k coeffs[k] z**k`` by Aberth-Ehrlich iteration.

    Parameters
    ----------
    coeffs : ascending coefficient list ``[c_0, ..., c_d]``
    tol : residual certificate factor; every returned root satisfies
        ``|p(root)| <= tol * max|c| * (1 + |root|)**d``
    max_iter : iteration cap (default 500)

    Exact zero low-order coefficients are deflated to roots at 0.  A
    leading coefficient with ``|c_d| <= 1e-12 * max|c|`` is rejected.
    Raises :class:`RootFindingError` with partial results if the residual
    certificate is not met after ``max_iter`` sweeps.
    """
    c = np.asarray(coeffs, dtype=complex).reshape(-1)
    if c.size == 0 or not np.all(np.isfinite(c)):
        raise ValidationError("coefficients must be a nonempty finite list")
    scale = np.max(np.abs(c))
    if scale == 0.0:
        raise ValidationError("zero polynomial has no well-defined roots")
    if abs(c[-1]) <= 1e-12 * scale:
        raise ValidationError("leading coefficient is (numerically) zero")

    zeros_at_origin = 0
    while abs(c[0]) == 0.0 and c.size > 1:
        c = c[1:]
        zeros_at_origin += 1
    d = c.size - 1
    if d == 0:
        return np.zeros(zeros_at_origin, dtype=complex)

    radius = 1.0 + np.max(np.abs(c[:-1] / c[-1]))
    k = np.arange(d)
    theta = 2.0 * np.pi * k / d + 0.7391 / d + 0.11 * (k % 3) / d
    z = radius * np.exp(1j * theta)

    monic = c / c[-1]
    for _ in range(max_iter):
        p = np.array([_horner_with_derivative(monic, zi)[0] for zi in z])
        dp = np.array([_horner_with_derivative(monic, zi)[1] for zi in z])
        dp = np.where(np.abs(dp) < 1e-300, 1e-300, dp)
        w = p / dp
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv_sum = np.sum(1.0 / diff, axis=1) - 1.0  # undo the diagonal fill
        step = w / (1.0 - w * inv_sum)
        z = z - step
        if np.all(np.abs(step) <= 1e-14 * (1.0 + np.abs(z))):
            break

    residual = np.abs([_horner_with_derivative(c, zi)[0] for zi in z])
    bound = tol * scale * (1.0 + np.abs(z)) ** d
    roots = np.concatenate([np.zeros(zeros_at_origin, dtype=complex), z])
    if np.any(residual > bound):
        raise RootFindingError(
            f"root residuals {residual.max():.3e} exceed certificate after {max_iter} sweeps",
            partial_roots=roots,
        )
    return roots
