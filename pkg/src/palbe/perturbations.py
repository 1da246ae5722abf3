"""Construction of structured perturbations realizing the backward errors.

Three layers:

* an existence construction that interpolates any approximate eigenpair
  inside a structure class (not norm-minimal),
* the minimal constructions for both aggregate norms, assembled from
  rank-one/rank-two kernels; the spectral versions complete each
  coefficient block with the norm-preserving dilation (contraction
  parameter Z, default 0),
* the dilation itself (:func:`dkw_complete`) with its closed-form
  optimal block.

Every builder returns a :class:`StructuredPerturbation` carrying a norm
certificate and the constraint/structure residuals, so results can be
re-verified independently of the formulas that produced them.
"""

from dataclasses import dataclass

import numpy as np

from .backward_error import (
    DEFAULT_BRANCH_TOL,
    eta_structured_H,
    eta_structured_T,
    h_rhat,
    projections,
    t_coefficients,
)
from .errors import InconsistencyError, ValidationError
from .linalg import spectral_norm, unitary_completion
from .polynomial import (
    MatrixPolynomial,
    Structure,
    ascending_powers,
    normalize_eigenvector,
    poly_to_json,
    power_norm_sq,
    require_structure,
    residual,
    structure_residual,
)

__all__ = [
    "StructuredPerturbation",
    "existence_perturbation",
    "DkwBlocks",
    "dkw_complete",
    "minimal_perturbation_T",
    "minimal_perturbation_H",
    "minimal_perturbation",
    "solution_family_offset",
    "perturbation_to_json",
]

_DEGENERATE_REL = 1e-14


@dataclass(frozen=True)
class StructuredPerturbation:
    """A structured perturbation with verification certificate."""

    delta: MatrixPolynomial
    structure: Structure
    norm_used: str
    certified_norm: float
    constraint_residual: float
    structure_residual: float


def _certify(coeffs, p, lam, x, structure, norm):
    delta = MatrixPolynomial(coeffs, structure=structure)
    moved = p.evaluate(lam) @ x + delta.evaluate(lam) @ x
    return StructuredPerturbation(
        delta=delta,
        structure=structure,
        norm_used=norm,
        certified_norm=delta.poly_norm(norm),
        constraint_residual=float(np.linalg.norm(moved)),
        structure_residual=structure_residual(delta, structure),
    )


def existence_perturbation(p, lam, x, structure=None):
    """Interpolating structured perturbation (not minimal).

    Built coefficient-wise from the residual and the complement projector
    of x; satisfies ``(P + dP)(lam) x = 0`` exactly and lies in the class
    of P by the reflection ``dA_{m-j} = sign * adjoint(dA_j)``.
    """
    s = require_structure(p, structure)
    x = normalize_eigenvector(x)
    r = residual(p, lam, x)
    m, n = p.degree, p.size
    eps = s.sign
    l2 = power_norm_sq(lam, m)
    cpows = np.conj(ascending_powers(lam, m))
    pows = ascending_powers(lam, m)
    coeffs = np.zeros((m + 1, n, n), dtype=complex)
    if s.adjoint == "T":
        t = complex(x @ r)
        xbar = np.conj(x)
        px_t_r = r - t * xbar
        for j in range(m // 2 + 1):
            rayleigh = complex(x @ p.coeffs[j] @ x)
            block = (
                -rayleigh * np.outer(xbar, xbar)
                + (cpows[j] * np.outer(px_t_r, xbar) + eps * cpows[m - j] * np.outer(xbar, px_t_r)) / l2
            )
            _place_t(coeffs, j, m, eps, block)
    else:
        t = complex(np.vdot(x, r))
        pxr = r - t * x
        for j in range(m // 2 + 1):
            rayleigh = complex(np.vdot(x, p.coeffs[j] @ x))
            block = (
                -rayleigh * np.outer(x, np.conj(x))
                + (cpows[j] * np.outer(pxr, np.conj(x)) + eps * pows[m - j] * np.outer(x, np.conj(pxr))) / l2
            )
            _place_h(coeffs, j, m, eps, block)
    return _certify(coeffs, p, lam, x, s, "F")


def _place_t(coeffs, j, m, eps, block):
    if j != m - j:
        coeffs[j] = block
        coeffs[m - j] = eps * block.T
    else:
        coeffs[j] = 0.5 * (block + eps * block.T)


def _place_h(coeffs, j, m, eps, block):
    if j != m - j:
        coeffs[j] = block
        coeffs[m - j] = eps * block.conj().T
    else:
        coeffs[j] = 0.5 * (block + eps * block.conj().T)


# -- norm-preserving dilation -------------------------------------------------


@dataclass(frozen=True)
class DkwBlocks:
    """Blocks of a two-by-two completion with spectral norm mu."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    K: np.ndarray
    L: np.ndarray
    Z: np.ndarray
    mu: float

    def completion(self):
        return np.block([[self.A, self.C], [self.B, self.D]])


def _psd_inv_sqrt(mat, scale):
    vals, vecs = np.linalg.eigh(mat)
    vals = np.clip(vals, 0.0, None)
    cut = 1e-13 * max(scale, 1e-300)
    inv = np.where(vals > cut, 1.0 / np.sqrt(np.where(vals > cut, vals, 1.0)), 0.0)
    return (vecs * inv) @ vecs.conj().T


def _psd_sqrt(mat):
    vals, vecs = np.linalg.eigh(mat)
    vals = np.sqrt(np.clip(vals, 0.0, None))
    return (vecs * vals) @ vecs.conj().T


def dkw_complete(a, b, c, z=None):
    """Minimal-spectral-norm completion of ``[[A, C], [B, D]]``.

    mu is the larger of the column-block and row-block norms; every
    contraction Z parameterizes one completion achieving exactly mu.
    Rank-deficient corners are handled by pseudoinverse square roots
    (the Z directions they suppress are the continuous limit).
    """
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    b = np.atleast_2d(np.asarray(b, dtype=complex))
    c = np.atleast_2d(np.asarray(c, dtype=complex))
    if a.shape[1] != b.shape[1] or a.shape[0] != c.shape[0]:
        raise ValidationError("blocks A, B, C are not conformal")
    if z is None:
        z = np.zeros((b.shape[0], c.shape[1]), dtype=complex)
    else:
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        if z.shape != (b.shape[0], c.shape[1]):
            raise ValidationError(f"Z must have shape {(b.shape[0], c.shape[1])}")
        if spectral_norm(z) > 1.0 + 1e-12:
            raise ValidationError("Z must be a contraction (spectral norm <= 1)")
    mu = max(
        float(np.linalg.norm(np.vstack([a, b]), 2)),
        float(np.linalg.norm(np.hstack([a, c]), 2)),
    )
    if mu == 0.0:
        d = np.zeros((b.shape[0], c.shape[1]), dtype=complex)
        return DkwBlocks(a, b, c, d, np.zeros_like(b), np.zeros_like(c), z, 0.0)
    k = b @ _psd_inv_sqrt(mu**2 * np.eye(a.shape[1]) - a.conj().T @ a, mu**2)
    el = _psd_inv_sqrt(mu**2 * np.eye(a.shape[0]) - a @ a.conj().T, mu**2) @ c
    d = -k @ a.conj().T @ el
    if np.any(z):
        d = d + mu * _psd_sqrt(np.eye(k.shape[0]) - k @ k.conj().T) @ z @ _psd_sqrt(
            np.eye(el.shape[1]) - el.conj().T @ el
        )
    return DkwBlocks(A=a, B=b, C=c, D=d, K=k, L=el, Z=z, mu=mu)


# -- minimal perturbations ----------------------------------------------------


def _t_diag_coeffs(structure, m, lam, t, branch_tol):
    """Diagonal entries d_j (j = 0..m//2) of the minimal transpose-class
    perturbation, plus the forced-zero indicator."""
    cp = t_coefficients(structure, m, lam, norm="F", branch_tol=branch_tol)
    if cp.forced_zero_inner_product:
        return np.zeros(m // 2 + 1, dtype=complex), cp, None
    eps = structure.sign
    cpows = np.conj(ascending_powers(lam, m))
    pis_sq = projections(lam, m).norm_sq(eps)
    j = np.arange(m // 2 + 1)
    return (cpows[j] + eps * cpows[m - j]) * t / (2.0 * pis_sq), cp, pis_sq


def _spectral_correction_factor_t(lam, m, j, eps):
    """Division-free scalar of the spectral off-diagonal correction."""
    clam = np.conj(lam)
    if abs(lam) > 1.0:
        return clam ** (m - j) * abs(lam) ** (-2.0 * (m - 2 * j)) + eps * clam**j
    return clam ** (m - j) + eps * clam**j * abs(lam) ** (2.0 * (m - 2 * j))


def minimal_perturbation_T(p, lam, x, norm="F", z_contraction=None,
                           branch_tol=DEFAULT_BRANCH_TOL):
    """Minimal structured perturbation for the transpose classes.

    The Frobenius minimizer is unique; the spectral one keeps the same
    first row/column per coefficient and completes the complement block,
    either with the closed-form optimal completion (default) or the one
    selected by the (n-1) x (n-1) contraction ``z_contraction``.
    """
    s = require_structure(p)
    if s.adjoint != "T":
        raise ValidationError("minimal_perturbation_T needs a transpose-class polynomial")
    if norm not in ("F", "2"):
        raise ValidationError(f"norm must be 'F' or '2', got {norm!r}")
    x = normalize_eigenvector(x)
    r = residual(p, lam, x)
    m, n = p.degree, p.size
    eps = s.sign
    t = complex(x @ r)
    rn2 = float(np.vdot(r, r).real)
    y2 = max(rn2 - abs(t) ** 2, 0.0)
    degenerate = y2 <= _DEGENERATE_REL * rn2 if rn2 > 0 else True
    l2 = power_norm_sq(lam, m)
    cpows = np.conj(ascending_powers(lam, m))
    xbar = np.conj(x)
    px_t_r = r - t * xbar
    e_mat = np.outer(xbar, xbar)
    f_left = np.outer(px_t_r, xbar)
    f_right = np.outer(xbar, px_t_r)
    k_mat = np.outer(px_t_r, px_t_r)

    diag, cp, pis_sq = _t_diag_coeffs(s, m, lam, t, branch_tol)
    if cp.forced_zero_inner_product and abs(t) > 1e-8 * np.sqrt(rn2):
        raise InconsistencyError(
            f"structure forces x^T P(lambda) x = 0 on branch {cp.branch!r}, got {abs(t):.3e}"
        )

    q1 = unitary_completion(x) if (norm == "2" and z_contraction is not None) else None

    coeffs = np.zeros((m + 1, n, n), dtype=complex)
    for j in range(m // 2 + 1):
        block = diag[j] * e_mat + (cpows[j] * f_left + eps * cpows[m - j] * f_right) / l2
        if norm == "2" and not degenerate:
            if z_contraction is not None:
                block = block + _dkw_tail_t(
                    q1, r, lam, m, j, eps, diag[j], l2, z_contraction
                )
            elif abs(t) > 0.0 and pis_sq is not None:
                factor = _spectral_correction_factor_t(lam, m, j, eps)
                corr = -eps * factor * np.conj(t) / (2.0 * pis_sq * y2)
                block = block + corr * k_mat
        _place_t(coeffs, j, m, eps, block)
    cert = _certify(coeffs, p, lam, x, s, norm)
    return cert


def _dkw_tail_t(q1, r, lam, m, j, eps, d_j, l2, z):
    """Complement-block completion for one transpose-class coefficient."""
    y = q1.T @ r
    cpj = np.conj(lam) ** j
    cpm = np.conj(lam) ** (m - j)
    a = np.array([[d_j]])
    b = (cpj / l2) * y.reshape(-1, 1)
    c = eps * (cpm / l2) * y.reshape(1, -1)
    if j == m - j:
        z = 0.5 * (z + z.T) if eps == 1 else 0.5 * (z - z.T)
        nz = spectral_norm(z) if np.any(z) else 0.0
        if nz > 1.0:
            z = z / nz
    d = dkw_complete(a, b, c, z).D
    return np.conj(q1) @ d @ q1.conj().T


def minimal_perturbation_H(p, lam, x, norm="F", z_contraction=None,
                           branch_tol=DEFAULT_BRANCH_TOL):
    """Minimal structured perturbation for the conjugate-transpose classes.

    The anti-palindromic case is mapped through the isometry P -> iP and
    back (dP = -i dP_pal(iP)), which preserves both aggregate norms.
    """
    s = require_structure(p)
    if s.adjoint != "H":
        raise ValidationError("minimal_perturbation_H needs a conjugate-transpose-class polynomial")
    if norm not in ("F", "2"):
        raise ValidationError(f"norm must be 'F' or '2', got {norm!r}")
    if s.sign == -1:
        rotated = MatrixPolynomial(p.coeffs * 1j, structure=Structure("H", 1))
        inner = minimal_perturbation_H(
            rotated, lam, x, norm=norm, z_contraction=z_contraction, branch_tol=branch_tol
        )
        coeffs = -1j * inner.delta.coeffs
        return _certify(coeffs, p, lam, x, s, norm)

    x = normalize_eigenvector(x)
    r = residual(p, lam, x)
    m, n = p.degree, p.size
    t = complex(np.vdot(x, r))
    rn2 = float(np.vdot(r, r).real)
    y2 = max(rn2 - abs(t) ** 2, 0.0)
    degenerate = y2 <= _DEGENERATE_REL * rn2 if rn2 > 0 else True
    l2 = power_norm_sq(lam, m)
    pows = ascending_powers(lam, m)
    cpows = np.conj(pows)
    pxr = r - t * x
    e_mat = np.outer(x, np.conj(x))
    f_left = np.outer(pxr, np.conj(x))
    f_right = np.outer(x, np.conj(pxr))
    k_mat = np.outer(pxr, np.conj(pxr))

    on_circle = abs(abs(lam) - 1.0) <= branch_tol
    if on_circle:
        drift = abs(np.conj(t) - np.conj(lam) ** m * t)
        if drift > 1e-8 * np.sqrt(rn2) and rn2 > 0:
            raise InconsistencyError(
                f"unit-circle consistency conj(x^H r) = conj(lam)^m x^H r violated ({drift:.3e})"
            )
        diag = cpows[: m // 2 + 1] * t / l2
    else:
        diag = np.array(h_rhat(lam, m, t, eps=1, branch_tol=branch_tol).diagonal()[: m // 2 + 1])

    q1 = unitary_completion(x) if (norm == "2" and z_contraction is not None) else None

    coeffs = np.zeros((m + 1, n, n), dtype=complex)
    for j in range(m // 2 + 1):
        block = diag[j] * e_mat + (cpows[j] * f_left + pows[m - j] * f_right) / l2
        if norm == "2" and not degenerate:
            if z_contraction is not None:
                block = block + _dkw_tail_h(q1, r, lam, m, j, diag[j], l2, z_contraction)
            else:
                if on_circle:
                    corr = -np.conj(t) * pows[m - j] / l2
                elif abs(lam) > 1.0:
                    corr = -np.conj(diag[j]) / np.conj(lam) ** (m - 2 * j)
                else:
                    corr = -np.conj(diag[j]) * lam ** (m - 2 * j)
                block = block + (corr / y2) * k_mat
        _place_h(coeffs, j, m, eps=1, block=block)
    return _certify(coeffs, p, lam, x, s, norm)


def _dkw_tail_h(q1, r, lam, m, j, d_j, l2, z):
    y = q1.conj().T @ r
    a = np.array([[d_j]])
    b = (np.conj(lam) ** j / l2) * y.reshape(-1, 1)
    c = (lam ** (m - j) / l2) * np.conj(y).reshape(1, -1)
    if j == m - j:
        z = 0.5 * (z + z.conj().T)
        nz = spectral_norm(z) if np.any(z) else 0.0
        if nz > 1.0:
            z = z / nz
    d = dkw_complete(a, b, c, z).D
    return q1 @ d @ q1.conj().T


def minimal_perturbation(p, lam, x, norm="F", z_contraction=None,
                         branch_tol=DEFAULT_BRANCH_TOL):
    """Dispatch on the declared structure class of p."""
    s = require_structure(p)
    if s.adjoint == "T":
        return minimal_perturbation_T(p, lam, x, norm=norm,
                                      z_contraction=z_contraction, branch_tol=branch_tol)
    return minimal_perturbation_H(p, lam, x, norm=norm,
                                  z_contraction=z_contraction, branch_tol=branch_tol)


def minimal_eta(p, lam, x, norm="F", branch_tol=DEFAULT_BRANCH_TOL):
    """Structured backward error matching the minimal construction."""
    s = require_structure(p)
    if s.adjoint == "T":
        return eta_structured_T(p, lam, x, norm=norm, branch_tol=branch_tol)[0]
    return eta_structured_H(p, lam, x, norm=norm, branch_tol=branch_tol)[0]


def solution_family_offset(base, n_poly, x):
    """Shift a perturbation inside its interpolation solution family.

    Adds the complement-sandwiched structured polynomial N, which leaves
    both the interpolation constraint and the structure class untouched.
    The Frobenius norm can only grow relative to the minimal base.
    """
    s = base.structure
    if structure_residual(n_poly, s) > 1e-10 * (1.0 + n_poly.poly_norm("F")):
        raise ValidationError(f"offset polynomial is not {s.name}")
    if n_poly.degree != base.delta.degree or n_poly.size != base.delta.size:
        raise ValidationError("offset polynomial must match the perturbation shape")
    x = normalize_eigenvector(x)
    px = np.eye(base.delta.size, dtype=complex) - np.outer(x, np.conj(x))
    left = px.T if s.adjoint == "T" else px
    sandwiched = np.stack([left @ a @ px for a in n_poly.coeffs])
    return MatrixPolynomial(base.delta.coeffs + sandwiched, structure=s)


def perturbation_to_json(pert):
    doc = poly_to_json(pert.delta)
    doc.update(
        {
            "certified_norm": pert.certified_norm,
            "norm": pert.norm_used,
            "constraint_residual": pert.constraint_residual,
            "structure_residual": pert.structure_residual,
        }
    )
    return doc
