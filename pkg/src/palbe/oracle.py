"""Independent minimum-norm solvers used to certify the closed forms.

The Frobenius oracle never touches the structured backward-error
formulas: it eliminates the structure constraints by parameterizing only
free coefficient entries, realifies the interpolation constraint
``dP(lam) x = r`` into 2n real equations, and returns the weighted
minimum-norm least-squares solution.  Entries shared between a
coefficient and its reflected partner carry weight 2 so the parameter
norm equals the aggregate Frobenius norm being minimized.

Also here: the closed-form scalar and vector minimum-norm solutions the
constructions are built from, and a grid audit for the spectral-norm
completion.
"""

from dataclasses import dataclass

import numpy as np

from .backward_error import h_rhat, projections
from .errors import InconsistencyError, ValidationError
from .polynomial import (
    MatrixPolynomial,
    ascending_powers,
    normalize_eigenvector,
    power_norm_sq,
    require_structure,
    residual,
)

__all__ = [
    "min_norm_scalar",
    "min_norm_vector",
    "frobenius_oracle",
    "unstructured_oracle",
    "dkw_grid_oracle",
]


def min_norm_vector(lam, m, y):
    """Vectors x_j with sum_j lam**j x_j = y minimizing sum ||x_j||**2.

    The solution is the pseudoinverse of the power vector applied
    blockwise: x_j = conj(lam)**j y / ||Lambda_m||**2.
    """
    y = np.asarray(y, dtype=complex)
    l2 = power_norm_sq(lam, m)
    return [np.conj(lam) ** j * y / l2 for j in range(m + 1)]


def min_norm_scalar(lam, m, rhs, coupling="free", eps=1, branch_tol=1e-12):
    """Scalars a_0..a_m with sum_j lam**j a_j = rhs of minimal sum |a_j|**2.

    coupling selects the symmetry tying the unknowns:

    * ``"free"``       -- no coupling,
    * ``"transpose"``  -- a_{m-j} = eps * a_j,
    * ``"conjugate"``  -- a_{m-j} = eps * conj(a_j)  (off the unit circle).

    Raises InconsistencyError when the coupling forces the left side to
    vanish but rhs does not (e.g. the antisymmetric coupling at lam = 1).
    """
    rhs = complex(rhs)
    if eps not in (1, -1):
        raise ValidationError("eps must be +1 or -1")
    l2 = power_norm_sq(lam, m)
    cpows = np.conj(ascending_powers(lam, m))
    if coupling == "free":
        return list(cpows * rhs / l2)
    if coupling == "transpose":
        pis_sq = projections(lam, m).norm_sq(eps)
        if pis_sq <= 1e-13 * l2:
            if abs(rhs) > 1e-12:
                raise InconsistencyError(
                    "coupling forces sum lam^j a_j = 0, rhs must vanish"
                )
            return [0.0 + 0.0j] * (m + 1)
        j = np.arange(m + 1)
        return list((cpows[j] + eps * cpows[m - j]) * rhs / (2.0 * pis_sq))
    if coupling == "conjugate":
        return h_rhat(lam, m, rhs, eps=eps, branch_tol=branch_tol).diagonal()
    raise ValidationError(f"unknown coupling {coupling!r}")


@dataclass
class _Slot:
    """One free parameter group of the structured perturbation."""

    insert: callable  # insert(coeffs, value)
    weight: float
    complex_valued: bool


def _pair_slot(j, jr, i, k, structure):
    eps, adj = structure.sign, structure.adjoint

    def insert(coeffs, value):
        coeffs[j][i, k] += value
        mirrored = np.conj(value) if adj == "H" else value
        coeffs[jr][k, i] += eps * mirrored

    return _Slot(insert=insert, weight=2.0, complex_valued=True)


def _middle_slots(jm, i, k, structure):
    eps, adj = structure.sign, structure.adjoint
    if i == k:
        if adj == "T":
            if eps == -1:
                return []  # skew middle has zero diagonal

            def insert(coeffs, value):
                coeffs[jm][i, i] += value

            return [_Slot(insert, weight=1.0, complex_valued=True)]
        # Hermitian / skew-Hermitian middle: one real parameter per diagonal entry
        unit = 1.0 if eps == 1 else 1.0j

        def insert(coeffs, value):
            coeffs[jm][i, i] += unit * value

        return [_Slot(insert, weight=1.0, complex_valued=False)]

    def insert(coeffs, value):
        coeffs[jm][i, k] += value
        mirrored = np.conj(value) if adj == "H" else value
        coeffs[jm][k, i] += eps * mirrored

    return [_Slot(insert, weight=2.0, complex_valued=True)]


def _structure_slots(structure, m, n):
    slots = []
    for j in range((m + 1) // 2):
        for i in range(n):
            for k in range(n):
                slots.append(_pair_slot(j, m - j, i, k, structure))
    if m % 2 == 0:
        jm = m // 2
        for i in range(n):
            for k in range(i, n):
                slots.extend(_middle_slots(jm, i, k, structure))
    return slots


def frobenius_oracle(p, lam, x, structure=None, max_columns=5000):
    """Brute-force Frobenius minimizer of the structured interpolation.

    Returns (eta, delta) where delta is the minimizing structured
    perturbation polynomial.  Raises InconsistencyError when the
    realified system is not solvable (residual above 1e-8 ||r||).
    """
    s = require_structure(p, structure)
    x = normalize_eigenvector(x)
    r = residual(p, lam, x)
    m, n = p.degree, p.size
    pows = ascending_powers(lam, m)
    slots = _structure_slots(s, m, n)

    def constraint_vec(coeffs):
        acc = np.zeros(n, dtype=complex)
        for j in range(m + 1):
            acc += pows[j] * (coeffs[j] @ x)
        return acc

    columns, weights = [], []
    for slot in slots:
        for unit in (1.0, 1.0j) if slot.complex_valued else (1.0,):
            coeffs = np.zeros((m + 1, n, n), dtype=complex)
            slot.insert(coeffs, unit)
            c = constraint_vec(coeffs)
            columns.append(np.concatenate([c.real, c.imag]))
            weights.append(slot.weight)
    if len(columns) > max_columns:
        raise ValidationError("realified system too large for the oracle")
    mat = np.column_stack(columns)
    w = np.sqrt(np.asarray(weights))
    rhs = np.concatenate([r.real, r.imag])
    scaled_sol, *_ = np.linalg.lstsq(mat / w, rhs, rcond=None)
    misfit = np.linalg.norm((mat / w) @ scaled_sol - rhs)
    if misfit > 1e-8 * max(np.linalg.norm(r), 1e-300):
        raise InconsistencyError(
            f"structured interpolation system is inconsistent (residual {misfit:.3e})"
        )
    eta = float(np.linalg.norm(scaled_sol))
    params = scaled_sol / w

    coeffs = np.zeros((m + 1, n, n), dtype=complex)
    idx = 0
    for slot in slots:
        if slot.complex_valued:
            value = complex(params[idx], params[idx + 1])
            idx += 2
        else:
            value = params[idx]
            idx += 1
        slot.insert(coeffs, value)
    return eta, MatrixPolynomial(coeffs, structure=s)


def unstructured_oracle(p, lam, x):
    """Unstructured minimum via the blockwise power-vector pseudoinverse.

    Assembles the minimizing dA_j = conj(lam)**j r x^H / ||Lambda||**2 and
    reports its aggregate Frobenius norm; an independent route to the
    ratio ||r|| / ||Lambda_m||.
    """
    x = normalize_eigenvector(x)
    r = residual(p, lam, x)
    blocks = min_norm_vector(lam, p.degree, r)
    coeffs = np.stack([np.outer(bj, np.conj(x)) for bj in blocks])
    check = sum(
        ascending_powers(lam, p.degree)[j] * (coeffs[j] @ x) for j in range(p.degree + 1)
    )
    if np.linalg.norm(check - r) > 1e-10 * (1.0 + np.linalg.norm(r)):
        raise InconsistencyError("unstructured interpolation failed to reproduce r")
    return float(np.sqrt(np.sum(np.abs(coeffs) ** 2)))


def dkw_grid_oracle(a, b, c, step=1e-3, radius=None):
    """Grid audit of the completion optimum for scalar blocks.

    Scans D over a complex grid of the given step inside the given radius
    (default: twice the completion norm scale) and returns the smallest
    spectral norm of [[a, c], [b, d]].  Grid points whose |d| already
    exceeds the best value found at d = 0 are pruned -- they cannot win
    because the norm dominates |d|.  The result is within 2*step of the
    true minimum over the ball.
    """
    for name, val in (("a", a), ("b", b), ("c", c)):
        if np.size(val) != 1:
            raise ValidationError(f"block {name} must be scalar for the grid oracle")
    a, b, c = complex(a), complex(b), complex(c)

    def sigma_max(d):
        s = abs(a) ** 2 + abs(b) ** 2 + abs(c) ** 2 + np.abs(d) ** 2
        q = np.abs(a * d - c * b)
        return np.sqrt((s + np.sqrt(np.maximum(s * s - 4.0 * q * q, 0.0))) / 2.0)

    best = float(sigma_max(np.array(0.0 + 0.0j)))
    if radius is None:
        radius = 2.0 * best
    cutoff = min(radius, best + step)
    axis = np.arange(-radius, radius + step / 2.0, step)
    axis = axis[np.abs(axis) <= cutoff]
    for lo in range(0, axis.size, 256):
        re = axis[lo : lo + 256]
        d = re[:, None] + 1j * axis[None, :]
        mask = np.abs(d) <= cutoff
        if not np.any(mask):
            continue
        vals = sigma_max(d[mask])
        best = min(best, float(vals.min()))
    return best
