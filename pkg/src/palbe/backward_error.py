"""Backward errors of approximate eigenpairs, structured and unstructured.

For a residual r = -P(lam) x with unit x, the unstructured backward error
is ``||r|| / ||Lambda_m||`` in both the Frobenius and spectral aggregate
norms.  The structured backward errors over the four palindromic classes
take the form

    eta**2 = a * ||r||**2 + b * |x^* r|**2        (transpose classes)

with coefficients driven by two symmetry projections of the power vector
``Lambda_m = [1, lam, ..., lam**m]``, and an analogous expression for the
conjugate-transpose classes built from a realified 2 x (m+1) system.

Branch logic (lam at +-1, on or off the unit circle) follows the
closed-form solutions of the diagonal minimum-norm problems; inner
products that the structure forces to vanish are checked and reported.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InconsistencyError, ValidationError
from .polynomial import (
    ascending_powers,
    normalize_eigenvector,
    power_norm_sq,
    require_structure,
    residual,
)

__all__ = [
    "SIGMA",
    "vec2",
    "real_rep",
    "ProjectionPair",
    "projections",
    "half_power_sums",
    "eta_unstructured",
    "CoefficientPair",
    "t_coefficients",
    "eta_structured_T",
    "HRhat",
    "h_rhat",
    "HBranchReport",
    "eta_structured_H",
    "eta_structured",
    "backward_error_report",
]

DEFAULT_BRANCH_TOL = 1e-12

SIGMA = np.diag([1.0, -1.0])
_ROT90 = np.array([[0.0, -1.0], [1.0, 0.0]])


def vec2(z):
    """Realification C -> R^2, z -> [re z, im z]."""
    z = complex(z)
    return np.array([z.real, z.imag])


def real_rep(z):
    """Real 2x2 representation with real_rep(z1) @ vec2(z2) = vec2(z1*z2)."""
    z = complex(z)
    return np.array([[z.real, -z.imag], [z.imag, z.real]])


@dataclass(frozen=True)
class ProjectionPair:
    """Symmetric/antisymmetric projections of the ascending power vector."""

    pi_plus: np.ndarray
    pi_minus: np.ndarray

    def norm_sq(self, sign):
        v = self.pi_plus if sign > 0 else self.pi_minus
        return float(np.sum(np.abs(v) ** 2))


def projections(lam, m):
    """Pair (Pi_plus, Pi_minus) of length ceil((m+1)/2).

    Entry j is ``(lam**(m-j) +- lam**j) / sqrt(2)`` for j below the
    middle; for even m the trailing entry is ``lam**(m/2)`` in Pi_plus and
    0 in Pi_minus (the average of the coinciding pair).
    """
    if m < 1:
        raise ValidationError("degree must be >= 1")
    pows = ascending_powers(lam, m)
    k = (m + 1) // 2 if m % 2 else m // 2
    j = np.arange(k)
    plus = (pows[m - j] + pows[j]) / np.sqrt(2.0)
    minus = (pows[m - j] - pows[j]) / np.sqrt(2.0)
    if m % 2 == 0:
        plus = np.append(plus, pows[m // 2])
        minus = np.append(minus, 0.0)
    return ProjectionPair(pi_plus=plus, pi_minus=minus)


def half_power_sums(lam, m):
    """(S_hi, S_lo) with S_hi = sum_{j<=J} |lam|**(2(m-j)) and
    S_lo = sum_{j<=J} |lam|**(2j), J = floor(m/2).

    These are the half-range power sums that the spectral-norm
    coefficients of the structured formulas are built from.
    """
    if m < 1:
        raise ValidationError("degree must be >= 1")
    j = np.arange(m // 2 + 1)
    a = np.abs(lam)
    s_hi = float(np.sum(a ** (2.0 * (m - j))))
    s_lo = float(np.sum(a ** (2.0 * j)))
    return s_hi, s_lo


def eta_unstructured(p, lam, x, norm="F"):
    """||r|| / ||Lambda_m||; the Frobenius and spectral values coincide."""
    if norm not in ("F", "2"):
        raise ValidationError(f"norm must be 'F' or '2', got {norm!r}")
    r = residual(p, lam, x)
    return float(np.linalg.norm(r) / np.sqrt(power_norm_sq(lam, p.degree)))


@dataclass(frozen=True)
class CoefficientPair:
    """Coefficients of eta**2 = a ||r||**2 + b |x^T r|**2 plus branch data."""

    a: float
    b: float
    branch: str
    flags: tuple = ()

    @property
    def forced_zero_inner_product(self):
        return "forced_zero_inner_product" in self.flags


def _t_branch_state(structure, m, lam, branch_tol):
    eps = structure.sign
    at_plus = abs(lam - 1.0) <= branch_tol
    at_minus = abs(lam + 1.0) <= branch_tol
    pis_sq = projections(lam, m).norm_sq(eps)
    l2 = power_norm_sq(lam, m)
    forced = (eps == -1 and at_plus) or (
        at_minus and ((eps == 1 and m % 2 == 1) or (eps == -1 and m % 2 == 0))
    )
    singular = pis_sq <= 1e-13 * l2
    flags = []
    if forced or singular:
        flags.append("forced_zero_inner_product")
    if singular:
        flags.append("pi_s_singular")
    if at_plus:
        regime = "lambda=+1"
    elif at_minus:
        regime = "lambda=-1"
    else:
        regime = "generic"
    return eps, l2, pis_sq, regime, tuple(flags)


def t_coefficients(structure, m, lam, norm="F", branch_tol=DEFAULT_BRANCH_TOL):
    """Coefficient pair (a, b) for the transpose classes.

    The b term couples to ``|x^T r|`` through the norm of the signed
    projection Pi_s; when that projection vanishes the inner product is
    structurally zero and b is dropped (flagged).  The spectral-norm a
    uses the half power sum on the side of the unit circle lam lies on,
    with the even-degree middle power counted once.
    """
    if structure.adjoint != "T":
        raise ValidationError("t_coefficients applies to the transpose classes only")
    if norm not in ("F", "2"):
        raise ValidationError(f"norm must be 'F' or '2', got {norm!r}")
    eps, l2, pis_sq, regime, flags = _t_branch_state(structure, m, lam, branch_tol)
    forced = bool(flags)
    if norm == "F":
        a = 2.0 / l2
    else:
        s_hi, s_lo = half_power_sums(lam, m)
        s_dir = s_hi if abs(lam) > 1.0 else s_lo
        mid = abs(lam) ** m if m % 2 == 0 else 0.0
        a = (2.0 * s_dir - mid) / l2**2
        if regime == "generic":
            regime = "|lambda|>1" if abs(lam) > 1.0 else "|lambda|<=1"
    b = 0.0 if forced else 1.0 / pis_sq - a
    parity = "even" if m % 2 == 0 else "odd"
    branch = f"{parity}/{regime}/{structure.name}/{norm}"
    return CoefficientPair(a=float(a), b=float(b), branch=branch, flags=flags)


def eta_structured_T(p, lam, x, norm="F", branch_tol=DEFAULT_BRANCH_TOL):
    """Structured backward error for the transpose classes.

    Returns (eta, CoefficientPair).  Raises InconsistencyError when the
    branch forces x^T r = 0 but the data violates it.
    """
    s = require_structure(p)
    if s.adjoint != "T":
        raise ValidationError("eta_structured_T needs a transpose-class polynomial")
    x = normalize_eigenvector(x)
    r = residual(p, lam, x)
    t = complex(x @ r)
    rn2 = float(np.vdot(r, r).real)
    cp = t_coefficients(s, p.degree, lam, norm=norm, branch_tol=branch_tol)
    if cp.forced_zero_inner_product and abs(t) > 1e-8 * np.sqrt(rn2):
        raise InconsistencyError(
            f"structure forces x^T P(lambda) x = 0 on branch {cp.branch!r}, got {abs(t):.3e}"
        )
    eta_sq = cp.a * rn2 + cp.b * abs(t) ** 2
    return float(np.sqrt(max(eta_sq, 0.0))), cp


@dataclass(frozen=True)
class HRhat:
    """Solution of the realified conjugate-coupled diagonal system.

    ``rhat`` packs the free diagonal unknowns: two real entries per
    complex unknown below the middle, plus (even degree) one trailing real
    entry for the middle unknown, which is real for sign +1 and purely
    imaginary for sign -1.
    """

    rhat: np.ndarray
    stacked: np.ndarray
    m: int
    eps: int
    inner: complex

    @property
    def middle_entry(self):
        return float(self.rhat[-1]) if self.m % 2 == 0 else None

    def diagonal(self):
        """Decode the full diagonal list a_00 .. a_mm."""
        half = [
            complex(self.rhat[2 * j], self.rhat[2 * j + 1])
            for j in range((self.m + 1) // 2 if self.m % 2 else self.m // 2)
        ]
        if self.m % 2 == 0:
            mid = self.rhat[-1] if self.eps == 1 else 1j * self.rhat[-1]
            half.append(complex(mid))
        full = list(half)
        for j in range((self.m + 1) // 2 - 1, -1, -1) if self.m % 2 else range(self.m // 2 - 1, -1, -1):
            full.append(self.eps * np.conj(half[j]))
        return full

    def reconstruction_residual(self):
        return float(np.linalg.norm(self.stacked @ self.rhat - vec2(self.inner)))


def _h_blocks(lam, m, eps):
    pows = ascending_powers(lam, m)
    blocks = []
    for j in range((m + 1) // 2 if m % 2 else m // 2):
        lo, hi = pows[j], pows[m - j]
        blocks.append(
            np.array(
                [
                    [lo.real + eps * hi.real, -lo.imag + eps * hi.imag],
                    [lo.imag + eps * hi.imag, lo.real - eps * hi.real],
                ]
            )
        )
    if m % 2 == 0:
        col = vec2(pows[m // 2]).reshape(2, 1)
        blocks.append(col if eps == 1 else _ROT90 @ col)
    return blocks


def h_rhat(lam, m, inner, eps=1, branch_tol=DEFAULT_BRANCH_TOL):
    """Minimum-norm diagonal for the conjugate-coupled constraint.

    Solves ``sum_j lam**j a_jj = inner`` subject to
    ``conj(a_jj) = eps * a_(m-j)(m-j)`` off the unit circle, minimizing
    ``sum_j |a_jj|**2``.  Entries below the middle count twice in that
    objective (they fix their reflected partner), the even-degree middle
    entry once; the solve weights the columns accordingly.
    """
    if abs(abs(lam) - 1.0) <= branch_tol:
        raise ValidationError("h_rhat is defined off the unit circle only")
    if eps not in (1, -1):
        raise ValidationError("eps must be +1 or -1")
    blocks = _h_blocks(lam, m, eps)
    stacked = np.hstack(blocks)
    weights = np.full(stacked.shape[1], 2.0)
    if m % 2 == 0:
        weights[-1] = 1.0
    scaled = stacked / np.sqrt(weights)
    y = np.linalg.pinv(scaled) @ vec2(inner)
    rhat = y / np.sqrt(weights)
    return HRhat(rhat=rhat, stacked=stacked, m=m, eps=eps, inner=complex(inner))


@dataclass(frozen=True)
class HBranchReport:
    branch: str
    a: float | None
    b: float | None
    rhat: HRhat | None = None
    flags: tuple = ()


def eta_structured_H(p, lam, x, norm="F", branch_tol=DEFAULT_BRANCH_TOL):
    """Structured backward error for the conjugate-transpose classes.

    On the unit circle the closed forms apply directly (the consistency
    condition conj(x^H r) = conj(lam)**m x^H r is checked); elsewhere the
    diagonal cost comes from the realified system of :func:`h_rhat`.  The
    anti-palindromic class is reduced to the palindromic one through the
    isometry P -> i P.
    """
    s = require_structure(p)
    if s.adjoint != "H":
        raise ValidationError("eta_structured_H needs a conjugate-transpose-class polynomial")
    if norm not in ("F", "2"):
        raise ValidationError(f"norm must be 'F' or '2', got {norm!r}")
    if s.sign == -1:
        from .polynomial import MatrixPolynomial, Structure

        rotated = MatrixPolynomial(p.coeffs * 1j, structure=Structure("H", 1))
        eta, rep = eta_structured_H(rotated, lam, x, norm=norm, branch_tol=branch_tol)
        return eta, HBranchReport(
            branch=rep.branch, a=rep.a, b=rep.b, rhat=rep.rhat,
            flags=rep.flags + ("isometry_applied",),
        )

    m = p.degree
    x = normalize_eigenvector(x)
    r = residual(p, lam, x)
    t = complex(np.vdot(x, r))
    rn2 = float(np.vdot(r, r).real)
    l2 = power_norm_sq(lam, m)
    off = max(rn2 - abs(t) ** 2, 0.0)

    if abs(abs(lam) - 1.0) <= branch_tol:
        drift = abs(np.conj(t) - np.conj(lam) ** m * t)
        if drift > 1e-8 * np.sqrt(rn2):
            raise InconsistencyError(
                f"unit-circle consistency conj(x^H r) = conj(lam)^m x^H r violated ({drift:.3e})"
            )
        if norm == "F":
            eta_sq = (2.0 * rn2 - abs(t) ** 2) / l2
            a, b = 2.0 / l2, -1.0 / l2
        else:
            eta_sq = rn2 / l2
            a, b = 1.0 / l2, 0.0
        rep = HBranchReport(branch=f"|lambda|=1/{s.name}/{norm}", a=a, b=b)
        return float(np.sqrt(max(eta_sq, 0.0))), rep

    rh = h_rhat(lam, m, t, eps=1, branch_tol=branch_tol)
    diag_sq = 2.0 * float(rh.rhat @ rh.rhat)
    if m % 2 == 0:
        diag_sq -= rh.rhat[-1] ** 2
    if norm == "F":
        coeff = 2.0 / l2
    else:
        s_hi, s_lo = half_power_sums(lam, m)
        s_dir = s_hi if abs(lam) > 1.0 else s_lo
        mid = abs(lam) ** m if m % 2 == 0 else 0.0
        coeff = (2.0 * s_dir - mid) / l2**2
    regime = "|lambda|>1" if abs(lam) > 1.0 else "|lambda|<1"
    rep = HBranchReport(branch=f"{regime}/{s.name}/{norm}", a=float(coeff), b=None, rhat=rh)
    return float(np.sqrt(max(diag_sq + coeff * off, 0.0))), rep


def eta_structured(p, lam, x, norm="F", branch_tol=DEFAULT_BRANCH_TOL):
    """Dispatch on the declared structure class of p."""
    s = require_structure(p)
    if s.adjoint == "T":
        return eta_structured_T(p, lam, x, norm=norm, branch_tol=branch_tol)
    return eta_structured_H(p, lam, x, norm=norm, branch_tol=branch_tol)


def backward_error_report(p, lam, x, norm="both", branch_tol=DEFAULT_BRANCH_TOL):
    """JSON-ready report with unstructured and structured backward errors.

    ``a``/``b``/``branch`` describe the Frobenius computation when it was
    requested, the spectral one otherwise; flags are the union over the
    requested norms.
    """
    if norm not in ("F", "2", "both"):
        raise ValidationError(f"norm must be 'F', '2' or 'both', got {norm!r}")
    out = {
        "eta_unstructured": eta_unstructured(p, lam, x),
        "eta_structured_F": None,
        "eta_structured_2": None,
        "a": None,
        "b": None,
        "branch": None,
        "flags": [],
    }
    flags = []
    for nrm in ("F", "2"):
        if norm not in (nrm, "both"):
            continue
        eta, info = eta_structured(p, lam, x, norm=nrm, branch_tol=branch_tol)
        out[f"eta_structured_{nrm}"] = eta
        flags.extend(info.flags)
        if out["branch"] is None:
            out["a"], out["b"], out["branch"] = info.a, info.b, info.branch
    out["flags"] = sorted(set(flags))
    return out
