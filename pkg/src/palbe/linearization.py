"""Structured pencils L(lam) = lam X + Y linearizing a matrix polynomial.

A pencil lies in the right-ansatz family of P when
``L(lam) (Lambda_{m-1} kron I) = v kron P(lam)`` for the descending power
vector ``Lambda_{m-1}``.  Structure is imposed through Y = sign *
adjoint(X); whether a structured pencil exists for a given ansatz vector
v is governed by the flip matrix R:

    polynomial class   pencil class      admissible v
    same sign                             R v = v       (T) /  conj(v) (H)
    opposite sign                         R v = -v      (T) / -conj(v) (H)

The pencil is constructed by solving the column-shifted-sum system
jointly with the structure law as a realified minimum-norm least-squares
problem, and validated against the defining identity afterwards.
"""

from dataclasses import dataclass

import numpy as np

from .backward_error import (
    DEFAULT_BRANCH_TOL,
    eta_structured,
    eta_unstructured,
)
from .errors import ValidationError
from .linalg import pseudoinverse
from .polynomial import (
    MatrixPolynomial,
    Structure,
    descending_powers,
    normalize_eigenvector,
    require_structure,
    _matrix_to_pairs,
    _pairs_to_matrix,
    _complex_to_pair,
)

__all__ = [
    "flip_matrix",
    "AnsatzCheck",
    "ansatz_admissible",
    "default_ansatz",
    "Pencil",
    "build_structured_pencil",
    "lifted_eigenvector",
    "relation_checks",
    "pencil_backward_error",
    "ratio_report",
    "advise_T",
    "advise_H",
    "pencil_to_json",
    "pencil_from_json",
]


def flip_matrix(m):
    return np.eye(m)[::-1].copy()


@dataclass(frozen=True)
class AnsatzCheck:
    condition: str
    residual: float
    flip: np.ndarray

    @property
    def admissible(self):
        return self.residual <= 1e-12


def ansatz_admissible(v, p_structure, l_structure):
    """Check the admissibility condition for (polynomial, pencil) classes."""
    if p_structure.adjoint != l_structure.adjoint:
        raise ValidationError("polynomial and pencil adjoints must match (no T/H mixing)")
    v = np.asarray(v, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(v) - 1.0) > 1e-12:
        raise ValidationError("ansatz vector must have unit 2-norm")
    r = flip_matrix(v.size)
    rel_sign = p_structure.sign * l_structure.sign
    if p_structure.adjoint == "T":
        target = rel_sign * v
        condition = "Rv=v" if rel_sign == 1 else "Rv=-v"
    else:
        target = rel_sign * np.conj(v)
        condition = "Rv=conj(v)" if rel_sign == 1 else "Rv=-conj(v)"
    return AnsatzCheck(
        condition=condition,
        residual=float(np.linalg.norm(r @ v - target)),
        flip=r,
    )


def default_ansatz(m, p_structure, l_structure):
    """Canonical admissible unit ansatz vector for the class pair.

    Same relative sign: the flat vector.  Opposite sign: the flip-odd
    step vector (middle entry zero for odd m); no such vector exists for
    m = 1, which is reported as a validation error.
    """
    rel_sign = p_structure.sign * l_structure.sign
    if rel_sign == 1:
        v = np.ones(m)
    else:
        v = np.concatenate([np.ones(m // 2), np.zeros(m % 2), -np.ones(m // 2)])
        if not np.any(v):
            raise ValidationError(
                "no default ansatz vector for an opposite-sign pencil at degree 1"
            )
    return (v / np.linalg.norm(v)).astype(complex)


@dataclass(frozen=True)
class Pencil:
    """Structured pencil lam X + Y with its right ansatz vector."""

    X: np.ndarray
    Y: np.ndarray
    v: np.ndarray
    structure: Structure

    @property
    def size(self):
        return self.X.shape[0]

    def evaluate(self, lam):
        return lam * self.X + self.Y

    def as_polynomial(self):
        return MatrixPolynomial(np.stack([self.Y, self.X]), structure=self.structure)

    def identity_residual(self, p, lam):
        """Relative residual of the defining identity at one lam."""
        m = p.degree
        lifted = np.kron(descending_powers(lam, m - 1), np.eye(p.size))
        lhs = self.evaluate(lam) @ lifted
        rhs = np.kron(self.v.reshape(-1, 1), p.evaluate(lam))
        return float(np.linalg.norm(lhs - rhs) / (1.0 + np.linalg.norm(rhs)))

    def structure_law_residual(self):
        return float(
            np.linalg.norm(self.Y - self.structure.sign * self.structure.apply_adjoint(self.X))
        )


def _shifted_sum_system(p, v, l_structure):
    """Realified linear system for X from the shifted-sum characterization."""
    m, n = p.degree, p.size
    big = m * n
    eps = l_structure.sign
    conj_sign = -1.0 if l_structure.adjoint == "H" else 1.0
    n_unknowns = 2 * big * big
    rows = 2 * (m + 1) * big * n
    mat = np.zeros((rows, n_unknowns))
    rhs = np.zeros(rows)

    def re_idx(a, b):
        return a * big + b

    def im_idx(a, b):
        return big * big + a * big + b

    row = 0
    for j in range(m + 1):
        target = np.kron(v.reshape(-1, 1), p.coeffs[m - j])
        for pr in range(big):
            for ci in range(n):
                tv = target[pr, ci]
                rr, ri = row, row + 1
                if j < m:
                    mat[rr, re_idx(pr, j * n + ci)] += 1.0
                    mat[ri, im_idx(pr, j * n + ci)] += 1.0
                if j > 0:
                    mat[rr, re_idx((j - 1) * n + ci, pr)] += eps
                    mat[ri, im_idx((j - 1) * n + ci, pr)] += eps * conj_sign
                rhs[rr] = tv.real
                rhs[ri] = tv.imag
                row += 2
    return mat, rhs


def build_structured_pencil(p, v, l_structure, tol=1e-8):
    """Solve for the structured pencil with ansatz v in the family of P.

    The shifted-sum block-column equations and the structure law are
    solved jointly (minimum-norm); an irreducible least-squares residual
    means no structured pencil exists for this ansatz vector.
    """
    require_structure(p)
    if p.structure.adjoint != l_structure.adjoint:
        raise ValidationError("polynomial and pencil adjoints must match (no T/H mixing)")
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.size != p.degree:
        raise ValidationError(f"ansatz vector must have length m = {p.degree}")
    m, n = p.degree, p.size
    big = m * n
    mat, rhs = _shifted_sum_system(p, v, l_structure)
    sol, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
    misfit = np.linalg.norm(mat @ sol - rhs)
    if misfit > tol * max(p.poly_norm("F"), 1e-300):
        raise ValidationError(
            f"no structured pencil for this ansatz vector (residual {misfit:.3e}); "
            "check the admissibility condition"
        )
    x_mat = (sol[: big * big] + 1j * sol[big * big :]).reshape(big, big)
    y_mat = l_structure.sign * l_structure.apply_adjoint(x_mat)
    pencil = Pencil(X=x_mat, Y=y_mat, v=v, structure=l_structure)

    samples = [0.0, 1.0] + [1.3 * np.exp(2j * np.pi * k / m) for k in range(m)]
    worst = max(pencil.identity_residual(p, lam) for lam in samples)
    if worst > 1e-10:
        raise ValidationError(
            f"constructed pencil fails the defining identity (residual {worst:.3e})"
        )
    return pencil


def lifted_eigenvector(lam, x, m):
    """Unit-normalized Lambda_{m-1} kron x."""
    x = normalize_eigenvector(x)
    lifted = np.kron(descending_powers(lam, m - 1), x)
    return lifted / np.linalg.norm(lifted)


def relation_checks(pencil, p, v, lam, x):
    """Relative residuals of the three pencil/polynomial identities.

    norm identity, bilinear-form identity, sesquilinear-form identity.
    """
    x = normalize_eigenvector(x)
    m = p.degree
    lam_vec = descending_powers(lam, m - 1)
    lifted = np.kron(lam_vec, x)
    lp = pencil.evaluate(lam)
    px = p.evaluate(lam) @ x
    v = np.asarray(v, dtype=complex).reshape(-1)

    def rel(lhs, rhs):
        return abs(lhs - rhs) / max(lhs, rhs, 1e-300)

    r1 = rel(float(np.linalg.norm(lp @ lifted)), float(np.linalg.norm(v) * np.linalg.norm(px)))
    r2 = rel(
        abs(lifted @ lp @ lifted),
        abs(lam_vec @ v) * abs(x @ px),
    )
    r3 = rel(
        abs(np.vdot(lifted, lp @ lifted)),
        abs(np.vdot(lam_vec, v)) * abs(np.vdot(x, px)),
    )
    return r1, r2, r3


def pencil_backward_error(pencil, lam, x, m, norm="F", branch_tol=DEFAULT_BRANCH_TOL):
    """Structured backward error of the lifted pair on the pencil."""
    poly = pencil.as_polynomial()
    lifted = lifted_eigenvector(lam, x, m)
    eta, _ = eta_structured(poly, lam, lifted, norm=norm, branch_tol=branch_tol)
    return eta


def _t_bounds(lam, m, l_sign):
    """(F bounds or None, 2-norm bounds or None) for a transpose pencil."""
    shifted = 1.0 + l_sign * lam
    f_bounds = None
    if l_sign * lam.real >= 0.0 and abs(shifted) > 0.0:
        lo = np.sqrt(max(0.0, 1.0 - 2.0 * l_sign * lam.real / abs(shifted) ** 2))
        f_bounds = (lo * np.sqrt((m + 1) / m), np.sqrt(2.0))
    two_bounds = None
    if abs(shifted) > 1e-12:
        two_bounds = (
            np.sqrt((m + 1) / (2.0 * m)),
            np.sqrt(2.0) * np.sqrt(1.0 + 1.0 / abs(shifted) ** 2),
        )
    return f_bounds, two_bounds


def _advisor_vectors(p, lam, x, v):
    """Advisor 2-vectors for the conjugate-transpose linearization choice."""
    x = normalize_eigenvector(x)
    m = p.degree
    lam_vec = descending_powers(lam, m - 1)
    inner = complex(np.vdot(lam_vec, np.asarray(v, dtype=complex)))
    form = complex(np.vdot(x, p.evaluate(lam) @ x))
    rhs = np.array([(inner * form).real, (inner * form).imag])
    mat_p = np.array([[1.0 + lam.real, lam.imag], [lam.imag, 1.0 - lam.real]])
    mat_ap = np.array([[1.0 - lam.real, -lam.imag], [-lam.imag, 1.0 + lam.real]])
    r_p = pseudoinverse(mat_p).real @ rhs
    r_ap = pseudoinverse(mat_ap).real @ rhs
    return r_p, r_ap


def ratio_report(p, lam, x, branch_tol=DEFAULT_BRANCH_TOL):
    """Backward-error amplification report for both structured pencils.

    For each pencil class, reports the ratios of the pencil's structured
    backward error (on the lifted pair) to the unstructured and
    structured errors of P, together with the interval the applicable
    bound theorem prescribes; ``in_bounds`` is None when the theorem's
    hypotheses do not cover the branch.
    """
    s = require_structure(p)
    lam = complex(lam)
    m = p.degree
    eta_p = eta_unstructured(p, lam, x)
    eta_sf, _ = eta_structured(p, lam, x, norm="F", branch_tol=branch_tol)
    eta_s2, _ = eta_structured(p, lam, x, norm="2", branch_tol=branch_tol)
    report = {
        "lambda": _complex_to_pair(lam),
        "m": m,
        "eta_unstructured": eta_p,
        "eta_structured_F": eta_sf,
        "eta_structured_2": eta_s2,
        "entries": [],
    }
    if eta_p == 0.0:
        report["entries"] = []
        report["flags"] = ["exact_eigenpair"]
        return report

    on_circle = abs(abs(lam) - 1.0) <= branch_tol
    for l_sign in (1, -1):
        l_structure = Structure(s.adjoint, l_sign)
        entry = {
            "linearization": l_structure.name,
            "flags": [],
            "in_bounds": None,
        }
        try:
            v = default_ansatz(m, s, l_structure)
        except ValidationError:
            entry["flags"].append("no_admissible_default_ansatz")
            report["entries"].append(entry)
            continue
        pencil = build_structured_pencil(p, v, l_structure)
        eta_lf = pencil_backward_error(pencil, lam, x, m, norm="F", branch_tol=branch_tol)
        eta_l2 = pencil_backward_error(pencil, lam, x, m, norm="2", branch_tol=branch_tol)
        entry.update(
            {
                "v": [_complex_to_pair(z) for z in v],
                "ratio_F": eta_lf / eta_p,
                "ratio_2": eta_l2 / eta_p,
                "ratio_F_structured": eta_lf / eta_sf if eta_sf > 0 else None,
                "ratio_2_structured": eta_l2 / eta_sf if eta_sf > 0 else None,
            }
        )
        checks = []
        if s.adjoint == "T":
            f_bounds, two_bounds = _t_bounds(lam, m, l_sign)
            entry["bounds_F"] = list(f_bounds) if f_bounds else None
            entry["bounds_2"] = list(two_bounds) if two_bounds else None
            if f_bounds:
                checks.append(f_bounds[0] - 1e-9 <= entry["ratio_F"] <= f_bounds[1] + 1e-9)
                if entry["ratio_F_structured"] is not None:
                    checks.append(entry["ratio_F_structured"] <= np.sqrt(2.0) + 1e-9)
            else:
                entry["flags"].append("sign_hypothesis_not_met")
            if two_bounds:
                checks.append(two_bounds[0] - 1e-9 <= entry["ratio_2"] <= two_bounds[1] + 1e-9)
            else:
                entry["flags"].append(f"lambda={-l_sign} excluded for this pencil class")
        else:
            if on_circle:
                lo, hi = np.sqrt((m + 1) / (2.0 * m)), np.sqrt(2.0)
                entry["bounds_F"] = entry["bounds_2"] = [lo, hi]
                checks.append(lo - 1e-9 <= entry["ratio_F"] <= hi + 1e-9)
                checks.append(lo - 1e-9 <= entry["ratio_2"] <= hi + 1e-9)
                if entry["ratio_F_structured"] is not None:
                    checks.append(entry["ratio_F_structured"] <= np.sqrt(2.0) + 1e-9)
            else:
                r_p, r_ap = _advisor_vectors(p, lam, x, v)
                entry["advisor_r"] = {
                    "palindromic": float(np.linalg.norm(r_p)),
                    "anti-palindromic": float(np.linalg.norm(r_ap)),
                }
                entry["flags"].append("off-circle: bounds informational only")
        entry["in_bounds"] = all(checks) if checks else None
        report["entries"].append(entry)
    return report


def advise_T(lam):
    """Pencil-class advice for transpose classes: follow the sign of re(lambda)."""
    return "palindromic" if complex(lam).real >= 0.0 else "anti-palindromic"


def advise_H(p, lam, x, v, branch_tol=DEFAULT_BRANCH_TOL):
    """Pencil-class advice for conjugate-transpose classes.

    On the unit circle the choice does not matter.  Off it, the class
    whose advisor vector is smaller wins; both zero (e.g. a vanishing
    Rayleigh quotient) also means either class works.
    """
    lam = complex(lam)
    v = np.asarray(v, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(v) - 1.0) > 1e-12:
        raise ValidationError("ansatz vector must have unit 2-norm")
    if abs(abs(lam) - 1.0) <= branch_tol:
        return {"decision": "either", "r_p": None, "r_ap": None}
    r_p, r_ap = _advisor_vectors(p, lam, x, v)
    np_, nap = float(np.linalg.norm(r_p)), float(np.linalg.norm(r_ap))
    if np_ == 0.0 and nap == 0.0:
        decision = "either"
    else:
        decision = "palindromic" if np_ <= nap else "anti-palindromic"
    return {"decision": decision, "r_p": np_, "r_ap": nap}


def pencil_to_json(pencil):
    return {
        "mn": pencil.size,
        "X": _matrix_to_pairs(pencil.X),
        "Y": _matrix_to_pairs(pencil.Y),
        "v": [_complex_to_pair(z) for z in pencil.v],
        "structure": {"adjoint": pencil.structure.adjoint, "sign": pencil.structure.sign},
    }


def pencil_from_json(doc):
    try:
        x_mat = _pairs_to_matrix(doc["X"])
        y_mat = _pairs_to_matrix(doc["Y"])
        v = np.array([complex(re, im) for re, im in doc["v"]])
        s = Structure(doc["structure"]["adjoint"], int(doc["structure"]["sign"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed pencil document: {exc}") from exc
    return Pencil(X=x_mat, Y=y_mat, v=v, structure=s)
