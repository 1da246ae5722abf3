"""Matrix polynomials with palindromic structure.

A matrix polynomial ``P(z) = sum_j z**j A_j`` is stored as a stack of
``m+1`` square complex coefficients.  The four structure classes couple
coefficients across the reversal ``j <-> m-j``:

    transpose,  sign +1 :  A_j.T == A_{m-j}      (T-palindromic)
    transpose,  sign -1 :  A_j.T == -A_{m-j}     (T-anti-palindromic)
    conjugate,  sign +1 :  A_j.conj().T == A_{m-j}   (H-palindromic)
    conjugate,  sign -1 :  A_j.conj().T == -A_{m-j}  (H-anti-palindromic)

The module also provides power vectors of an eigenvalue approximation,
residuals, structured random generation and the spectral-symmetry check
for the four classes.
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import ValidationError
from .linalg import determinant, scalar_poly_roots

__all__ = [
    "Structure",
    "ALL_STRUCTURES",
    "MatrixPolynomial",
    "ApproxEigenpair",
    "normalize_eigenvector",
    "residual",
    "structure_residual",
    "adjoint_reversal",
    "random_structured",
    "ascending_powers",
    "descending_powers",
    "power_norm_sq",
    "determinant_polynomial",
    "eigensymmetry_check",
    "EigensymmetryReport",
    "poly_to_json",
    "poly_from_json",
    "vector_to_json",
    "vector_from_json",
]


@dataclass(frozen=True)
class Structure:
    """One of the four palindromic structure classes.

    ``adjoint`` is ``"T"`` (transpose) or ``"H"`` (conjugate transpose);
    ``sign`` is +1 for palindromic and -1 for anti-palindromic.
    """

    adjoint: str
    sign: int

    def __post_init__(self):
        if self.adjoint not in ("T", "H"):
            raise ValidationError(f"adjoint must be 'T' or 'H', got {self.adjoint!r}")
        if self.sign not in (1, -1):
            raise ValidationError(f"sign must be +1 or -1, got {self.sign!r}")

    def apply_adjoint(self, a):
        a = np.asarray(a)
        return a.T.copy() if self.adjoint == "T" else a.conj().T.copy()

    @property
    def name(self):
        kind = "palindromic" if self.sign == 1 else "anti-palindromic"
        return f"{self.adjoint}-{kind}"

    def __str__(self):
        return self.name


ALL_STRUCTURES = (
    Structure("T", 1),
    Structure("T", -1),
    Structure("H", 1),
    Structure("H", -1),
)


@dataclass(frozen=True)
class MatrixPolynomial:
    """Degree-m polynomial with n x n complex coefficients ``A_0 .. A_m``.

    ``coeffs`` has shape (m+1, n, n).  ``structure`` is the class the
    polynomial is declared to belong to, or None for unstructured data.
    """

    coeffs: np.ndarray
    structure: Structure | None = None

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 3 or c.shape[1] != c.shape[2] or c.shape[0] < 2 or c.shape[1] < 1:
            raise ValidationError(
                f"coefficients must have shape (m+1, n, n) with m >= 1, got {c.shape}"
            )
        if not np.all(np.isfinite(c)):
            raise ValidationError("polynomial has non-finite coefficients")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self):
        return self.coeffs.shape[0] - 1

    @property
    def size(self):
        return self.coeffs.shape[1]

    def evaluate(self, lam):
        """Horner evaluation of P(lam)."""
        acc = self.coeffs[-1].copy()
        for a in self.coeffs[-2::-1]:
            acc = acc * lam + a
        return acc

    def scaled(self, factor):
        return replace(self, coeffs=self.coeffs * factor)

    def plus(self, other):
        if other.coeffs.shape != self.coeffs.shape:
            raise ValidationError("polynomials must share degree and size to be added")
        return MatrixPolynomial(self.coeffs + other.coeffs, structure=self.structure)

    def poly_norm(self, norm="F"):
        """Aggregate norm ``sqrt(sum_j ||A_j||**2)`` for norm in {F, 2}."""
        if norm == "F":
            return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))
        if norm == "2":
            vals = [np.linalg.svd(a, compute_uv=False)[0] for a in self.coeffs]
            return float(np.sqrt(np.sum(np.square(vals))))
        raise ValidationError(f"norm must be 'F' or '2', got {norm!r}")


def normalize_eigenvector(x):
    """Return x scaled to unit 2-norm; rejects near-zero or wild scales."""
    x = np.asarray(x, dtype=complex).reshape(-1)
    if x.size == 0 or not np.all(np.isfinite(x)):
        raise ValidationError("eigenvector must be a nonempty finite vector")
    nrm = np.linalg.norm(x)
    if not 1e-8 <= nrm <= 1e8:
        raise ValidationError(f"eigenvector norm {nrm!r} outside the accepted range")
    return x / nrm


def residual(p, lam, x):
    """r = -P(lam) x for unit-normalized x."""
    x = normalize_eigenvector(x)
    if x.size != p.size:
        raise ValidationError("eigenvector length does not match the polynomial size")
    return -(p.evaluate(lam) @ x)


@dataclass(frozen=True)
class ApproxEigenpair:
    """An approximate right eigenpair (lambda, x) with its residual."""

    lam: complex
    x: np.ndarray
    r: np.ndarray

    @classmethod
    def of(cls, p, lam, x):
        xu = normalize_eigenvector(x)
        return cls(lam=complex(lam), x=xu, r=residual(p, lam, xu))


def structure_residual(p, structure):
    """max_j ||A_{m-j} - sign * adjoint(A_j)||_F; zero iff P lies in the class."""
    m = p.degree
    worst = 0.0
    for j in range(m + 1):
        dev = p.coeffs[m - j] - structure.sign * structure.apply_adjoint(p.coeffs[j])
        worst = max(worst, float(np.linalg.norm(dev)))
    return worst


def adjoint_reversal(p, adjoint):
    """The polynomial with coefficients ``B_j = adjoint(A_{m-j})``.

    P is palindromic iff the reversal equals P, anti-palindromic iff it
    equals -P.
    """
    s = Structure(adjoint, 1)
    rev = np.stack([s.apply_adjoint(a) for a in p.coeffs[::-1]])
    return MatrixPolynomial(rev, structure=p.structure)


def require_structure(p, structure=None, tol_factor=1e-10):
    """Validate that p carries/matches a structure class and return it."""
    s = structure if structure is not None else p.structure
    if s is None:
        raise ValidationError("polynomial has no declared structure class")
    res = structure_residual(p, s)
    if res > tol_factor * (1.0 + p.poly_norm("F")):
        raise ValidationError(
            f"polynomial violates {s.name} structure (residual {res:.3e})"
        )
    return s


def random_structured(n, m, structure, seed):
    """Random polynomial lying exactly in the given structure class.

    Coefficients for j < m/2 are free complex Gaussians; the reflected
    half is generated by the structure law, and for even m the middle
    coefficient is projected onto its forced symmetry (symmetric, skew,
    Hermitian or skew-Hermitian).  Deterministic per seed.
    """
    if n < 1 or m < 1:
        raise ValidationError("need n >= 1 and m >= 1")
    rng = np.random.default_rng(seed)

    def draw():
        return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))

    coeffs = np.zeros((m + 1, n, n), dtype=complex)
    for j in range((m + 1) // 2):
        coeffs[j] = draw()
        coeffs[m - j] = structure.sign * structure.apply_adjoint(coeffs[j])
    if m % 2 == 0:
        mid = draw()
        coeffs[m // 2] = 0.5 * (mid + structure.sign * structure.apply_adjoint(mid))
    return MatrixPolynomial(coeffs, structure=structure)


def ascending_powers(lam, k):
    """[1, lam, ..., lam**k]"""
    return np.power(complex(lam), np.arange(k + 1))


def descending_powers(lam, k):
    """[lam**k, ..., lam, 1]"""
    return ascending_powers(lam, k)[::-1]


def power_norm_sq(lam, k):
    """||[1, lam, ..., lam**k]||_2**2 = sum |lam|**(2j)."""
    return float(np.sum(np.abs(lam) ** (2.0 * np.arange(k + 1))))


def determinant_polynomial(p, radius=1.5):
    """Coefficients of det(P(z)), degree at most n*m.

    Samples the determinant at ``n*m + 1`` points on a circle of the given
    radius and solves the Vandermonde system.  The off-unit radius keeps
    the system well conditioned and avoids the symmetry-induced
    degeneracies of the classes at radius 1.
    """
    d = p.size * p.degree
    points = radius * np.exp(2j * np.pi * np.arange(d + 1) / (d + 1))
    values = np.array([determinant(p.evaluate(z)) for z in points])
    vand = np.vander(points, d + 1, increasing=True)
    return np.linalg.solve(vand, values)


@dataclass(frozen=True)
class EigensymmetryReport:
    closed: bool
    map_name: str
    pairs: tuple
    unpaired: tuple
    paired_with_infinity: tuple
    degree_deficit: int


def eigensymmetry_check(p, structure, tol=1e-6, zero_cut=1e-8):
    """Check closure of the finite spectrum under the class pairing map.

    T classes pair lambda with 1/lambda, H classes with 1/conj(lambda).
    Roots of magnitude below ``zero_cut`` are reported as paired with
    infinity; a drop in the determinant-polynomial degree is reported as
    ``degree_deficit`` (eigenvalues at infinity).
    """
    if p.size * p.degree > 16:
        raise ValidationError("eigensymmetry check is desk-scale only (n*m <= 16)")
    coeffs = determinant_polynomial(p)
    scale = np.max(np.abs(coeffs))
    if scale <= 1e-10 * max(1.0, p.poly_norm("F") ** p.size):
        raise ValidationError("polynomial looks irregular: det(P(z)) vanishes identically")
    deficit = 0
    while coeffs.size > 1 and abs(coeffs[-1]) <= 1e-10 * scale:
        coeffs = coeffs[:-1]
        deficit += 1
    roots = list(scalar_poly_roots(coeffs))

    def target(z):
        return 1.0 / z if structure.adjoint == "T" else 1.0 / np.conj(z)

    near_zero = tuple(z for z in roots if abs(z) < zero_cut)
    pool = [z for z in roots if abs(z) >= zero_cut]
    pairs, unpaired = [], []
    while pool:
        z = pool.pop()
        t = target(z)
        if abs(z - t) <= tol * (1.0 + abs(t)):
            pairs.append((z, z))
            continue
        best, dist = None, np.inf
        for i, w in enumerate(pool):
            d = abs(w - t)
            if d < dist:
                best, dist = i, d
        if best is not None and dist <= tol * (1.0 + abs(t)):
            pairs.append((z, pool.pop(best)))
        else:
            unpaired.append(z)
    map_name = "1/lambda" if structure.adjoint == "T" else "1/conj(lambda)"
    return EigensymmetryReport(
        closed=not unpaired,
        map_name=map_name,
        pairs=tuple(pairs),
        unpaired=tuple(unpaired),
        paired_with_infinity=near_zero,
        degree_deficit=deficit,
    )


# -- JSON schema ------------------------------------------------------------
#
# Polynomial files: {"n": int, "m": int,
#                    "structure": {"adjoint": "T"|"H", "sign": 1|-1} | null,
#                    "coefficients": [A_0, ..., A_m]}
# with every A_j an n x n nested list of [re, im] pairs.
# Vector files: {"x": [[re, im], ...]}.


def _complex_to_pair(z):
    return [float(np.real(z)), float(np.imag(z))]


def _matrix_to_pairs(a):
    return [[_complex_to_pair(z) for z in row] for row in np.asarray(a)]


def _pairs_to_matrix(rows):
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


def poly_to_json(p):
    return {
        "n": p.size,
        "m": p.degree,
        "structure": None
        if p.structure is None
        else {"adjoint": p.structure.adjoint, "sign": p.structure.sign},
        "coefficients": [_matrix_to_pairs(a) for a in p.coeffs],
    }


def poly_from_json(doc):
    try:
        n, m = int(doc["n"]), int(doc["m"])
        coeffs = np.stack([_pairs_to_matrix(a) for a in doc["coefficients"]])
        s = doc.get("structure")
        structure = None if s is None else Structure(s["adjoint"], int(s["sign"]))
    except (KeyError, TypeError, IndexError) as exc:
        raise ValidationError(f"malformed polynomial document: {exc}") from exc
    if coeffs.shape != (m + 1, n, n):
        raise ValidationError(
            f"coefficient array shape {coeffs.shape} does not match n={n}, m={m}"
        )
    return MatrixPolynomial(coeffs, structure=structure)


def vector_to_json(x):
    return {"x": [_complex_to_pair(z) for z in np.asarray(x).reshape(-1)]}


def vector_from_json(doc):
    try:
        return np.array([complex(re, im) for re, im in doc["x"]], dtype=complex)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed vector document: {exc}") from exc
