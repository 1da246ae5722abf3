"""Seeded property suite cross-validating formulas against oracles.

Each check walks a deterministic family of structured instances whose
eigenvalue approximations hit every branch (exactly +-1, on the unit
circle, strictly inside, strictly outside) and reports one pass/fail
result.  Failures carry a JSON dump of the first offending instance so
it can be replayed through the CLI.
"""

import json
from dataclasses import dataclass

import numpy as np

from . import backward_error as be
from . import linearization as lin
from . import oracle as orc
from . import perturbations as pert
from .polynomial import (
    ALL_STRUCTURES,
    Structure,
    eigensymmetry_check,
    poly_to_json,
    power_norm_sq,
    random_structured,
    vector_to_json,
)

__all__ = ["CheckResult", "SuiteInstance", "suite_instances", "run_all", "CHECKS"]

DEFAULT_SEED = 20240701

_SIZE_PAIRS = [
    (1, 1), (1, 4), (2, 1), (2, 2), (2, 5), (3, 2),
    (3, 3), (4, 2), (4, 3), (5, 4), (6, 1), (6, 5),
]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    count: int


@dataclass(frozen=True)
class SuiteInstance:
    p: object
    lam: complex
    x: np.ndarray
    label: str

    def dump(self):
        doc = {
            "label": self.label,
            "lambda": [self.lam.real, self.lam.imag],
            "polynomial": poly_to_json(self.p),
        }
        doc.update(vector_to_json(self.x))
        return json.dumps(doc)


def _unit_vector(rng, n):
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return x / np.linalg.norm(x)


def _branch_lambdas(rng):
    theta = rng.uniform(0.2, 2.9)
    return [
        ("lambda=+1", 1.0 + 0.0j),
        ("lambda=-1", -1.0 + 0.0j),
        ("unit_circle", np.exp(1j * theta)),
        ("inside", 0.55 * np.exp(1j * (theta + 0.4))),
        ("outside", 1.8 * np.exp(-1j * theta)),
    ]


def suite_instances(seed=DEFAULT_SEED, size_pairs=None):
    """Deterministic instance family covering classes, sizes and branches."""
    pairs = _SIZE_PAIRS if size_pairs is None else size_pairs
    rng = np.random.default_rng(seed)
    out = []
    for structure in ALL_STRUCTURES:
        for n, m in pairs:
            p = random_structured(n, m, structure, seed=rng.integers(2**32))
            for branch, lam in _branch_lambdas(rng):
                x = _unit_vector(rng, n)
                label = f"{structure.name}/n{n}m{m}/{branch}"
                out.append(SuiteInstance(p=p, lam=complex(lam), x=x, label=label))
    return out


def _result(name, failures, count, first_detail=""):
    if failures == 0:
        return CheckResult(name, True, f"{count} instances", count)
    return CheckResult(name, False, f"{failures}/{count} failed; first: {first_detail}", count)


def check_oracle_equivalence(instances):
    """Frobenius closed forms match the brute-force oracle to 1e-8 relative."""
    failures, first = 0, ""
    for inst in instances:
        eta_formula, _ = be.eta_structured(inst.p, inst.lam, inst.x, norm="F")
        eta_oracle, _ = orc.frobenius_oracle(inst.p, inst.lam, inst.x)
        if abs(eta_formula - eta_oracle) > 1e-8 * max(eta_oracle, 1e-8):
            failures += 1
            first = first or f"{eta_formula=} {eta_oracle=} {inst.dump()}"
    return _result("oracle-equivalence-frobenius", failures, len(instances), first)


def check_certificates(instances):
    """Minimal perturbations carry valid certificates in both norms."""
    failures, first = 0, ""
    for inst in instances:
        lam_norm = np.sqrt(power_norm_sq(inst.lam, inst.p.degree))
        scale = 1e-10 * (1.0 + inst.p.poly_norm("F")) * lam_norm
        for norm in ("F", "2"):
            built = pert.minimal_perturbation(inst.p, inst.lam, inst.x, norm=norm)
            eta, _ = be.eta_structured(inst.p, inst.lam, inst.x, norm=norm)
            ok = (
                built.constraint_residual <= scale
                and built.structure_residual <= 1e-12 * (1.0 + built.certified_norm)
                and abs(built.certified_norm - eta) <= 1e-12 * max(eta, 1e-12)
            )
            if not ok:
                failures += 1
                first = first or (
                    f"norm={norm} cert={built.certified_norm} eta={eta} "
                    f"cres={built.constraint_residual:.2e} sres={built.structure_residual:.2e} "
                    f"{inst.dump()}"
                )
    return _result("minimizer-certificates", failures, 2 * len(instances), first)


def check_frobenius_uniqueness(instances):
    """Oracle minimizer equals the closed-form Frobenius construction."""
    failures, first = 0, ""
    for inst in instances:
        built = pert.minimal_perturbation(inst.p, inst.lam, inst.x, norm="F")
        _, delta_oracle = orc.frobenius_oracle(inst.p, inst.lam, inst.x)
        gap = np.max(np.abs(built.delta.coeffs - delta_oracle.coeffs))
        if gap > 1e-8:
            failures += 1
            first = first or f"entrywise gap {gap:.3e} {inst.dump()}"
    return _result("frobenius-uniqueness", failures, len(instances), first)


def check_spectral_family(instances, seed=DEFAULT_SEED):
    """A nonzero completion contraction gives a distinct, equal-norm minimizer."""
    rng = np.random.default_rng(seed + 1)
    tried = failures = 0
    first = ""
    for inst in instances:
        n = inst.p.size
        if n < 3 or abs(abs(inst.lam) - 1.0) < 1e-8:
            continue
        base = pert.minimal_perturbation(inst.p, inst.lam, inst.x, norm="2")
        z = rng.standard_normal((n - 1, n - 1)) + 1j * rng.standard_normal((n - 1, n - 1))
        z = 0.5 * z / np.linalg.norm(z, 2)
        moved = pert.minimal_perturbation(inst.p, inst.lam, inst.x, norm="2", z_contraction=z)
        distinct = np.max(np.abs(base.delta.coeffs - moved.delta.coeffs)) > 1e-8
        same_norm = abs(base.certified_norm - moved.certified_norm) <= 1e-10 * max(
            base.certified_norm, 1e-10
        )
        tried += 1
        if not (distinct and same_norm):
            failures += 1
            first = first or (
                f"distinct={distinct} norms {base.certified_norm} vs "
                f"{moved.certified_norm} {inst.dump()}"
            )
    return _result("spectral-nonuniqueness", failures, tried, first)


def check_ordering(instances):
    """eta <= eta_structured for both norms; spectral <= Frobenius."""
    failures, first = 0, ""
    for inst in instances:
        eta = be.eta_unstructured(inst.p, inst.lam, inst.x)
        eta_f, _ = be.eta_structured(inst.p, inst.lam, inst.x, norm="F")
        eta_2, _ = be.eta_structured(inst.p, inst.lam, inst.x, norm="2")
        slack = 1e-12 * (1.0 + eta_f)
        if eta > eta_f + slack or eta > eta_2 + slack or eta_2 > eta_f + slack:
            failures += 1
            first = first or f"eta={eta} eta_2={eta_2} eta_F={eta_f} {inst.dump()}"
    return _result("ordering-inequalities", failures, len(instances), first)


def check_projection_identities(seed=DEFAULT_SEED, trials=1000):
    """The four power-projection identities, middle term counted once."""
    rng = np.random.default_rng(seed + 2)
    failures, first = 0, ""
    for _ in range(trials):
        m = int(rng.integers(1, 9))
        lam = complex(rng.uniform(-1.6, 1.6), rng.uniform(-1.6, 1.6))
        pp = be.projections(lam, m)
        plus_sq, minus_sq = pp.norm_sq(1), pp.norm_sq(-1)
        l2 = power_norm_sq(lam, m)
        s_hi, s_lo = be.half_power_sums(lam, m)
        mid = abs(lam) ** m if m % 2 == 0 else 0.0
        j = np.arange(m // 2 + (0 if m % 2 == 0 else 1))
        cross = float(np.sum(2.0 * (np.conj(lam) ** j * lam ** (m - j)).real)) + mid
        checks = [
            abs(plus_sq - minus_sq - cross) <= 1e-12 * max(1.0, l2),
            abs(plus_sq + minus_sq - l2) <= 1e-12 * max(1.0, l2),
            abs(np.sum(np.abs(pp.pi_plus + pp.pi_minus) ** 2) - (2.0 * s_hi - mid))
            <= 1e-12 * max(1.0, l2),
            abs(np.sum(np.abs(pp.pi_plus - pp.pi_minus) ** 2) - (2.0 * s_lo - mid))
            <= 1e-12 * max(1.0, l2),
        ]
        if not all(checks):
            failures += 1
            first = first or f"lam={lam} m={m} checks={checks}"
    return _result("projection-identities", failures, trials, first)


def check_h_unit_circle(seed=DEFAULT_SEED, trials=50):
    """On the unit circle the spectral structured error equals the plain one."""
    rng = np.random.default_rng(seed + 3)
    failures, first = 0, ""
    for k in range(trials):
        n, m = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        p = random_structured(n, m, Structure("H", 1), seed=rng.integers(2**32))
        lam = complex(np.exp(1j * rng.uniform(0.0, 2.0 * np.pi)))
        x = _unit_vector(rng, n)
        eta = be.eta_unstructured(p, lam, x)
        eta2, _ = be.eta_structured_H(p, lam, x, norm="2")
        etaf, _ = be.eta_structured_H(p, lam, x, norm="F")
        ok = abs(eta2 - eta) <= 1e-12 * max(eta, 1e-12)
        if eta > 0:
            ok = ok and 1.0 - 1e-12 <= etaf / eta <= np.sqrt(2.0) + 1e-12
        if not ok:
            failures += 1
            first = first or f"lam={lam} eta={eta} eta2={eta2} etaF={etaf}"
    return _result("h-unit-circle-coincidence", failures, trials, first)


def _pencil_candidates(inst):
    s = inst.p.structure
    for l_sign in (1, -1):
        l_structure = Structure(s.adjoint, l_sign)
        try:
            v = lin.default_ansatz(inst.p.degree, s, l_structure)
        except Exception:
            continue
        yield l_structure, v


def check_pencil_identities(instances, seed=DEFAULT_SEED, trials=1000):
    """Defining identity, the three relations, and the power-vector inequality."""
    failures, first = 0, ""
    small = [i for i in instances if i.p.size * i.p.degree <= 12]
    count = 0
    for inst in small:
        for l_structure, v in _pencil_candidates(inst):
            count += 1
            pencil = lin.build_structured_pencil(inst.p, v, l_structure)
            samples = [0.0, 1.0, inst.lam] + [
                1.3 * np.exp(2j * np.pi * k / inst.p.degree) for k in range(inst.p.degree)
            ]
            ident = max(pencil.identity_residual(inst.p, z) for z in samples)
            rels = lin.relation_checks(pencil, inst.p, v, inst.lam, inst.x)
            law = pencil.structure_law_residual()
            if ident > 1e-10 or max(rels) > 1e-10 or law > 1e-10 * (1.0 + np.linalg.norm(pencil.X)):
                failures += 1
                first = first or (
                    f"{l_structure.name} ident={ident:.2e} rels={rels} {inst.dump()}"
                )
    rng = np.random.default_rng(seed + 4)
    for _ in range(trials):
        count += 1
        m = int(rng.integers(1, 9))
        lam = complex(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0))
        ratio = np.sqrt(power_norm_sq(lam, m)) / (
            np.sqrt(power_norm_sq(lam, m - 1)) * np.hypot(1.0, abs(lam))
        )
        if not np.sqrt((m + 1) / (2.0 * m)) - 1e-12 <= ratio <= 1.0 + 1e-12:
            failures += 1
            first = first or f"power inequality violated at lam={lam}, m={m}"
    return _result("pencil-identities", failures, count, first)


def check_theorem_bounds(instances):
    """Amplification ratios respect the applicable theorem intervals."""
    failures, first = 0, ""
    small = [i for i in instances if i.p.size * i.p.degree <= 12]
    count = 0
    for inst in small:
        report = lin.ratio_report(inst.p, inst.lam, inst.x)
        for entry in report["entries"]:
            if entry["in_bounds"] is None:
                continue
            count += 1
            if not entry["in_bounds"]:
                failures += 1
                first = first or f"{entry} {inst.dump()}"
    return _result("linearization-bounds", failures, count, first)


def check_eigensymmetry(seed=DEFAULT_SEED, trials=50):
    """Finite spectra close under the class pairing map."""
    rng = np.random.default_rng(seed + 5)
    failures, first = 0, ""
    for k in range(trials):
        structure = ALL_STRUCTURES[k % 4]
        n, m = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        p = random_structured(n, m, structure, seed=rng.integers(2**32))
        report = eigensymmetry_check(p, structure, tol=1e-6)
        if not report.closed:
            failures += 1
            first = first or f"{structure.name} n={n} m={m} unpaired={report.unpaired}"
    return _result("eigensymmetry", failures, trials, first)


def check_dkw_audit(seed=DEFAULT_SEED, trials=25, step=1e-3):
    """Grid search finds nothing below the closed-form completion norm."""
    rng = np.random.default_rng(seed + 6)
    failures, first = 0, ""
    for _ in range(trials):
        a, b, c = (complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(3))
        blocks = pert.dkw_complete([[a]], [[b]], [[c]])
        grid_min = orc.dkw_grid_oracle(a, b, c, step=step)
        if grid_min < blocks.mu - 2.0 * step:
            failures += 1
            first = first or f"a={a} b={b} c={c} mu={blocks.mu} grid={grid_min}"
    return _result("dkw-optimality", failures, trials, first)


def check_scalar_ground_truths():
    """The two worked examples reproduce to 1e-12."""
    failures, first = 0, ""
    p1 = random_structured(1, 1, Structure("T", 1), seed=0)
    p1 = type(p1)(np.array([[[1.0 + 0j]], [[1.0 + 0j]]]), structure=Structure("T", 1))
    for norm in ("F", "2"):
        eta, _ = be.eta_structured_T(p1, 2.0, np.array([1.0 + 0j]), norm=norm)
        if abs(eta - np.sqrt(2.0)) > 1e-12:
            failures += 1
            first = first or f"scalar transpose case norm={norm}: {eta}"
    a0 = np.array([[1.0, 1.0], [0.0, 1.0]], dtype=complex)
    p2 = type(p1)(np.stack([a0, a0.conj().T]), structure=Structure("H", 1))
    x = np.array([1.0, 0.0], dtype=complex)
    eta_f, _ = be.eta_structured_H(p2, 1j, x, norm="F")
    eta_2, _ = be.eta_structured_H(p2, 1j, x, norm="2")
    if abs(eta_f - np.sqrt(2.0)) > 1e-12 or abs(eta_2 - np.sqrt(1.5)) > 1e-12:
        failures += 1
        first = first or f"conjugate case: {eta_f}, {eta_2}"
    return _result("scalar-ground-truths", failures, 3, first)


CHECKS = [
    "oracle-equivalence-frobenius",
    "minimizer-certificates",
    "frobenius-uniqueness",
    "spectral-nonuniqueness",
    "ordering-inequalities",
    "projection-identities",
    "h-unit-circle-coincidence",
    "pencil-identities",
    "linearization-bounds",
    "eigensymmetry",
    "dkw-optimality",
    "scalar-ground-truths",
]


def run_all(seed=DEFAULT_SEED, size_pairs=None):
    """Run every suite check; returns the list of CheckResults."""
    instances = suite_instances(seed=seed, size_pairs=size_pairs)
    return [
        check_oracle_equivalence(instances),
        check_certificates(instances),
        check_frobenius_uniqueness(instances),
        check_spectral_family(instances, seed=seed),
        check_ordering(instances),
        check_projection_identities(seed=seed),
        check_h_unit_circle(seed=seed),
        check_pencil_identities(instances, seed=seed),
        check_theorem_bounds(instances),
        check_eigensymmetry(seed=seed),
        check_dkw_audit(seed=seed),
        check_scalar_ground_truths(),
    ]
