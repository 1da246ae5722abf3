"""Batch command-line interface.

Thin shell over the library: every number printed is the library value
(JSON mode round-trips full precision; human mode keeps 9 significant
digits).  Exit codes: 0 success, 1 validation or consistency problem,
2 numerical failure.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import backward_error as be
from . import linearization as lin
from . import oracle as orc
from . import perturbations as pert
from . import verify as verify_mod
from .errors import NumericalError, ValidationError
from .linalg import determinant
from .polynomial import (
    ALL_STRUCTURES,
    Structure,
    poly_from_json,
    poly_to_json,
    power_norm_sq,
    random_structured,
    structure_residual,
    vector_from_json,
)

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2


def _parse_complex(text):
    try:
        parts = text.split(",")
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise ValidationError(f"cannot parse complex scalar {text!r}; expected 're,im'")


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read JSON file {path!r}: {exc}") from exc


def _load_poly(path):
    return poly_from_json(_load_json(path))


def _load_vector(path):
    return vector_from_json(_load_json(path))


def _emit(doc, args):
    if getattr(args, "human", False):
        for key, value in doc.items():
            if isinstance(value, float):
                print(f"{key}: {value:.9g}")
            else:
                print(f"{key}: {value}")
    else:
        out = json.dumps(doc)
        if getattr(args, "out", None):
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(out + "\n")
        else:
            print(out)


def cmd_check(args):
    p = _load_poly(args.polynomial)
    residuals = {s.name: structure_residual(p, s) for s in ALL_STRUCTURES}
    sample_dets = [abs(determinant(p.evaluate(z))) for z in (0.3, 1.1 + 0.2j, -0.7j)]
    doc = {
        "declared": None if p.structure is None else p.structure.name,
        "residuals": residuals,
        "regular_sample_max_abs_det": max(sample_dets),
    }
    ok = True
    if p.structure is not None:
        declared_res = residuals[p.structure.name]
        ok = declared_res <= 1e-10 * (1.0 + p.poly_norm("F"))
        doc["declared_residual"] = declared_res
    doc["ok"] = ok
    _emit(doc, args)
    return EXIT_OK if ok else EXIT_INVALID


def cmd_backward_error(args):
    p = _load_poly(args.polynomial)
    x = _load_vector(args.x)
    lam = _parse_complex(args.lam)
    doc = be.backward_error_report(p, lam, x, norm=args.norm, branch_tol=args.branch_tol)
    _emit(doc, args)
    return EXIT_OK


def cmd_perturb(args):
    p = _load_poly(args.polynomial)
    x = _load_vector(args.x)
    lam = _parse_complex(args.lam)
    built = pert.minimal_perturbation(p, lam, x, norm=args.norm, branch_tol=args.branch_tol)
    doc = pert.perturbation_to_json(built)
    _emit(doc, args)
    lam_scale = np.sqrt(power_norm_sq(lam, p.degree))
    ok = built.constraint_residual <= 1e-10 * (1.0 + p.poly_norm("F")) * lam_scale and (
        built.structure_residual <= 1e-12 * (1.0 + built.certified_norm)
    )
    return EXIT_OK if ok else EXIT_INVALID


def cmd_linearize(args):
    p = _load_poly(args.polynomial)
    if p.structure is None:
        raise ValidationError("linearize needs a polynomial with declared structure")
    sign = p.structure.sign if args.target == "same" else (
        1 if args.target == "palindromic" else -1
    )
    l_structure = Structure(p.structure.adjoint, sign)
    if args.ansatz:
        v = _load_vector(args.ansatz)
    else:
        v = lin.default_ansatz(p.degree, p.structure, l_structure)
    check = lin.ansatz_admissible(v / np.linalg.norm(v), p.structure, l_structure)
    if not check.admissible:
        raise ValidationError(
            f"ansatz vector violates {check.condition} (residual {check.residual:.3e})"
        )
    pencil = lin.build_structured_pencil(p, v, l_structure)
    _emit(lin.pencil_to_json(pencil), args)
    return EXIT_OK


def cmd_advise(args):
    p = _load_poly(args.polynomial)
    if p.structure is None:
        raise ValidationError("advise needs a polynomial with declared structure")
    lam = _parse_complex(args.lam)
    if p.structure.adjoint == "T":
        doc = {"decision": lin.advise_T(lam), "re_lambda": lam.real}
    else:
        if abs(abs(lam) - 1.0) <= args.branch_tol:
            doc = {"decision": "either", "r_p": None, "r_ap": None}
        else:
            if not args.x:
                raise ValidationError(
                    "the conjugate-transpose advisor needs --x off the unit circle"
                )
            x = _load_vector(args.x)
            if args.ansatz:
                v = _load_vector(args.ansatz)
            else:
                v = lin.default_ansatz(p.degree, p.structure, p.structure)
            doc = lin.advise_H(p, lam, x, v, branch_tol=args.branch_tol)
    _emit(doc, args)
    return EXIT_OK


def cmd_verify(args):
    size_pairs = None
    if args.sizes:
        size_pairs = []
        for chunk in args.sizes.split(";"):
            n, m = chunk.split(",")
            size_pairs.append((int(n), int(m)))
    results = verify_mod.run_all(seed=args.seed, size_pairs=size_pairs)
    worst = EXIT_OK
    for res in results:
        tag = "PASS" if res.passed else "FAIL"
        print(f"{tag} {res.name} ({res.detail})")
        if not res.passed:
            worst = EXIT_INVALID
    return worst


def cmd_oracle(args):
    p = _load_poly(args.polynomial)
    x = _load_vector(args.x)
    lam = _parse_complex(args.lam)
    eta_formula, info = be.eta_structured(p, lam, x, norm="F", branch_tol=args.branch_tol)
    eta_oracle, _ = orc.frobenius_oracle(p, lam, x)
    doc = {
        "eta_structured_F": eta_formula,
        "eta_oracle_F": eta_oracle,
        "relative_gap": abs(eta_formula - eta_oracle) / max(eta_oracle, 1e-300),
        "eta_unstructured": be.eta_unstructured(p, lam, x),
        "eta_unstructured_oracle": orc.unstructured_oracle(p, lam, x),
        "branch": info.branch,
    }
    _emit(doc, args)
    return EXIT_OK


def cmd_gen(args):
    structure = Structure(args.adjoint, args.sign)
    p = random_structured(args.n, args.m, structure, seed=args.seed)
    _emit(poly_to_json(p), args)
    return EXIT_OK


def _add_common(sub, lam=False, x=False, norm=None, out=True):
    sub.add_argument("polynomial", help="polynomial JSON file")
    if lam:
        sub.add_argument("--lambda", dest="lam", required=True, help="eigenvalue as 're,im'")
    if x:
        sub.add_argument("--x", required=x == "required", help="eigenvector JSON file")
    if norm:
        sub.add_argument("--norm", default=norm[0], choices=norm[1])
    if out:
        sub.add_argument("--out", help="write JSON here instead of stdout")
    sub.add_argument("--human", action="store_true", help="9-significant-digit text output")


def build_parser():
    env_tol = float(os.environ.get("PALBE_BRANCH_TOL", "1e-12"))
    parser = argparse.ArgumentParser(
        prog="palbe",
        description="Structured backward errors and linearizations for palindromic matrix polynomials",
    )
    parser.add_argument(
        "--branch-tol",
        type=float,
        default=env_tol,
        help="tolerance for the lambda branch decisions (default 1e-12 or $PALBE_BRANCH_TOL)",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    _add_common(subs.add_parser("check", help="structure and regularity report"))
    sub = subs.add_parser("backward-error", help="backward-error report")
    _add_common(sub, lam=True, x="required", norm=("both", ["F", "2", "both"]))
    sub = subs.add_parser("perturb", help="emit the minimal structured perturbation")
    _add_common(sub, lam=True, x="required", norm=("F", ["F", "2"]))
    sub = subs.add_parser("linearize", help="build a structured pencil")
    _add_common(sub)
    sub.add_argument("--ansatz", help="ansatz vector JSON file (default: canonical)")
    sub.add_argument("--target", default="same", choices=["same", "palindromic", "anti-palindromic"])
    sub = subs.add_parser("advise", help="recommend a structured linearization class")
    _add_common(sub, lam=True, x=True)
    sub.add_argument("--ansatz", help="ansatz vector JSON file for the advisor")
    sub = subs.add_parser("verify", help="run the seeded property suite")
    sub.add_argument("--seed", type=int, default=verify_mod.DEFAULT_SEED)
    sub.add_argument("--sizes", help="size pairs as 'n,m;n,m;...'")
    sub = subs.add_parser("oracle", help="cross-check formulas against the brute-force oracle")
    _add_common(sub, lam=True, x="required")
    sub = subs.add_parser("gen", help="generate a random structured polynomial")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--m", type=int, required=True)
    sub.add_argument("--adjoint", default="T", choices=["T", "H"])
    sub.add_argument("--sign", type=int, default=1, choices=[1, -1])
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--out", help="write JSON here instead of stdout")
    sub.add_argument("--human", action="store_true")
    return parser


_HANDLERS = {
    "check": cmd_check,
    "backward-error": cmd_backward_error,
    "perturb": cmd_perturb,
    "linearize": cmd_linearize,
    "advise": cmd_advise,
    "verify": cmd_verify,
    "oracle": cmd_oracle,
    "gen": cmd_gen,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
