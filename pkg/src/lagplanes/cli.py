"""Command-line interface: ``lagplanes {classify,census,decompose,generate}``.

Systems and reports are JSON.  Exit codes: 0 ok, 1 parse or usage error,
2 degenerate input, 3 wrong dimension, 4 decomposition hypothesis failure,
5 internal numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .census import DEFAULT_TANGENCY_TOL, census
from .decompose import decompose
from .errors import (
    DecompositionError,
    DegenerateForm,
    DegenerateOmega,
    DegenerateSystem,
    DimensionMismatch,
    InvalidMatrix,
    LagplanesError,
    NotHamiltonian,
    NotSkew,
    WrongDimension,
)
from .linalg import DEFAULT_TOL, QuadraticForm, check_symplectic, standard_omega
from .normal_forms import CASES, make_case
from .oracle import DEFAULT_BOUND, DEFAULT_RESOLUTION, oracle_agrees, oracle_census
from .spectrum import build_system, classify

EXIT_OK, EXIT_PARSE, EXIT_DEGENERATE, EXIT_DIMENSION, EXIT_DECOMPOSITION, EXIT_NUMERICAL = range(6)
#: symmetry / skewness allowance for input matrices, relative to max(1, max|entry|)
INPUT_TOL = 1e-12

_PARAM_ALIASES = {"lambda": "lam", "λ": "lam", "κ": "kappa", "μ": "mu", "ν": "nu"}


class ParseError(Exception):
    """Malformed system file; the message names the offending line or field."""


# -- system files -------------------------------------------------------------

def _matrix_field(data: dict, name: str, dim: int) -> np.ndarray:
    rows = data[name]
    if not isinstance(rows, list) or len(rows) != dim:
        raise ParseError(f"field {name!r}: expected {dim} rows")
    out = np.empty((dim, dim))
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise ParseError(f"field {name!r}: row {i} must have {dim} entries")
        for j, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ParseError(f"field {name!r}: entry [{i}][{j}] is not a finite number")
            out[i, j] = v
    return out


def parse_system(text: str):
    """Parse a system file into ``(Q, W, metadata)``."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ParseError("top level must be an object")
    for key in ("dim", "S"):
        if key not in data:
            raise ParseError(f"missing field {key!r}")
    dim = data["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 2 or dim % 2:
        raise ParseError(f"field 'dim': expected an even integer >= 2, got {dim!r}")
    S = _matrix_field(data, "S", dim)
    if np.max(np.abs(S - S.T)) > INPUT_TOL * max(1.0, np.max(np.abs(S))):
        raise ParseError("field 'S': matrix is not symmetric")
    if data.get("Omega") is None:
        Omega = standard_omega(dim)
    else:
        Omega = _matrix_field(data, "Omega", dim)
        if np.max(np.abs(Omega + Omega.T)) > INPUT_TOL * max(1.0, np.max(np.abs(Omega))):
            raise ParseError("field 'Omega': matrix is not skew-symmetric")
        Omega = 0.5 * (Omega - Omega.T)
    metadata = data.get("metadata", {})
    return QuadraticForm(0.5 * (S + S.T)), Omega, metadata


def system_document(S: np.ndarray, Omega: np.ndarray | None, metadata: dict) -> dict:
    doc = {"dim": int(S.shape[0]), "S": _matrix(S, digits=17)}
    if Omega is not None:
        doc["Omega"] = _matrix(Omega, digits=17)
    doc["metadata"] = metadata
    return doc


# -- rendering ----------------------------------------------------------------

def _num(x: float, digits: int = 12) -> float:
    x = float(f"{float(x):.{digits}g}")
    return 0.0 if x == 0.0 else x


def _matrix(A, digits: int = 12):
    return [[_num(v, digits) for v in row] for row in np.asarray(A)]


def _complex(z: complex):
    return [_num(z.real), _num(z.imag)]


def _spectrum_section(report) -> dict:
    return {
        "type": report.type.value,
        "multiplicity_structure": (None if report.multiplicity_structure is None
                                   else report.multiplicity_structure.value),
        "quadruplets": [{"value": _complex(q.value), "multiplicity": q.multiplicity}
                        for q in report.quadruplets],
        "eigenvalues": [_complex(z) for z in report.eigenvalues],
        "condition_flags": list(report.condition_flags),
    }


def _verification(rep) -> dict:
    return {
        "max_H_on_plane": _num(rep.max_H_on_plane),
        "max_omega_on_plane": _num(rep.max_omega_on_plane),
        "invariance_defect": _num(rep.invariance_defect),
        "dynamics_label": None if rep.dynamics_label is None else rep.dynamics_label.value,
        "restricted_eigenvalues": [_complex(z) for z in rep.restricted_eigenvalues],
    }


def _census_section(result) -> dict:
    circles = {}
    for name, out in (("rotation", result.rotation), ("reflection", result.reflection)):
        if out is None:
            circles[name] = None
            continue
        circles[name] = {
            "outcome": out.kind.value,
            "theta": [_num(t) for t in out.roots],
            "tangency_flag": out.tangency_flag,
            "margin": None if math.isinf(out.margin) else _num(out.margin),
        }
    for comp, t in result.trig.items():
        circles[comp.value.lower()]["trig_coefficients"] = [_num(t.c0), _num(t.c1), _num(t.c2)]
    planes = []
    for plane, rep in zip(result.planes, result.verification):
        _, comp, theta = plane.provenance
        planes.append({"component": comp, "theta": _num(theta),
                       "basis": _matrix(plane.B), "verification": _verification(rep)})
    return {
        "aggregate": str(result.aggregate),
        "reason": result.reason,
        "circles": circles,
        "planes": planes,
        "flags": list(result.flags),
        "consistent_with_spectrum": result.consistent,
    }


def _oracle_section(report, result) -> dict:
    return {
        "isolated_count": report.count,
        "curve_detected": report.curve_detected,
        "planes": [{"chart": p.provenance[1], "M": [_num(v) for v in p.provenance[2]],
                    "basis": _matrix(p.B)} for p in report.isolated_planes],
        "solutions_per_chart": {k: len(v) for k, v in report.per_chart.items()},
        "warnings": list(report.warnings),
        "agrees_with_census": oracle_agrees(report, result),
    }


def _decompose_section(res) -> dict:
    blocks = [{"dim": b.dim, "kind": b.kind, "value": _complex(b.quadruplet.value),
               "delta": None if dv.unbounded else dv.value}
              for b, dv in zip(res.blocks, res.deltas)]
    return {
        "blocks": blocks,
        "deltas": [str(dv) for dv in res.deltas],
        "count": str(res.count),
        "planes": None if res.planes is None else [_matrix(p.B) for p in res.planes],
        "notes": list(res.notes),
    }


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".lagplanes-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- commands -----------------------------------------------------------------

def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    Q, Omega, metadata = parse_system(text)
    W = check_symplectic(Omega)
    return Q, W, metadata


def _header(args, metadata) -> dict:
    doc = {"tool_version": __version__, "input": metadata,
           "tolerances": {"tol": args.tol, "tangency_tol": DEFAULT_TANGENCY_TOL}}
    if args.seed is not None:
        doc["seed"] = args.seed
    return doc


def cmd_classify(args) -> dict:
    Q, W, metadata = _load(args.path)
    doc = _header(args, metadata)
    doc["spectrum"] = _spectrum_section(classify(build_system(Q, W), args.tol))
    return doc


def cmd_census(args) -> dict:
    Q, W, metadata = _load(args.path)
    if Q.dim != 4:
        raise WrongDimension(f"census needs a 4-dimensional system (got {Q.dim}); "
                             f"use 'decompose' for higher dimensions")
    result = census(Q, W, args.tol)
    doc = _header(args, metadata)
    doc["spectrum"] = _spectrum_section(result.spectrum)
    doc["census"] = _census_section(result)
    if args.with_oracle:
        doc["tolerances"]["oracle_bound"] = args.oracle_bound
        doc["tolerances"]["oracle_resolution"] = args.oracle_resolution
        report = oracle_census(Q, W, args.oracle_bound, args.oracle_resolution)
        doc["oracle"] = _oracle_section(report, result)
    return doc


def cmd_decompose(args) -> dict:
    Q, W, metadata = _load(args.path)
    if Q.dim < 4:
        raise WrongDimension(f"decompose needs dimension >= 4 (got {Q.dim})")
    sys_ = build_system(Q, W)
    doc = _header(args, metadata)
    doc["spectrum"] = _spectrum_section(classify(sys_, args.tol))
    doc["decompose"] = _decompose_section(decompose(sys_, args.tol, strict=True))
    return doc


def parse_params(text: str | None) -> dict:
    """``"kappa=1,lam=2"`` to a dict of floats; ``sign=+`` and ``sign=-`` are accepted."""
    params = {}
    if not text:
        return params
    for item in text.split(","):
        if "=" not in item:
            raise ParseError(f"--params: expected key=value, got {item!r}")
        key, value = (part.strip() for part in item.split("=", 1))
        key = _PARAM_ALIASES.get(key, key)
        if value in ("+", "-"):
            params[key] = 1.0 if value == "+" else -1.0
            continue
        try:
            params[key] = float(value)
        except ValueError:
            raise ParseError(f"--params: value for {key!r} is not a number: {value!r}") from None
    return params


def cmd_generate(args) -> dict:
    if args.case not in CASES:
        raise ParseError(f"unknown case {args.case!r}; choose from {', '.join(CASES)}")
    params = parse_params(args.params)
    seed = 0 if args.seed is None else args.seed
    try:
        Q, W, _ = make_case(args.case, params, seed=seed, conjugate=args.conjugate)
    except TypeError as exc:
        raise ParseError(f"--params: {exc}") from None
    metadata = {"case": args.case, "params": params, "conjugate": args.conjugate}
    if args.conjugate:
        metadata["seed"] = seed
    return system_document(Q.S, W.Omega, metadata)


# -- entry point --------------------------------------------------------------

def _default_tol() -> float:
    env = os.environ.get("LC_TOL")
    if env is None:
        return DEFAULT_TOL
    try:
        return float(env)
    except ValueError:
        raise ParseError(f"LC_TOL is not a number: {env!r}") from None


def build_parser(default_tol: float = DEFAULT_TOL) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lagplanes",
        description="Lagrangian planes in the null-cone of linear Hamiltonian systems.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=default_tol,
                        help="relative tolerance (default 1e-9, or $LC_TOL)")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("-o", "--output", help="write the result here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, helptext in (("classify", "spectral type of L = Omega^-1 S"),
                           ("census", "all Lagrangian planes in the null-cone (R^4)"),
                           ("decompose", "block splitting and plane count in any dimension")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("path", help="system file (JSON)")
        if name == "census":
            p.add_argument("--with-oracle", action="store_true",
                           help="cross-check with the chart-based brute-force search")
            p.add_argument("--oracle-bound", type=float, default=DEFAULT_BOUND)
            p.add_argument("--oracle-resolution", type=int, default=DEFAULT_RESOLUTION)

    p = sub.add_parser("generate", parents=[common], help="emit a normal-form system file")
    p.add_argument("--case", required=True, help=", ".join(CASES))
    p.add_argument("--params", help="comma-separated key=value overrides")
    p.add_argument("--conjugate", action="store_true",
                   help="conjugate by a random symplectic matrix drawn from --seed")
    return parser


COMMANDS = {"classify": cmd_classify, "census": cmd_census,
            "decompose": cmd_decompose, "generate": cmd_generate}


def main(argv=None) -> int:
    try:
        default_tol = _default_tol()
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    parser = build_parser(default_tol)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_PARSE

    try:
        doc = COMMANDS[args.command](args)
    except ParseError as exc:
        code, msg = EXIT_PARSE, f"parse error: {exc}"
    except (InvalidMatrix, DimensionMismatch, NotSkew) as exc:
        code, msg = EXIT_PARSE, f"{type(exc).__name__}: {exc}"
    except (DegenerateSystem, DegenerateForm, DegenerateOmega, NotHamiltonian) as exc:
        code, msg = EXIT_DEGENERATE, f"{type(exc).__name__}: {exc}"
    except WrongDimension as exc:
        code, msg = EXIT_DIMENSION, f"WrongDimension: {exc}"
    except DecompositionError as exc:
        code, msg = EXIT_DECOMPOSITION, f"{type(exc).__name__}: {exc}"
    except LagplanesError as exc:
        code, msg = EXIT_NUMERICAL, f"{type(exc).__name__}: {exc}"
    else:
        text = _dump(doc)
        if args.output:
            write_atomic(args.output, text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    print(msg, file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
