"""Command-line front end.

    matcf erf FILE        erf(A) by continued fraction
    matcf table ...       convergent/error tables (scalar x values or a matrix)
    matcf diagnose FILE   alpha/beta convergence bounds for a fraction
    matcf cf-eval SPEC    evaluate a generic fraction from a JSON spec

Data goes to stdout, warnings and diagnostics to stderr.  Exit codes: 0 on
convergence (or a finite fraction evaluated to the end), 1 on bad input,
2 when ``--max-terms`` ran out, 3 on a singular denominator.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .cfengine import (
    CFGenerator,
    EvaluationReport,
    Termination,
    evaluate,
    iter_convergents,
    positive_divergence_diagnostic,
    worpitzky_diagnostic,
)
from .erf import ErfCFSpec, convergent_table, erf_cf_terms, erf_matrix, erf_matrix_taylor
from .matcore import Matrix, MatrixError, SingularMatrixError, as_matrix, identity, inf_norm, scale, sub

REFERENCE_TABLE_X = (0.005, 0.05, 0.075, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45)

EXIT_CODES = {
    Termination.TOLERANCE_MET: 0,
    Termination.GENERATOR_EXHAUSTED: 0,
    Termination.MAX_TERMS: 2,
    Termination.SINGULAR_DENOMINATOR: 3,
}


class InputError(ValueError):
    """Malformed matrix file or generator spec."""


@dataclass(frozen=True)
class RunConfig:
    tol: float = 1e-12
    max_terms: int = 64
    output_format: str = "pretty"
    oracle: bool = False
    history: bool = False

    def __post_init__(self):
        if not self.tol > 0:
            raise InputError("--tol must be positive")
        if self.max_terms < 1:
            raise InputError("--max-terms must be at least 1")


# ---------------------------------------------------------------- parsing


def parse_number(value: Any) -> float:
    """Number or decimal/fraction literal such as ``"-2/23"`` to a float."""
    if isinstance(value, bool):
        raise InputError(f"not a number: {value!r}")
    if isinstance(value, (int, float)):
        out = float(value)
    elif isinstance(value, str):
        try:
            # float() first keeps -0.0; Fraction handles "p/q"
            out = float(value) if "/" not in value else float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError):
            raise InputError(f"not a number: {value!r}") from None
    else:
        raise InputError(f"not a number: {value!r}")
    if not math.isfinite(out):
        raise InputError(f"non-finite value: {value!r}")
    return out


def _rows_to_matrix(rows: Any) -> Matrix:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise InputError("matrix rows must be a non-empty list of lists")
    m = len(rows)
    if any(len(r) != m for r in rows):
        raise InputError(f"matrix is not square ({m} rows of lengths {[len(r) for r in rows]})")
    return as_matrix([[parse_number(v) for v in r] for r in rows])


def parse_matrix_text(text: str, fmt: str | None = None) -> Matrix:
    """Parse a matrix in JSON (``{"dim": m, "rows": [...]}``) or CSV form."""
    stripped = text.strip()
    if fmt is None:
        fmt = "json" if stripped.startswith(("{", "[")) else "csv"
    if fmt == "json":
        try:
            doc = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON: {exc}") from None
        if isinstance(doc, list):
            return _rows_to_matrix(doc)
        if not isinstance(doc, dict) or "rows" not in doc:
            raise InputError('JSON matrix needs a "rows" field')
        mat = _rows_to_matrix(doc["rows"])
        if "dim" in doc and doc["dim"] != mat.shape[0]:
            raise InputError(f'"dim" is {doc["dim"]} but rows give {mat.shape[0]}')
        return mat
    rows = [
        [cell for cell in row]
        for row in csv.reader(io.StringIO(stripped))
        if row and not row[0].lstrip().startswith("#")
    ]
    return _rows_to_matrix(rows)


def load_matrix(path: str | Path) -> Matrix:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    fmt = {".json": "json", ".csv": "csv"}.get(path.suffix.lower())
    return parse_matrix_text(text, fmt)


def _element(value: Any, dim: int | None) -> Matrix:
    """Matrix literal: list of rows, a scalar (times I), or a string like ``"2I"``.

    Scalars need ``dim`` unless the fraction is 1x1.
    """
    if isinstance(value, dict):
        return _rows_to_matrix(value.get("rows"))
    if isinstance(value, list):
        return _rows_to_matrix(value)
    if isinstance(value, str) and value.strip().endswith("I"):
        coef = value.strip()[:-1].strip()
        c = {"": 1.0, "+": 1.0, "-": -1.0}.get(coef)
        value = c if c is not None else parse_number(coef)
    return scale(identity(dim or 1), parse_number(value))


def generator_from_spec(doc: dict) -> CFGenerator:
    """Build a generator from a JSON spec.

    Families: ``constant`` (same ``b``/``a`` for every k, optional
    ``length``), ``terms`` (explicit list of ``{"b", "a"}``) and ``erf``
    (``matrix`` holds the argument).  ``a0`` defaults to zero.
    """
    if not isinstance(doc, dict):
        raise InputError("generator spec must be a JSON object")
    family = doc.get("family")
    dim = doc.get("dim")
    if dim is not None and (not isinstance(dim, int) or dim < 1):
        raise InputError('"dim" must be a positive integer')
    try:
        if family == "erf":
            if "matrix" not in doc:
                raise InputError('erf family needs "matrix"')
            return erf_cf_terms(ErfCFSpec(_element(doc["matrix"], dim)))
        if family == "constant":
            b, a = _element(doc["b"], dim), _element(doc["a"], dim)
            a0 = _element(doc.get("a0", 0), dim or b.shape[0])
            length = doc.get("length")
            if length is not None and (not isinstance(length, int) or length < 1):
                raise InputError('"length" must be a positive integer')
            return CFGenerator.constant(a0, b, a, length)
        if family == "terms":
            terms = doc["terms"]
            if not isinstance(terms, list) or not terms:
                raise InputError('"terms" must be a non-empty list')
            pairs = [(_element(t["b"], dim), _element(t["a"], dim)) for t in terms]
            a0 = _element(doc.get("a0", 0), dim or pairs[0][0].shape[0])
            return CFGenerator.from_terms(a0, pairs)
    except KeyError as exc:
        raise InputError(f"generator spec is missing {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"bad generator spec: {exc}") from None
    raise InputError(f"unknown family {family!r} (expected constant, terms or erf)")


def load_generator(path: str | Path) -> CFGenerator:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from None
    return generator_from_spec(doc)


# ---------------------------------------------------------------- output


def fmt_float(v: float, output_format: str) -> str:
    if output_format == "pretty":
        return f"{v:.10g}"
    return f"{v:.17g}"


def matrix_to_json(m: Matrix) -> dict:
    return {"dim": int(m.shape[0]), "rows": [[float(v) for v in row] for row in m]}


def _print_matrix(m: Matrix, out, output_format: str, indent: str = "  ") -> None:
    if output_format == "csv":
        w = csv.writer(out, lineterminator="\n")
        for row in m:
            w.writerow(fmt_float(v, "csv") for v in row)
        return
    cells = [[fmt_float(v, "pretty") for v in row] for row in m]
    width = max(len(c) for row in cells for c in row)
    for row in cells:
        out.write(indent + "  ".join(c.rjust(width) for c in row) + "\n")


def _write_records(records: list[dict], columns: Sequence[str], output_format: str, out) -> None:
    if output_format == "json":
        json.dump(records, out, indent=2)
        out.write("\n")
        return

    def cell(v):
        if v is None:
            return ""
        if isinstance(v, float):
            return fmt_float(v, output_format)
        return str(v)

    rows = [[cell(r[c]) for c in columns] for r in records]
    if output_format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(columns)
        w.writerows(rows)
        return
    widths = [max([len(c)] + [len(r[i]) for r in rows]) for i, c in enumerate(columns)]
    out.write("  ".join(c.rjust(w) for c, w in zip(columns, widths)) + "\n")
    for r in rows:
        out.write("  ".join(v.rjust(w) for v, w in zip(r, widths)) + "\n")


def _report_json(report: EvaluationReport, with_history: bool) -> dict:
    doc = {
        "value": matrix_to_json(report.value),
        "termination": report.termination.value,
        "n_used": report.n_used,
        "deltas": report.deltas,
    }
    if report.message:
        doc["message"] = report.message
    if with_history and report.history is not None:
        doc["history"] = [matrix_to_json(f) for f in report.history]
    return doc


def _emit_report(report: EvaluationReport, cfg: RunConfig, out, extra: dict | None = None, label="value") -> None:
    if cfg.output_format == "json":
        doc = _report_json(report, cfg.history)
        doc.update(extra or {})
        json.dump(doc, out, indent=2)
        out.write("\n")
        return
    if cfg.output_format == "csv":
        if cfg.history and report.history:
            w = csv.writer(out, lineterminator="\n")
            w.writerow(["n", "row", "col", "value"])
            for n, f in enumerate(report.history, start=1):
                for i, j in np.ndindex(f.shape):
                    w.writerow([n, i + 1, j + 1, fmt_float(f[i, j], "csv")])
        else:
            _print_matrix(report.value, out, "csv")
        return
    out.write(f"{label} =\n")
    _print_matrix(report.value, out, "pretty")
    out.write(f"termination: {report.termination.value}\n")
    out.write(f"n_used: {report.n_used}\n")
    if report.message:
        out.write(f"message: {report.message}\n")
    if cfg.history and report.history:
        for n, f in enumerate(report.history, start=1):
            out.write(f"F_{n} =\n")
            _print_matrix(f, out, "pretty")


# ---------------------------------------------------------------- commands


def cmd_erf(path: str, cfg: RunConfig, out=sys.stdout, err=sys.stderr) -> int:
    A = load_matrix(path)
    value, report, diag = erf_matrix(A, cfg.tol, cfg.max_terms, keep_history=cfg.history)
    if not diag.flags["within_proved_region"]:
        err.write(f"warning: ||A|| = {inf_norm(A):.6g} is outside proved region ||A|| < 1/2\n")
    extra: dict[str, Any] = {
        "diagnostic": {
            "alpha": diag.alpha,
            "beta": diag.beta,
            "satisfied": diag.satisfied,
            "within_proved_region": diag.flags["within_proved_region"],
        }
    }
    oracle = None
    if cfg.oracle:
        oracle = erf_matrix_taylor(A)
        gap = inf_norm(sub(value, oracle))
        extra["oracle"] = {"value": matrix_to_json(oracle), "difference_norm": gap}
    _emit_report(report, cfg, out, extra, label="erf(A)")
    if oracle is not None and cfg.output_format == "pretty":
        out.write("taylor oracle =\n")
        _print_matrix(oracle, out, "pretty")
        out.write(f"||cf - taylor|| = {extra['oracle']['difference_norm']:.3e}\n")
    elif oracle is not None and cfg.output_format == "csv":
        err.write(f"||cf - taylor|| = {extra['oracle']['difference_norm']:.3e}\n")
    return EXIT_CODES[report.termination]


def plot_records() -> list[dict]:
    """x, erf(x), F_1(x), F_2(x), F_3(x) over [-3, 3] in steps of 0.01."""
    records = []
    for i in range(-300, 301):
        x = i / 100
        rec: dict[str, Any] = {"x": x, "erf": erf_matrix_taylor(x)[0, 0].item()}
        values: dict[int, float] = {}
        try:
            for n, f in iter_convergents(erf_cf_terms(ErfCFSpec(x))):
                values[n] = float(f[0, 0])
                if n == 3:
                    break
        except SingularMatrixError:
            pass
        for n in (1, 2, 3):
            rec[f"F_{n}"] = values.get(n)
        records.append(rec)
    return records


def cmd_table(
    xs: Sequence[float] | None,
    matrix_path: str | None,
    n_max: int,
    cfg: RunConfig,
    out=sys.stdout,
    err=sys.stderr,
    plot: bool = False,
) -> int:
    if plot:
        _write_records(plot_records(), ["x", "erf", "F_1", "F_2", "F_3"], cfg.output_format, out)
        return 0
    if n_max < 1:
        raise InputError("--n-max must be at least 1")
    truncated = False
    if matrix_path is not None:
        table = convergent_table(load_matrix(matrix_path), n_max)
        records = []
        for row in table.rows:
            for i, j in np.ndindex(row.value.shape):
                records.append(
                    {
                        "n": row.n,
                        "row": i + 1,
                        "col": j + 1,
                        "F_n": float(row.value[i, j]),
                        "oracle_minus_F_n": float(row.difference[i, j]),
                    }
                )
        truncated = table.truncated
        columns = ["n", "row", "col", "F_n", "oracle_minus_F_n"]
    else:
        if not xs:
            raise InputError("give --x values, --matrix FILE, --paper-table or --emit-plot-data")
        records = []
        for x in xs:
            table = convergent_table(float(x), n_max)
            truncated |= table.truncated
            for row in table.rows:
                records.append({"x": float(x), "n": row.n, "F_n": row.value, "oracle_minus_F_n": row.difference})
        columns = ["x", "n", "F_n", "oracle_minus_F_n"]
    _write_records(records, columns, cfg.output_format, out)
    if truncated:
        err.write("warning: singular denominator, table truncated\n")
        return 3
    return 0


def _load_any_generator(path: str) -> CFGenerator:
    text = Path(path).read_text() if Path(path).exists() else None
    if text is None:
        raise InputError(f"cannot read {path}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError:
        doc = None
    if isinstance(doc, dict) and "family" in doc:
        return generator_from_spec(doc)
    return erf_cf_terms(ErfCFSpec(load_matrix(path)))


def cmd_diagnose(path: str, K: int, cfg: RunConfig, out=sys.stdout, err=sys.stderr) -> int:
    if K < 1:
        raise InputError("--K must be at least 1")
    gen = _load_any_generator(path)
    try:
        diag = worpitzky_diagnostic(gen, K)
    except SingularMatrixError as exc:
        err.write(f"singular element product at index {exc.index}: {exc}\n")
        return 3
    except ValueError as exc:
        raise InputError(str(exc)) from None
    pos = None
    if gen.length is None or gen.length >= K:
        candidate = positive_divergence_diagnostic(gen, K)
        if candidate.flags["ordinary"]:
            pos = candidate
    records = [{"k": k, "alpha_k": a, "beta_k": b} for k, (a, b) in enumerate(zip(diag.alphas, diag.betas), start=1)]
    if cfg.output_format == "json":
        doc: dict[str, Any] = {
            "bounds": records,
            "alpha": diag.alpha,
            "beta": diag.beta,
            "alpha_beta": diag.product,
            "satisfied": diag.satisfied,
        }
        if pos is not None:
            doc["norm_partial_sums"] = pos.partial_sums
            doc["norm_flags"] = pos.flags
            doc["notes"] = pos.notes
        json.dump(doc, out, indent=2)
        out.write("\n")
        return 0
    _write_records(records, ["k", "alpha_k", "beta_k"], cfg.output_format, out)
    f = cfg.output_format
    summary = [
        ("alpha", fmt_float(diag.alpha, f)),
        ("beta", fmt_float(diag.beta, f)),
        ("alpha_beta", fmt_float(diag.product, f)),
        ("satisfied", str(diag.satisfied).lower()),
    ]
    if pos is not None:
        summary.append(("norm_partial_sums", " ".join(fmt_float(s, f) for s in pos.partial_sums)))
        summary.append(("symmetric_positive", str(pos.flags["symmetric_positive"]).lower()))
    stream = out if f == "pretty" else err
    for key, val in summary:
        stream.write(f"{key}: {val}\n")
    if pos is not None:
        for note in pos.notes:
            stream.write(f"note: {note}\n")
    return 0


def cmd_cf_eval(path: str, cfg: RunConfig, out=sys.stdout, err=sys.stderr) -> int:
    gen = load_generator(path)
    report = evaluate(gen, cfg.tol, cfg.max_terms, keep_history=cfg.history)
    _emit_report(report, cfg, out)
    if report.termination is Termination.SINGULAR_DENOMINATOR:
        err.write(f"error: {report.message}\n")
    return EXIT_CODES[report.termination]


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-12, help="stopping tolerance (default 1e-12)")
    common.add_argument("--max-terms", type=int, default=64, help="maximum partial quotients (default 64)")
    common.add_argument("--format", choices=["csv", "json", "pretty"], default=None, dest="output_format")
    common.add_argument("--oracle", action="store_true", help="compare against the Taylor series")
    common.add_argument("--history", action="store_true", help="include every convergent")

    parser = argparse.ArgumentParser(prog="matcf", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("erf", parents=[common], help="erf(A) by continued fraction")
    p.add_argument("matrix", help="matrix file (.csv or .json)")

    p = sub.add_parser("table", parents=[common], help="convergent error tables")
    p.add_argument("--x", type=float, nargs="+", help="scalar arguments")
    p.add_argument("--matrix", help="matrix file")
    p.add_argument("--n-max", type=int, default=5)
    p.add_argument("--paper-table", action="store_true", help="the eleven reference x values, n = 1..5")
    p.add_argument("--emit-plot-data", action="store_true", help="x, erf, F_1..F_3 over [-3, 3]")

    p = sub.add_parser("diagnose", parents=[common], help="alpha/beta convergence bounds")
    p.add_argument("source", help="matrix file (erf fraction) or JSON generator spec")
    p.add_argument("--K", type=int, default=10, help="number of index pairs")

    p = sub.add_parser("cf-eval", parents=[common], help="evaluate a generator spec")
    p.add_argument("spec", help="JSON generator spec")
    return parser


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    default_format = "csv" if args.command == "table" else "pretty"
    try:
        cfg = RunConfig(args.tol, args.max_terms, args.output_format or default_format, args.oracle, args.history)
        if args.command == "erf":
            return cmd_erf(args.matrix, cfg, out, err)
        if args.command == "table":
            xs = REFERENCE_TABLE_X if args.paper_table else args.x
            return cmd_table(xs, args.matrix, args.n_max, cfg, out, err, plot=args.emit_plot_data)
        if args.command == "diagnose":
            return cmd_diagnose(args.source, args.K, cfg, out, err)
        return cmd_cf_eval(args.spec, cfg, out, err)
    except (InputError, MatrixError) as exc:
        err.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
