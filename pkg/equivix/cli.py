# equivix/cli.py
"""
Command-line entry point.

Usage:
    # Equivariant index of the Bott-Dirac symbol under a rotation
    equivix index --symbol bott-dirac:1 --g rotation:0.7

    # Fixed-point formula, with a refinement table for the integral method
    equivix index --symbol bott-dirac:1 --g blockrot:1.2 --method fixed-point
    equivix index --symbol oscillator --g identity --table refinement.csv

    # Structural checks
    equivix verify --manifest equivix/data/manifests/verify-default.json

    # Semiclassical convergence table
    equivix converge --experiment limit-n1.json --out limit.csv

Exit codes: 0 success, 1 a verify check failed, 2 quadrature did not
converge or the input is ill-conditioned, 64 invalid input or usage.
"""

import argparse
import csv
import json
import logging
import sys
from pathlib import Path
from typing import Optional

from pydantic import ValidationError

from equivix.chern_index import equivariant_index_integral, fixed_point_index, index_convergence_table
from equivix.config import DATA_DIR, settings
from equivix.deformation.experiments import (
    ConvergenceTable,
    isolated_limit_experiment,
    schedule_cutoffs,
    semiclassical_limit_experiment,
    trace_formula_table,
)
from equivix.deformation.gaussians import TestFunction
from equivix.errors import (
    IllConditionedError,
    InvalidDimensionError,
    PreconditionError,
    QuadratureError,
    UsageError,
    WrongMethodError,
)
from equivix.isometry import analyze_isometry, parse_group_element
from equivix.quadrature import QuadratureConfig
from equivix.schemas import ConvergenceRow, ExperimentFile, IndexReport, RefinementRow, RunManifest
from equivix.services.executor import shutdown_executor
from equivix.symbols import resolve_symbol
from equivix.verification import run_verification

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_NUMERICAL = 2
EXIT_USAGE = 64

EXPERIMENTS_DIR = DATA_DIR / "experiments"
CSV_COLUMNS = ["hbar", "N", "lhs", "target", "abs_err", "rel_err", "seconds", "warning"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ─── Input resolution ─────────────────────────────────────────


def _load_json(path: Path, model, what: str):
    if not path.exists():
        raise UsageError(f"{what} not found: {path}")
    try:
        return model.model_validate(json.loads(path.read_text()))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} {path} is not valid JSON: {exc}") from exc
    except ValidationError as exc:
        raise UsageError(f"invalid {what} {path}:\n{exc}") from exc


def load_manifest(args) -> tuple[RunManifest, Path]:
    """Manifest from --manifest (or an empty one), with command-line flags applied on top."""
    if getattr(args, "manifest", None):
        path = Path(args.manifest)
        manifest = _load_json(path, RunManifest, "manifest")
        base_dir = path.resolve().parent
    else:
        manifest = RunManifest()
        base_dir = Path.cwd()

    updates = {}
    for name in ("symbol", "g", "method", "experiment", "out", "table", "seed", "tol", "nodes"):
        value = getattr(args, name, None)
        if value is not None:
            updates[name] = value
    if args.command:
        updates["command"] = args.command
    try:
        manifest = RunManifest.model_validate({**manifest.model_dump(), **updates})
    except ValidationError as exc:
        raise UsageError(f"invalid options:\n{exc}") from exc
    return manifest, base_dir


def _resolve_path(text: str, base_dir: Path, fallback_dir: Optional[Path] = None) -> Path:
    path = Path(text)
    if path.is_absolute():
        return path
    for directory in (base_dir, Path.cwd(), fallback_dir):
        if directory is not None and (directory / path).exists():
            return directory / path
    return base_dir / path


def _group_text(text: str, base_dir: Path) -> str:
    if text == "identity" or text.startswith(("rotation:", "blockrot:")):
        return text
    return str(_resolve_path(text, base_dir, DATA_DIR / "groups"))


def _quadrature_config(manifest: RunManifest) -> QuadratureConfig:
    overrides = manifest.quadrature
    return QuadratureConfig.from_settings(
        nodes=manifest.nodes if manifest.nodes is not None else overrides.nodes,
        levels=overrides.levels,
        abs_tol=overrides.abs_tol,
        rel_tol=manifest.tol if manifest.tol is not None else overrides.rel_tol,
        cell_size=overrides.cell_size,
    )


def _output_path(text: Optional[str], base_dir: Path) -> Optional[Path]:
    if text is None:
        return None
    path = Path(text)
    return path if path.is_absolute() else base_dir / path


def _emit_json(payload: dict, out: Optional[Path]) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out is None:
        print(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text + "\n")
        logger.info(f"Wrote {out}")


def _format_complex(value: complex) -> str:
    return f"{value.real:.12e}{value.imag:+.12e}j"


def _write_csv(path: Optional[Path], header_lines: list[str], rows: list[dict]) -> None:
    handle = sys.stdout if path is None else None
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        handle = path.open("w", newline="")
    try:
        for line in header_lines:
            handle.write(f"# {line}\n")
        writer = csv.DictWriter(handle, fieldnames=list(rows[0]) if rows else CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if path is not None:
            handle.close()
            logger.info(f"Wrote {path}")


def _defaults_line() -> str:
    return "defaults " + json.dumps(settings.defaults_snapshot(), sort_keys=True)


# ─── Commands ─────────────────────────────────────────────────


def cmd_index(args) -> int:
    """Compute the equivariant index of a symbol."""
    manifest, base_dir = load_manifest(args)
    if not manifest.symbol:
        raise UsageError("index needs --symbol")
    a = resolve_symbol(manifest.symbol, base_dir)
    g, description = parse_group_element(_group_text(manifest.g or "identity", base_dir), n=a.n)
    rep_v, rep_w = a.representations(g)
    A = analyze_isometry(g, rep_v, rep_w, description=description)

    method = manifest.method
    if method == "auto":
        method = "integral" if A.n_g >= 1 else "fixed-point"
    if method == "fixed-point" and A.n_g > 0:
        raise WrongMethodError(f"{description} fixes a subspace of dimension {A.n_g}; use --method integral")
    if method == "integral" and A.n_g == 0:
        raise WrongMethodError(f"{description} has an isolated fixed point; use --method fixed-point")

    q = _quadrature_config(manifest)
    if method == "integral":
        result = equivariant_index_integral(a, A, q)
    else:
        result = fixed_point_index(a, A)

    table_path = _output_path(manifest.table, base_dir)
    if table_path is not None and method == "integral":
        levels = index_convergence_table(a, A, q)
        _write_csv(
            table_path,
            [_defaults_line()],
            [
                {
                    "level": row.level,
                    "nodes": row.nodes_per_axis,
                    "value": _format_complex(complex(row.value)),
                    "difference": "" if row.difference is None else f"{row.difference:.6e}",
                }
                for row in levels
            ],
        )

    report = IndexReport(
        method=result.method,
        symbol=a.name,
        g_description=description,
        n_g=A.n_g,
        det_normal=A.det_normal,
        value_re=result.value.real,
        value_im=result.value.imag,
        error_estimate=result.error_estimate,
        evaluations=result.evaluations,
        seconds=result.seconds,
        converged=result.converged,
        nearest_integer=result.nearest_integer,
        refinement=[
            RefinementRow(
                level=row.level,
                nodes=row.nodes_per_axis,
                value_re=complex(row.value).real,
                value_im=complex(row.value).imag,
                difference=row.difference,
            )
            for row in result.refinement
        ],
        defaults=settings.defaults_snapshot(),
    )
    _emit_json(report.model_dump(), _output_path(manifest.out, base_dir))
    if not result.converged:
        logger.error(f"quadrature did not reach the requested tolerance (estimate {result.error_estimate:.2e})")
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_verify(args) -> int:
    """Run the verification battery."""
    manifest, base_dir = load_manifest(args)
    report = run_verification(manifest, base_dir)
    _emit_json(report.model_dump(), _output_path(manifest.out, base_dir))
    if not report.all_passed:
        logger.error(f"failed checks: {', '.join(report.failed)}")
        return EXIT_CHECK_FAILED
    return EXIT_OK


def load_experiment(text: str, base_dir: Path) -> ExperimentFile:
    return _load_json(_resolve_path(text, base_dir, EXPERIMENTS_DIR), ExperimentFile, "experiment file")


def run_experiment(
    experiment: ExperimentFile, q: Optional[QuadratureConfig] = None, base_dir: Optional[Path] = None
) -> ConvergenceTable:
    """Dispatch an experiment file to the matching convergence study.

    A group file named in the experiment resolves against base_dir, normally
    the experiment file's own directory.
    """
    g, description = parse_group_element(_group_text(experiment.g, base_dir or Path.cwd()), n=experiment.n)
    A = analyze_isometry(g, description=description)
    functions = [TestFunction.from_spec(spec, experiment.n) for spec in experiment.functions]
    cutoffs = experiment.cutoffs or schedule_cutoffs(experiment.hbar, experiment.schedule_constant)

    if experiment.kind == "limit":
        return semiclassical_limit_experiment(A, functions, experiment.hbar, cutoffs, q, average=experiment.average)
    if len(functions) != 1:
        raise InvalidDimensionError(f"{experiment.kind} takes a single function, got {len(functions)}")
    if experiment.kind == "isolated-limit":
        return isolated_limit_experiment(A, functions[0], experiment.hbar, cutoffs, average=experiment.average)
    return trace_formula_table(functions[0], A, experiment.hbar, cutoffs, q)


def _row_warnings(table: ConvergenceTable, tolerance: float) -> list[Optional[str]]:
    warnings: list[Optional[str]] = []
    for index, row in enumerate(table.rows):
        notes = []
        if index and table.kind != "trace-formula" and row.abs_err >= table.rows[index - 1].abs_err:
            notes.append("non-monotone")
        if row.edge_energy > 1e-3:
            notes.append("truncation-edge")
        if index == len(table.rows) - 1 and row.rel_err > tolerance:
            notes.append("above-tolerance")
        warnings.append(";".join(notes) or None)
    return warnings


def cmd_converge(args) -> int:
    """Run a semiclassical convergence experiment and write its table."""
    manifest, base_dir = load_manifest(args)
    if not manifest.experiment:
        raise UsageError("converge needs --experiment")
    experiment_path = _resolve_path(manifest.experiment, base_dir, EXPERIMENTS_DIR)
    experiment = _load_json(experiment_path, ExperimentFile, "experiment file")
    table = run_experiment(experiment, _quadrature_config(manifest), base_dir=experiment_path.parent)

    rows = []
    for row, warning in zip(table.rows, _row_warnings(table, experiment.tolerance)):
        record = ConvergenceRow(
            hbar=row.hbar,
            N=row.N,
            lhs=row.lhs,
            target=row.target,
            abs_err=row.abs_err,
            rel_err=row.rel_err,
            seconds=row.seconds,
            warning=warning,
        )
        rows.append(
            {
                "hbar": record.hbar,
                "N": record.N,
                "lhs": _format_complex(record.lhs),
                "target": _format_complex(record.target),
                "abs_err": f"{record.abs_err:.6e}",
                "rel_err": f"{record.rel_err:.6e}",
                "seconds": f"{record.seconds:.3f}",
                "warning": record.warning or "",
            }
        )
    header = [
        _defaults_line(),
        f"experiment {experiment.name or manifest.experiment} kind {experiment.kind} g {experiment.g}",
    ]
    _write_csv(_output_path(manifest.out, base_dir), header, rows)
    if not table.monotone:
        logger.warning("differences did not decrease monotonically")
    if table.rows and table.final_rel_err > experiment.tolerance:
        logger.warning(f"final relative gap {table.final_rel_err:.3e} above tolerance {experiment.tolerance:g}")
    return EXIT_OK


COMMANDS = {"index": cmd_index, "verify": cmd_verify, "converge": cmd_converge}


# ─── Parser ───────────────────────────────────────────────────


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--manifest", default=argparse.SUPPRESS, help="JSON run manifest; flags override its fields")
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--seed", type=int, help="random seed for sampled checks")
    parser.add_argument("--tol", type=float, help="relative quadrature tolerance")
    parser.add_argument("--nodes", type=int, help="Gauss-Legendre nodes per panel")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="equivix", description="Numerical equivariant index toolkit")
    parser.add_argument("--manifest", help="JSON run manifest naming the command")
    parser.add_argument("--log-level", default=None, help="override EQUIVIX_LOG_LEVEL")
    subparsers = parser.add_subparsers(dest="command", parser_class=_Parser, help="Commands")

    index_parser = subparsers.add_parser("index", help="Compute an equivariant index")
    _add_common(index_parser)
    index_parser.add_argument("--symbol", help="bott-dirac:K, oscillator or a symbol file")
    index_parser.add_argument("--g", help="identity, rotation:θ, blockrot:θ1,θ2 or a matrix file")
    index_parser.add_argument("--method", choices=["auto", "integral", "fixed-point"])
    index_parser.add_argument("--table", help="CSV file for the per-level refinement table")
    index_parser.set_defaults(func=cmd_index)

    verify_parser = subparsers.add_parser("verify", help="Run structural checks")
    _add_common(verify_parser)
    verify_parser.add_argument("--symbol", help="bott-dirac:K, oscillator or a symbol file")
    verify_parser.add_argument("--g", help="identity, rotation:θ, blockrot:θ1,θ2 or a matrix file")
    verify_parser.set_defaults(func=cmd_verify)

    converge_parser = subparsers.add_parser("converge", help="Run a semiclassical convergence table")
    _add_common(converge_parser)
    converge_parser.add_argument("--experiment", help="experiment file or bundled experiment name")
    converge_parser.set_defaults(func=cmd_converge)

    return parser


def _dispatch(args) -> int:
    if args.command is None:
        if not getattr(args, "manifest", None):
            raise UsageError("no command given")
        manifest, _ = load_manifest(args)
        if manifest.command is None:
            raise UsageError(f"manifest {args.manifest} does not name a command")
        args.command = manifest.command
        return COMMANDS[manifest.command](args)
    return args.func(args)


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"equivix: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(
        level=(args.log_level or settings.LOG_LEVEL).upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )

    try:
        return _dispatch(args)
    except (PreconditionError, UsageError, InvalidDimensionError) as exc:
        logger.error(str(exc))
        return EXIT_USAGE
    except (QuadratureError, IllConditionedError) as exc:
        logger.error(str(exc))
        diagnostics = getattr(exc, "diagnostics", None)
        if diagnostics:
            logger.error(f"diagnostics: {diagnostics}")
        return EXIT_NUMERICAL
    finally:
        shutdown_executor()


if __name__ == "__main__":
    sys.exit(main())
