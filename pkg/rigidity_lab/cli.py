"""Command-line interface for rigidity-lab.

Every analysis is a subcommand reading JSON documents from files and writing
a versioned JSON report. ``serve`` runs the same analyses as an MCP server.
"""

import argparse
import json
import sys
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Any, NoReturn, cast, final

from typing_extensions import override

from fastmcp.utilities.logging import configure_logging, get_logger

from rigidity_lab.commands import SEMICONJ_DEFAULT_TOL, build_report
from rigidity_lab.config import RunConfig, get_default_seed, load_environment
from rigidity_lab.errors import RigidityLabError, UsageError
from rigidity_lab.schemas import Report, parse_report
from rigidity_lab.server import RigidityLabServer

logger = get_logger(__name__)

# subcommand -> (help, input documents)
SUBCOMMANDS: dict[str, tuple[str, tuple[str, ...]]] = {
    "hyperbolic": ("Test a matrix for eigenvalues of modulus 1", ("matrix",)),
    "splitting": ("Stable/unstable splitting and adapted norm", ("matrix",)),
    "regularity": ("Regularity profile of an SL(n) element", ("matrix",)),
    "rank1": ("Rank of the span of weight logarithm vectors", ("vectors",)),
    "nonres": ("Resonant and nonresonant roots for a set of weights", ("weights",)),
    "gcd-rows": ("Cartan matrix row gcds", ()),
    "nilpotent": ("Central series tower of a nilpotent Lie algebra", ("algebra", "automorphism")),
    "semiconj": ("Semiconjugacy of a perturbed toral automorphism to its linear part", ("matrix", "field")),
    "cone-cert": ("Cone certificate for f^N g f^N", ("f", "g")),
    "lift": ("Correct affine lifts of a presentation so relators act trivially", ("presentation", "rho", "defects")),
}

INPUT_HELP: dict[str, str] = {
    "matrix": "JSON file with a square matrix",
    "vectors": "JSON file with weight logarithm vectors",
    "weights": "JSON file with explicit weights in epsilon coordinates",
    "algebra": "JSON file with the structure constants",
    "automorphism": "JSON file with an automorphism matrix",
    "field": "JSON file with the periodic displacement (zero when omitted)",
    "f": "JSON file with the hyperbolic matrix f",
    "g": "JSON file with the map g (matrix, or matrix plus field)",
    "presentation": "JSON file with generators and relators",
    "rho": "JSON file with one matrix per generator",
    "defects": "JSON file with one defect vector per relator (zero when omitted)",
}

TOLERANT = {"hyperbolic", "splitting", "regularity", "nilpotent", "semiconj", "cone-cert"}
MARGINED = {"splitting", "semiconj", "cone-cert"}
SEEDED = {"semiconj", "cone-cert"}
ROOTS = {"nonres", "gcd-rows"}


@final
class ArgumentParser(argparse.ArgumentParser):
    """Parser whose errors raise UsageError instead of exiting with status 2."""

    @override
    def error(self, message: str) -> NoReturn:
        raise UsageError(message, prog=self.prog)


def _add_subcommand(
    subparsers: "argparse._SubParsersAction[argparse.ArgumentParser]",
    name: str,
    help_text: str,
    inputs: tuple[str, ...],
    common: argparse.ArgumentParser,
) -> None:
    sub = subparsers.add_parser(name, help=help_text, parents=[common])
    for input_name in inputs:
        _ = sub.add_argument(f"--{input_name}", dest=f"input_{input_name}", help=INPUT_HELP[input_name])

    if name in TOLERANT:
        default = SEMICONJ_DEFAULT_TOL if name == "semiconj" else None
        _ = sub.add_argument("--tol", type=float, default=default, help="Tolerance")
    if name in MARGINED:
        _ = sub.add_argument(
            "--margin", type=float, default=0.01, help="Adapted norm margin (default: 0.01)"
        )
    if name in SEEDED:
        _ = sub.add_argument(
            "--seed",
            type=int,
            default=get_default_seed(),
            help="Seed for sampled checks (default: RIGIDITY_LAB_SEED or 0)",
        )
        _ = sub.add_argument(
            "--verify", action="store_true", default=False, help="Run the independent cross-check"
        )
    if name in ROOTS:
        _ = sub.add_argument("--family", required=True, help="Root system family (A, B, C, D, BC, E6, ...)")
        _ = sub.add_argument("--rank", type=int, default=None, help="Rank of the root system")
    if name == "nonres":
        _ = sub.add_argument(
            "--highest-weight",
            dest="highest_weight",
            help="Highest weight as comma separated Dynkin labels, e.g. 1,0",
        )
        _ = sub.add_argument(
            "--epsilon",
            dest="epsilon_coords",
            action="store_true",
            default=False,
            help="Read --highest-weight in epsilon coordinates",
        )
    if name == "semiconj":
        _ = sub.add_argument("--grid", type=int, default=64, help="Grid points per axis (default: 64)")
        _ = sub.add_argument(
            "--max-terms", dest="max_terms", type=int, default=200, help="Series term cap (default: 200)"
        )
    if name == "cone-cert":
        _ = sub.add_argument("--eps", type=float, default=1.0, help="Cone aperture in (0, 1] (default: 1)")
        _ = sub.add_argument("--delta0", type=float, default=None, help="Override delta0 in (0, r/C)")
        _ = sub.add_argument(
            "--samples", type=int, default=10000, help="Sample count (default: 10000)"
        )


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with one subparser per analysis plus ``serve``."""
    parser = ArgumentParser(
        prog="rigidity-lab",
        description="Computational toolkit for hyperbolic rigidity",
    )

    common = ArgumentParser(add_help=False)
    _ = common.add_argument("--out", help="Write the report to this file instead of standard output")
    _ = common.add_argument(
        "--table", action="store_true", default=False, help="Print a readable table instead of JSON"
    )
    _ = common.add_argument(
        "--verbose", action="store_true", default=False, help="Debug logging and full precision tables"
    )

    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for name, (help_text, inputs) in SUBCOMMANDS.items():
        _add_subcommand(subparsers, name, help_text, inputs, common)

    serve = subparsers.add_parser("serve", help="Run the MCP server")
    _ = serve.add_argument(
        "--transport",
        choices=["stdio", "sse"],
        default="stdio",
        help="Transport protocol to use (default: stdio)",
    )
    _ = serve.add_argument(
        "--name",
        default="rigidity-lab",
        help="Name of the MCP server (default: rigidity-lab)",
    )
    _ = serve.add_argument("--verbose", action="store_true", default=False, help="Debug logging")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Turn parsed arguments into a RunConfig."""
    values = vars(args)
    inputs = {
        key.removeprefix("input_"): cast(str, value)
        for key, value in values.items()
        if key.startswith("input_") and value is not None
    }
    return RunConfig(
        subcommand=cast(str, values["subcommand"]),
        inputs=inputs,
        tol=cast(float | None, values.get("tol")),
        margin=cast(float, values.get("margin", 0.01)),
        eps=cast(float, values.get("eps", 1.0)),
        samples=cast(int, values.get("samples", 10000)),
        seed=cast(int, values.get("seed", get_default_seed())),
        max_terms=cast(int, values.get("max_terms", 200)),
        grid=cast(int, values.get("grid", 64)),
        delta0=cast(float | None, values.get("delta0")),
        verify=cast(bool, values.get("verify", False)),
        out=cast(str | None, values.get("out")),
        verbose=cast(bool, values.get("verbose", False)),
        table=cast(bool, values.get("table", False)),
        family=cast(str | None, values.get("family")),
        rank=cast(int | None, values.get("rank")),
        highest_weight=cast(str | None, values.get("highest_weight")),
        epsilon_coords=cast(bool, values.get("epsilon_coords", False)),
        transport=cast(str, values.get("transport", "stdio")),
        name=cast(str, values.get("name", "rigidity-lab")),
    )


def dispatch(config: RunConfig) -> tuple[int, dict[str, Any]]:
    """Run one analysis.

    Returns:
        Exit code (0 success, 1 malformed input, 2 domain obstruction) and
        the report or error document
    """
    try:
        report = build_report(config)
    except RigidityLabError as e:
        logger.debug("%s failed: %s", config.subcommand, e.message)
        return e.exit_code, e.to_dict()
    return 0, report.to_dict()


# rendering


def _number(value: float, full: bool) -> str:
    return repr(value) if full else f"{value:.6g}"


def _cell(value: Any, full: bool) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return _number(value, full)
    if isinstance(value, list):
        return "(" + ", ".join(_cell(v, full) for v in value) + ")"
    if isinstance(value, dict):
        return json.dumps(value, sort_keys=True)
    return str(value)


def _table(rows: Sequence[tuple[str, Any]], full: bool, header: tuple[str, str] = ("field", "value")) -> list[str]:
    cells = [(name, _cell(value, full)) for name, value in rows]
    width = max([len(header[0])] + [len(name) for name, _ in cells])
    lines = [f"| {header[0]:<{width}} | {header[1]}", f"|-{'-' * width}-|-{'-' * len(header[1])}"]
    lines.extend(f"| {name:<{width}} | {value}" for name, value in cells)
    return lines


def _roots(title: str, roots: Sequence[Any], full: bool) -> list[str]:
    lines = [f"{title} ({len(roots)}):"]
    lines.extend(f"  {_cell(r, full)}" for r in roots)
    return lines


def _body(data: Mapping[str, Any], full: bool) -> list[str]:
    match data["kind"]:
        case "hyperbolic":
            return _table([("hyperbolic", data["hyperbolic"]), ("tol", data["tol"]), ("moduli", data["moduli"])], full)
        case "splitting":
            return _table(
                [
                    (key, data[key])
                    for key in ("dim", "stable_dim", "unstable_dim", "lambda_s", "lambda_u", "certified_rate", "target_rate", "verified")
                ],
                full,
            )
        case "regularity":
            return _table(
                [
                    (key, data[key])
                    for key in ("dimension", "ad_unit_eigen_count", "ad_circle_eigen_count", "ambient_minimum", "regular", "r_regular")
                ],
                full,
            )
        case "rank1":
            return _table([(key, data[key]) for key in ("rank", "is_rank_one", "dimension", "count")], full)
        case "nonres":
            lines = [f"{data['family']}{data['rank']}: classification {data['classification']}"]
            lines += _roots("resonant roots", data["resonant"], full)
            lines += _roots("nonresonant roots", data["nonresonant"], full)
            if data.get("caveat"):
                lines.append(f"caveat: {data['caveat']}")
            return lines
        case "gcd-rows":
            return _table(
                [(f"row {i}", f"{_cell(row, full)} gcd {g}") for i, (row, g) in enumerate(zip(data["cartan"], data["row_gcds"], strict=True))],
                full,
            )
        case "nilpotent":
            lines = _table(
                [("dim", data["dim"]), ("degree", data["degree"]), ("lower_central_dims", data["lower_central_dims"]), ("center_dims", data["center_dims"])],
                full,
            )
            automorphism = data.get("automorphism")
            if automorphism is not None:
                lines.append("")
                lines += _table(
                    [(f"layer {layer['level']}", layer["hyperbolic"]) for layer in automorphism["layers"]]
                    + [("all layers", automorphism["hyperbolic"])],
                    full,
                    header=("layer", "hyperbolic"),
                )
            return lines
        case "semiconj":
            return _table(
                [
                    ("residual", data["residual_sup"]),
                    ("grid residual", data["grid_residual_sup"]),
                    ("K", data["series_terms_used"]),
                    ("grid shape", data["grid_shape"]),
                    ("certified rate", data["certified_rate"]),
                    ("picard difference", data.get("picard_difference")),
                ],
                full,
            )
        case "cone-cert":
            lines = _table([(key, data[key]) for key in ("r", "C", "lambda", "delta0", "T")], full)
            lines += ["", f"N = {data['N']} ({data['label']})", ""]
            lines += _table(
                [(q["name"], f"{_cell(q['lhs'], full)} vs {_cell(q['rhs'], full)}, slack {_cell(q['slack'], full)}") for q in data["inequalities"]],
                full,
                header=("inequality", "lhs vs rhs"),
            )
            return lines
        case "lift":
            lines = [f"q = {data['q']}, lifts on the group: {_cell(data['lifts_on_gamma'], full)}"]
            lines += _table([(g, data["eta"][g]) for g in data["generators"]], full, header=("generator", "eta"))
            return lines
    return _table(sorted(data.items()), full)


def render_report(report: Report | Mapping[str, Any], verbose: bool = False) -> str:
    """Readable summary of a report.

    With ``verbose`` every field is appended at full precision.
    """
    data = report.to_dict() if isinstance(report, Report) else dict(parse_report(report).to_dict())
    lines = [f"# {data['kind']} (schema {data['schema']})", ""]
    lines += _body(data, verbose)
    if verbose:
        lines += ["", "## all fields", ""]
        lines += _table(sorted((k, v) for k, v in data.items() if k not in ("kind", "schema")), True)
    return "\n".join(lines) + "\n"


def _write(text: str, out: str | None) -> None:
    if out is None:
        _ = sys.stdout.write(text)
        return
    _ = Path(out).write_text(text, encoding="utf-8")


def main(argv: Sequence[str] | None = None) -> None:
    """Run the rigidity-lab CLI."""
    load_environment()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        _write(json.dumps(e.to_dict(), sort_keys=True, indent=2) + "\n", None)
        sys.exit(e.exit_code)
    config = config_from_args(args)

    configure_logging("DEBUG" if config.verbose else "WARNING")

    if config.subcommand == "serve":
        server = RigidityLabServer(name=config.name)
        server.run(transport=config.transport)
        return

    code, payload = dispatch(config)
    if config.table and code == 0:
        text = render_report(payload, verbose=config.verbose)
    else:
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    _write(text, config.out)
    if code != 0:
        sys.exit(code)


if __name__ == "__main__":
    main()
