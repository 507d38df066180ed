"""Command-line interface: sweeps of identified sets, propensity checks and oracle runs.

Exit codes are 0 on success, 1 when a check or anchor assertion fails and 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import TYPE_CHECKING

import pandas as pd

from quantile_independence import __version__
from quantile_independence.domain_logic import piecewise
from quantile_independence.domain_logic.bounds import att_set, qtt_set
from quantile_independence.domain_logic.independence import (
    check_mean_independence,
    check_t_independence,
    check_u_independence,
    monotonicity_report,
)
from quantile_independence.domain_logic.observables import dgp_to_observed, read_samples_csv
from quantile_independence.domain_logic.oracle import extremal_mean, verify_bounds
from quantile_independence.exceptions import (
    AnchorMismatchError,
    InputFormatError,
    QuantileIndependenceError,
)
from quantile_independence.models import deserialize_default, deserialize_propensity
from quantile_independence.models.config import SweepConfig
from quantile_independence.models.observed import TruncNormDgp
from quantile_independence.models.results import Verdict
from quantile_independence.models.spec import IndependenceKind, IndependenceSpec
from quantile_independence.utils import parse_delta_grid, parse_spec, read_config_file

if TYPE_CHECKING:
    from collections.abc import Sequence

    from quantile_independence.models.observed import ObservedJoint
    from quantile_independence.models.propensity import GridPropensity
    from quantile_independence.types import JsonDict

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2

FLOAT_FORMAT = "%.6g"
ANCHOR_TOLERANCE = 0.01
SWEEP_COLUMNS = ["delta", "param", "spec", "lo", "hi"]
ORACLE_COLUMNS = ["oracle_lo", "oracle_hi"]


def observed_from_config(config: SweepConfig) -> ObservedJoint:  # noqa: D103
    if config.source == "dgp":
        dgp = TruncNormDgp(gamma=config.gamma, pi=config.pi, p1=config.p1)
        return dgp_to_observed(dgp, config.n_knots)
    return read_samples_csv(config.source)


def oracle_att(spec: IndependenceSpec, obs: ObservedJoint, n_cells: int) -> tuple[float, float]:
    """ATT endpoints from the grid oracle's extremal ``E(Y0 | X = 1)``."""
    treated_mean = piecewise.integrate(obs.q_y_given_x1, 0.0, 1.0)
    return (
        treated_mean - extremal_mean(spec, obs, "max", n_cells),
        treated_mean - extremal_mean(spec, obs, "min", n_cells),
    )


def run_sweep(config: SweepConfig, obs: ObservedJoint) -> pd.DataFrame:
    """One row per ``(delta, param, spec)`` with the identified set's endpoints.

    With ``config.oracle`` set, ATT rows also carry the oracle's endpoints at
    ``config.n_cells`` cells.
    """
    rows = []
    for delta in config.delta_grid:
        logger.debug("Sweep at delta=%g", delta)
        for param in config.params:
            for family in config.specs:
                spec = IndependenceSpec.for_delta(family, delta)  # type: ignore[arg-type]
                found = att_set(spec, obs) if param == "ATT" else qtt_set(config.q, spec, obs)
                if found.unbounded:
                    logger.warning(
                        "Unbounded identified set for %s under %s at delta=%g",
                        param,
                        family,
                        delta,
                    )
                row = [delta, param, family, found.lo, found.hi]
                if config.oracle:
                    nan = float("nan")
                    row.extend(
                        oracle_att(spec, obs, config.n_cells) if param == "ATT" else (nan, nan)
                    )
                rows.append(row)
    columns = SWEEP_COLUMNS + ORACLE_COLUMNS if config.oracle else SWEEP_COLUMNS
    return pd.DataFrame(rows, columns=columns)


def write_table(frame: pd.DataFrame, out: str | Path | None) -> None:
    """Write a CSV with six significant digits; infinite endpoints print as ``inf``."""
    if out is None:
        frame.to_csv(sys.stdout, index=False, float_format=FLOAT_FORMAT)
    else:
        frame.to_csv(out, index=False, float_format=FLOAT_FORMAT)


def load_config(args: argparse.Namespace) -> SweepConfig:
    """Merge defaults, the optional config file and command-line flags, in that order."""
    settings: JsonDict = read_config_file(args.config) if args.config else {}
    overrides = {
        "source": args.csv,
        "gamma": args.gamma,
        "pi": args.pi,
        "p1": args.p1,
        "delta_grid": parse_delta_grid(args.delta_grid) if args.delta_grid else None,
        "params": args.param,
        "q": args.q,
        "specs": args.spec,
        "n_knots": args.n_knots,
        "n_cells": args.n_cells,
        "oracle": True if args.oracle else None,
        "out": args.out,
    }
    settings.update({key: value for key, value in overrides.items() if value is not None})
    if args.dgp:
        settings["source"] = "dgp"
    return deserialize_default(SweepConfig, settings)


def cmd_bounds(args: argparse.Namespace) -> int:
    """Sweep identified sets over delta and write them as CSV."""
    config = load_config(args)
    table = run_sweep(config, observed_from_config(config))
    write_table(table, config.out)
    return EXIT_OK


def _read_propensity(path: str) -> GridPropensity:
    try:
        with open(path, encoding="utf-8") as f:
            payload = json.load(f)
    except json.JSONDecodeError as e:
        raise InputFormatError(f"Malformed JSON in {path}: {e.msg}", line=e.lineno) from e
    except OSError as e:
        raise InputFormatError(f"Cannot read {path}: {e}") from e
    return deserialize_propensity(payload)


def check_propensity(p: GridPropensity, spec: IndependenceSpec) -> Verdict:
    """Run the check matching ``spec.kind``."""
    if spec.kind == IndependenceKind.T_SET:
        return check_t_independence(p, spec)
    if spec.kind == IndependenceKind.U_SET:
        return check_u_independence(p, spec)
    if spec.kind == IndependenceKind.MEAN:
        return check_mean_independence(p, spec.tolerance)
    if spec.kind == IndependenceKind.FULL:
        return check_u_independence(p, IndependenceSpec.u_interval(0.0, 1.0))
    return Verdict(passed=True, note="no assumption")


def cmd_check(args: argparse.Namespace) -> int:
    """Check a propensity file against an assumption and report its direction changes."""
    p = _read_propensity(args.propensity)
    spec = parse_spec(args.spec)
    verdict = check_propensity(p, spec)
    report = {
        "spec": spec.label,
        "verdict": verdict.to_dict(),
        "monotonicity": monotonicity_report(p).to_dict(),
    }
    print(json.dumps(report, indent=2))
    return EXIT_OK if verdict.passed else EXIT_FAILED


def cmd_verify(args: argparse.Namespace) -> int:
    """Certify the closed-form cdf bounds against the grid oracle."""
    spec = parse_spec(args.spec)
    report = verify_bounds(spec, args.p_x, args.n_cells, args.simplex_stride)
    print(json.dumps(report.to_dict(), indent=2))
    return EXIT_OK if report.passed else EXIT_FAILED


def _close(value: float, target: float) -> bool:
    return abs(value - target) <= ANCHOR_TOLERANCE


def check_sweep_anchors(att: pd.DataFrame, qtt: pd.DataFrame) -> None:
    """Assert the known anchor values of the delta sweep.

    Raises
    ------
    AnchorMismatchError
        With the first value that misses its anchor by more than 0.01.
    """

    def row(frame: pd.DataFrame, family: str, delta: float) -> pd.Series:
        match = frame[(frame["spec"] == family) & (frame["delta"] == delta)]
        if match.empty:
            raise AnchorMismatchError("Anchor row missing", spec=family, delta=delta)
        return match.iloc[0]

    for family, expected in (("T", (-1.0, 3.0)), ("U", (-3.0, 5.0))):
        found = row(att, family, 0.5)
        if not (_close(found["lo"], expected[0]) and _close(found["hi"], expected[1])):
            raise AnchorMismatchError(
                "ATT anchor missed",
                spec=family,
                expected=expected,
                found=(found["lo"], found["hi"]),
            )
    wide = qtt[(qtt["spec"] == "U") & (qtt["delta"] >= 0.25)]
    for _, found in wide.iterrows():
        if not (_close(found["lo"], -3.0) and _close(found["hi"], 5.0)):
            raise AnchorMismatchError(
                "QTT anchor under U missed", delta=found["delta"], found=(found["lo"], found["hi"])
            )
    for _, found in qtt[qtt["spec"] == "T"].iterrows():
        if found["hi"] - found["lo"] > ANCHOR_TOLERANCE or not _close(found["lo"], 1.0):
            raise AnchorMismatchError(
                "QTT under T is not the point 1",
                delta=found["delta"],
                found=(found["lo"], found["hi"]),
            )


def reproduce_sweep_tables(out_dir: Path, n_knots: int = 4096) -> tuple[Path, Path]:
    """Write ``qtt.csv`` and ``att.csv`` for the 101-point delta sweep and check anchors."""
    config = SweepConfig(n_knots=n_knots)
    obs = observed_from_config(config)
    table = run_sweep(config, obs)
    att = table[table["param"] == "ATT"].drop(columns="param").reset_index(drop=True)
    qtt = table[table["param"] == "QTT"].drop(columns="param").reset_index(drop=True)
    check_sweep_anchors(att, qtt)

    out_dir.mkdir(parents=True, exist_ok=True)
    paths = out_dir / "qtt.csv", out_dir / "att.csv"
    write_table(qtt, paths[0])
    write_table(att, paths[1])
    return paths


def cmd_reproduce(args: argparse.Namespace) -> int:
    """Reproduce the delta sweep of QTT(0.5) and ATT under both assumptions."""
    for path in reproduce_sweep_tables(Path(args.out_dir), args.n_knots):
        logger.info("Wrote %s", path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:  # noqa: D103
    parser = argparse.ArgumentParser(
        prog="quantile-independence",
        description="Identified sets for treatment effects under quantile independence.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level")
    commands = parser.add_subparsers(dest="command", required=True)

    bounds = commands.add_parser("bounds", help="sweep identified sets over delta")
    bounds.add_argument("--config", help="flat 'key = value' settings file")
    source = bounds.add_mutually_exclusive_group()
    source.add_argument("--dgp", action="store_true", help="use the truncated-normal model")
    source.add_argument("--csv", help="y,x samples to ingest")
    bounds.add_argument("--gamma", type=float)
    bounds.add_argument("--pi", type=float)
    bounds.add_argument("--p1", type=float)
    bounds.add_argument("--delta-grid", help="d1,d2,... or start:stop:count")
    bounds.add_argument("--param", action="append", choices=["ATT", "QTT"])
    bounds.add_argument("--spec", action="append", choices=["T", "U"])
    bounds.add_argument("--q", type=float)
    bounds.add_argument("--n-knots", type=int)
    bounds.add_argument("--n-cells", type=int, help="grid resolution of the oracle columns")
    bounds.add_argument(
        "--oracle", action="store_true", help="add ATT endpoints from the grid oracle"
    )
    bounds.add_argument("--out", help="output CSV; standard output when omitted")
    bounds.set_defaults(handler=cmd_bounds)

    check = commands.add_parser("check", help="check a propensity JSON file")
    check.add_argument("propensity")
    check.add_argument("--spec", required=True, help="e.g. T={0.5}, U=[0.25,0.75], mean")
    check.set_defaults(handler=cmd_check)

    verify = commands.add_parser("verify", help="certify cdf bounds with the grid oracle")
    verify.add_argument("--spec", required=True)
    verify.add_argument("--p-x", type=float, required=True)
    verify.add_argument("--n-cells", type=int, default=1000)
    verify.add_argument("--simplex-stride", type=int, default=10)
    verify.set_defaults(handler=cmd_verify)

    reproduce = commands.add_parser("reproduce", help="reproduce the delta sweep tables")
    reproduce.add_argument("out_dir")
    reproduce.add_argument("--n-knots", type=int, default=4096)
    reproduce.set_defaults(handler=cmd_reproduce)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the ``quantile-independence`` console script."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INPUT
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.handler(args)
    except AnchorMismatchError as e:
        print(f"anchor mismatch: {e}", file=sys.stderr)
        return EXIT_FAILED
    except QuantileIndependenceError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
