"""Command-line interface for LBCV soliton classification and verification."""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from lbcv import __version__
from lbcv.catalog import classify, random_coefficients
from lbcv.errors import ConfigError, ConventionError, LbcvError, PreconditionError
from lbcv.expressions import parse_field
from lbcv.families import FAMILIES, BalancedFamily, get_family
from lbcv.geometry import (
    check_conventions,
    contracted_ricci,
    curvature_closed_form,
    lie_bracket,
    ricci,
    ricci_shift,
    sectional_curvature,
)
from lbcv.models import (
    OUTPUT_FORMATS,
    CoefficientSet,
    GeometryRow,
    RunConfig,
    SolitonCandidate,
    SolitonRow,
    SpaceParams,
    VerifyRow,
    parse_range,
)
from lbcv.reports import ReportWriter
from lbcv.solitons import sample_points, verify_candidate

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = "config.json"
SEED_ENV = "BCV_SEED"


def setup_logging(verbose: bool = False) -> None:
    """Configure logging for the CLI (stderr, so stdout stays a clean report)."""
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        stream=sys.stderr,
    )


def load_config(config_path: str) -> dict:
    """Load configuration from JSON file."""
    path = Path(config_path)
    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {config_path}")

    with open(path, "r") as f:
        return json.load(f)


def finite_float(text: str) -> float:
    """argparse type for finite reals ("nan" and "inf" are usage errors)."""
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be finite, got {text!r}")
    return value


def parse_floats(text: str) -> Tuple[float, ...]:
    """Parse "a1,a2,..." into finite floats."""
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as e:
        raise ConfigError(f"Invalid number list {text!r}: {e}") from e
    if not all(math.isfinite(v) for v in values):
        raise ConfigError(f"Numbers must be finite: {text!r}")
    return values


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, the config file's "run" object, BCV_SEED and flags (flags win)."""
    settings: Dict[str, Any] = {}
    if args.config != DEFAULT_CONFIG or Path(args.config).exists():
        logger.debug(f"Loading config from {args.config}")
        settings.update(load_config(args.config).get("run", {}))

    env_seed = os.environ.get(SEED_ENV)
    if env_seed is not None and env_seed.strip():
        try:
            settings["seed"] = int(env_seed)
        except ValueError:
            raise ConfigError(f"{SEED_ENV} must be an integer, got {env_seed!r}") from None

    overrides = {
        "lam": getattr(args, "lam", None),
        "mu": getattr(args, "mu", None),
        "grid": args.grid,
        "tolerance": args.tol,
        "seed": args.seed,
        "random_points": args.random_points,
        "output_format": args.format,
    }
    settings.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig.from_dict(settings)


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per operation."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        "-c",
        default=DEFAULT_CONFIG,
        help=f"Path to configuration file (default: {DEFAULT_CONFIG}, optional)",
    )
    common.add_argument("--verbose", "-v", action="store_true", help="Enable verbose logging")
    common.add_argument("--format", choices=OUTPUT_FORMATS, help="Report format (default: json)")
    common.add_argument("--output", "-o", help="Write the report to this file instead of stdout")
    common.add_argument("--grid", help="Sample grid xmin:xmax:n,ymin:ymax:n,zmin:zmax:n")
    common.add_argument("--tol", type=finite_float, help="Residual tolerance (default: 1e-9)")
    common.add_argument("--seed", type=int, help=f"Random seed (fallback: ${SEED_ENV}, then config)")
    common.add_argument("--random-points", type=int, help="Extra random sample points (default: 100)")

    space = argparse.ArgumentParser(add_help=False)
    space.add_argument("--lambda", dest="lam", type=finite_float, required=True, help="Bundle curvature lambda")
    space.add_argument("--mu", type=finite_float, required=True, help="Base curvature parameter mu")

    parser = argparse.ArgumentParser(
        prog="lbcv",
        description="LBCV - Ricci soliton classification and verification on Lorentzian BCV spaces",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common, space], help="Classify solitons on one space")
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("verify", parents=[common, space], help="Verify a soliton candidate")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--case", choices=sorted(FAMILIES), help="Closed-form family to verify")
    source.add_argument("--field", help='Custom frame components "X1; X2; X3" in x, y, z')
    p.add_argument("--coeffs", help="Family coefficients a1,a2,... (default: drawn from the seed)")
    p.add_argument("--a", type=finite_float, help="Case 2 shift a")
    p.add_argument("--gamma", type=finite_float, help="Soliton constant (Case 3 and custom fields)")
    p.add_argument(
        "--variant",
        choices=("corrected", "printed_x3", "printed_x2"),
        default="corrected",
        help="Case 1b field variant (the printed ones are known to fail)",
    )
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("geometry", parents=[common, space], help="Report curvature invariants")
    p.add_argument("--point", default="0,0,0", help="Reference point x,y,z for brackets (default: origin)")
    p.set_defaults(handler=cmd_geometry)

    p = sub.add_parser("sweep", parents=[common], help="Classify and verify over a (lambda, mu) grid")
    p.add_argument("--lambda-range", default="0:2:3", help="lo:hi:n for lambda (default: 0:2:3)")
    p.add_argument("--mu-range", default="-1:1:3", help="lo:hi:n for mu (default: -1:1:3)")
    p.add_argument("--workers", type=int, default=4, help="Worker threads (default: 4)")
    p.set_defaults(handler=cmd_sweep)

    return parser


def emit(args: argparse.Namespace, config: RunConfig, rows: List[dict], fieldnames: List[str], single: bool) -> None:
    writer = ReportWriter(config.output_format, args.output)
    writer.write(rows, fieldnames, single=single)


def cmd_classify(args: argparse.Namespace, config: RunConfig) -> int:
    """Print the classification of one space."""
    params = config.params
    result = classify(params)
    logger.info(f"lambda={params.lam}, mu={params.mu}: {result.kind} ({result.theorem_case})")
    row = SolitonRow(
        lam=params.lam,
        mu=params.mu,
        kind=result.kind,
        gamma=result.gamma,
        case=result.theorem_case,
        caveat=result.caveat,
    )
    emit(args, config, [row.to_dict()], SolitonRow.fieldnames(), single=True)
    return 0


def build_candidate(args: argparse.Namespace, config: RunConfig) -> SolitonCandidate:
    """The candidate selected by --case/--field, with coefficients from flags or the seed."""
    params = config.params
    if args.field:
        gamma = 0.0 if args.gamma is None else args.gamma
        return SolitonCandidate(parse_field(args.field), gamma, "custom")

    family = get_family(args.case)
    if args.case == "1b" and args.variant != "corrected":
        family = BalancedFamily(args.variant)
    family.check_case(params)

    rng = np.random.default_rng(config.seed)
    if args.coeffs:
        coeffs = CoefficientSet(parse_floats(args.coeffs))
    elif args.case == "2" and args.a is not None:
        coeffs = CoefficientSet((args.a,))
    else:
        coeffs = random_coefficients(family, rng, config.coefficient_count)

    gamma = args.gamma
    if family.free_gamma and gamma is None:
        gamma = float(rng.uniform(-2.0, 2.0))
    return family.build(params, coeffs, gamma)


def cmd_verify(args: argparse.Namespace, config: RunConfig) -> int:
    """Verify one candidate; exit 0 iff both residuals are within tolerance."""
    params = config.params
    candidate = build_candidate(args, config)
    points = sample_points(params, config)
    if len(points) == 0:
        raise PreconditionError(f"No sample points inside D for mu={params.mu}; narrow the grid")

    verification = verify_candidate(candidate, params, points)
    passed = verification.passed(config.tolerance)
    worst = verification.worst_point
    result = classify(params)
    row = VerifyRow(
        lam=params.lam,
        mu=params.mu,
        kind=result.kind,
        gamma=candidate.gamma,
        case=candidate.family,
        caveat=result.caveat,
        max_residual=verification.max_abs,
        worst_point=worst.as_tuple() if worst else None,
        grid=config.grid_spec(),
        seed=config.seed,
        system36_max=verification.system36.max_abs,
        frame_max=verification.frame.max_abs,
        per_equation=[float(v) for v in verification.system36.per_equation],
        points_evaluated=verification.system36.points_evaluated,
        tolerance=config.tolerance,
        passed=passed,
    )
    emit(args, config, [row.to_dict()], VerifyRow.fieldnames(), single=True)

    if passed:
        logger.info(f"Case {candidate.family} verified: max residual {verification.max_abs:.3e}")
        return 0
    logger.warning(
        f"Case {candidate.family} residual {verification.max_abs:.3e} exceeds tolerance {config.tolerance:g}"
    )
    return 1


def cmd_geometry(args: argparse.Namespace, config: RunConfig) -> int:
    """Report the Ricci table, curvature components and brackets.

    The closed-form table is reported only after the jet-based curvature at
    the requested (lambda, mu) and point agrees with it.
    """
    params = config.params
    xyz = parse_floats(args.point)
    if len(xyz) != 3:
        raise ConfigError(f"--point needs three coordinates, got {args.point!r}")
    point = params.point(*xyz)

    check_conventions([params], point)
    curvature = curvature_closed_form(params)
    row = GeometryRow(
        lam=params.lam,
        mu=params.mu,
        reference_point=point.as_tuple(),
        delta=float(params.delta(point.x, point.y)),
        ricci=np.diag(ricci(params)).tolist(),
        ricci_contracted=np.diag(contracted_ricci(params, point)).tolist(),
        ricci_shift=float(ricci_shift(params)[0, 0]),
        R1212=float(curvature[0, 1, 0, 1]),
        R1313=float(curvature[0, 2, 0, 2]),
        R2323=float(curvature[1, 2, 1, 2]),
        sectional=[sectional_curvature(i, j, params) for i, j in ((1, 2), (1, 3), (2, 3))],
        bracket_12=lie_bracket(1, 2, params, point).c.tolist(),
        bracket_13=lie_bracket(1, 3, params, point).c.tolist(),
        bracket_23=lie_bracket(2, 3, params, point).c.tolist(),
    )
    emit(args, config, [row.to_dict()], GeometryRow.fieldnames(), single=True)
    return 0


def sweep_cell(params: SpaceParams, seed: np.random.SeedSequence, config: RunConfig) -> Tuple[SolitonRow, bool]:
    """Classify one cell and, when a family exists there, verify a seeded member."""
    result = classify(params)
    row = SolitonRow(
        lam=params.lam,
        mu=params.mu,
        kind=result.kind,
        gamma=result.gamma,
        case=result.theorem_case,
        caveat=result.caveat,
        grid=config.grid_spec(),
        seed=config.seed,
    )
    if result.family is None:
        return row, True

    family = get_family(result.family)
    rng = np.random.default_rng(seed)
    coeffs = random_coefficients(family, rng, config.coefficient_count)
    gamma = float(rng.uniform(-2.0, 2.0)) if family.free_gamma else None
    candidate = family.build(params, coeffs, gamma)
    verification = verify_candidate(candidate, params, config=config)
    worst = verification.worst_point
    row.max_residual = verification.max_abs
    row.worst_point = worst.as_tuple() if worst else None
    return row, verification.passed(config.tolerance)


def cmd_sweep(args: argparse.Namespace, config: RunConfig) -> int:
    """Classification map over a grid of (lambda, mu), verified cell by cell."""
    lam_lo, lam_hi, n_lam = parse_range(args.lambda_range)
    mu_lo, mu_hi, n_mu = parse_range(args.mu_range)
    if args.workers < 1:
        raise ConfigError(f"--workers must be at least 1, got {args.workers}")

    cells = [
        SpaceParams(float(lam), float(mu))
        for lam in np.linspace(lam_lo, lam_hi, n_lam)
        for mu in np.linspace(mu_lo, mu_hi, n_mu)
    ]
    seeds = np.random.SeedSequence(config.seed).spawn(len(cells))
    logger.info(f"Sweeping {len(cells)} cells with {args.workers} workers")

    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        results = list(pool.map(lambda job: sweep_cell(job[0], job[1], config), zip(cells, seeds)))

    results.sort(key=lambda r: (r[0].lam, r[0].mu))
    rows = [row.to_dict() for row, _ in results]
    emit(args, config, rows, SolitonRow.fieldnames(), single=False)

    failed = [row for row, ok in results if not ok]
    for row in failed:
        logger.warning(f"Cell lambda={row.lam}, mu={row.mu}: residual {row.max_residual:.3e} exceeds tolerance")
    logger.info(f"Sweep complete: {len(results)} cells, {len(failed)} failed")
    return 1 if failed else 0


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the CLI."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 0

    setup_logging(verbose=args.verbose)

    try:
        check_conventions()
        config = resolve_config(args)
        return args.handler(args, config)

    except ConventionError as e:
        logger.error(f"Curvature convention self-test failed: {e}")
        return 1
    except FileNotFoundError as e:
        logger.error(str(e))
        return 2
    except (LbcvError, ValueError) as e:
        logger.error(str(e))
        return 2
    except Exception as e:
        logger.exception(f"Error during {args.command}: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
