import json
import logging
from pathlib import Path
from typing import List, Optional

import typer
from joblib import Parallel, delayed

from .. import config, deps
from ..bounds import build_report, classify_growth, fit_growth_rate
from ..embedding_operator import ExponentPair
from ..errors import InputError
from ..schemas import BoundReport, RunConfig, SolverSettings
from ..utils_parse import parse_p, parse_s_range
from ..utils_report import growth_summary, render_csv, report_dict
from ..weights import FiniteDiameterWeights, WeightScheme

logger = logging.getLogger(__name__)

MIN_FIT_POINTS = 5


def run_scan(
    scheme: WeightScheme,
    s_values: List[int],
    exps: ExponentPair,
    settings: SolverSettings,
    jobs: int = 1,
) -> List[BoundReport]:
    """One report per s, in the order of s_values whatever the worker count."""
    if jobs == 1:
        return [build_report(scheme, s, exps, settings) for s in s_values]
    return Parallel(n_jobs=jobs)(delayed(build_report)(scheme, s, exps, settings) for s in s_values)


def growth_offset(scheme: WeightScheme, s_values: List[int]) -> float:
    """Finite-diameter norms grow in s - q; everything else in s."""
    if isinstance(scheme, FiniteDiameterWeights) and min(s_values) > scheme.q:
        return float(scheme.q)
    return 0.0


def summarize(scheme: WeightScheme, reports: List[BoundReport]):
    pairs = [(r.s, r.lower_bound) for r in reports]
    offset = growth_offset(scheme, [r.s for r in reports])
    if len(pairs) < MIN_FIT_POINTS:
        return None, None, offset
    return fit_growth_rate(pairs, offset), classify_growth(pairs, offset), offset


def scan(
    weights: str = deps.WEIGHTS_OPTION,
    gammas: Optional[str] = deps.GAMMAS_OPTION,
    omega: Optional[float] = deps.OMEGA_OPTION,
    q: Optional[int] = deps.Q_OPTION,
    c: Optional[float] = deps.C_OPTION,
    beta1: Optional[float] = deps.BETA1_OPTION,
    beta2: Optional[float] = deps.BETA2_OPTION,
    file: Optional[Path] = deps.FILE_OPTION,
    p: str = deps.P_OPTION,
    s: Optional[int] = typer.Option(None, "--s", help="Single dimension"),
    s_range: Optional[str] = typer.Option(None, "--s-range", help="a:b[:log|:lin][:step]"),
    out: str = typer.Option("csv", "--out", help="csv | json"),
    tol: Optional[float] = deps.TOL_OPTION,
    seed: int = deps.SEED_OPTION,
    max_iters: Optional[int] = deps.MAX_ITERS_OPTION,
    jobs: int = typer.Option(config.N_JOBS, "--jobs", help="Parallel workers over s"),
):
    """Scaling study: one CSV row per s plus a fitted growth exponent."""
    with deps.cli_errors():
        if (s is None) == (s_range is None):
            raise InputError("give exactly one of --s and --s-range")
        s_values = [s] if s is not None else parse_s_range(s_range)
        scheme = deps.get_scheme(weights, gammas, omega, q, c, beta1, beta2, file)
        run = RunConfig(
            subcommand="scan",
            weights=scheme.kind,
            params=scheme.model_dump(exclude={"kind"}),
            s_values=tuple(s_values),
            p=parse_p(p),
            out=out,
            solver=deps.get_settings(tol, max_iters, seed),
            jobs=jobs,
        )
        if run.jobs < 1 and run.jobs != -1:
            raise InputError(f"--jobs must be positive or -1, got {run.jobs}")

        logger.info("scan %s over %d dimensions", scheme.describe(), len(s_values))
        reports = run_scan(scheme, list(run.s_values), ExponentPair.from_p(run.p), run.solver, run.jobs)
        slope, growth, offset = summarize(scheme, reports)

        if run.out == "json":
            payload = {
                "reports": [report_dict(r) for r in reports],
                "growth": {"slope": slope, "class": growth, "offset": offset},
            }
            typer.echo(json.dumps(payload, indent=2))
        else:
            typer.echo(render_csv(reports, growth_summary(slope, growth, offset)))
