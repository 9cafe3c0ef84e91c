import logging
from typing import List, Optional

import typer
from joblib import Parallel, delayed

from .. import config, deps
from ..checks.registry import SUITE_REGISTRY
from ..errors import CapacityError, InputError, VerificationError
from ..schemas import RunConfig, SuiteResult
import embednorm.checks.register  # noqa: F401  ensures registry is populated

logger = logging.getLogger(__name__)


def run_suites(names: List[str], max_s: int, seed: int, jobs: int = 1) -> List[SuiteResult]:
    """Run the named suites, each at min(max_s, its own dimension cap)."""
    if max_s < 1:
        raise InputError(f"--max-s must be positive, got {max_s}")
    if max_s > config.MAX_ENUM_DIM:
        raise CapacityError(
            f"--max-s {max_s} exceeds the enumeration cap s <= {config.MAX_ENUM_DIM} of the dense suites"
        )
    unknown = [n for n in names if n not in SUITE_REGISTRY]
    if unknown:
        raise InputError(f"unknown suite(s) {', '.join(unknown)} (choose from {', '.join(SUITE_REGISTRY)})")

    calls = [
        (SUITE_REGISTRY[name]["func"], min(max_s, SUITE_REGISTRY[name]["max_dim"]))
        for name in names
    ]
    if jobs == 1:
        return [func(dim, seed) for func, dim in calls]
    return Parallel(n_jobs=jobs)(delayed(func)(dim, seed) for func, dim in calls)


def verify(
    max_s: int = typer.Option(10, "--max-s", help="Largest dimension the suites may use"),
    seed: int = deps.SEED_OPTION,
    suite: Optional[List[str]] = typer.Option(None, "--suite", help="Run only these suites (repeatable)"),
    jobs: int = typer.Option(config.N_JOBS, "--jobs", help="Parallel workers over suites"),
):
    """Oracle suites: endpoint sharpness, Kronecker products, diameter counts, witness quadrature."""
    with deps.cli_errors():
        RunConfig(subcommand="verify", s_values=(max_s,), jobs=jobs)
        names = list(suite) if suite else list(SUITE_REGISTRY)
        results = run_suites(names, max_s, seed, jobs)

        for r in results:
            status = "PASS" if r.passed else "FAIL"
            line = f"{status} {r.name:<10} cases={r.cases} worst_residual={r.worst_residual:.3e}"
            if r.detail:
                line += f" {r.detail}"
            typer.echo(line)

        failed = [r.name for r in results if not r.passed]
        if failed:
            raise VerificationError(f"failed suites: {', '.join(failed)}")
