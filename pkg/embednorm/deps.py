import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Optional

import typer
from pydantic import ValidationError

from .errors import EmbedNormError, InputError
from .schemas import SolverSettings
from .utils_parse import parse_float_list
from .weights import WeightScheme, load_explicit, make_scheme

logger = logging.getLogger(__name__)

# -------------------------------
# Shared options
# -------------------------------
WEIGHTS_OPTION = typer.Option(..., "--weights", help="product | fow | fdw | pod | explicit")
GAMMAS_OPTION = typer.Option(None, "--gammas", help="Product weights, comma separated")
OMEGA_OPTION = typer.Option(None, "--omega", help="Finite order / diameter base weight")
Q_OPTION = typer.Option(None, "--q", help="Finite order / diameter cutoff")
C_OPTION = typer.Option(None, "--c", help="POD constant c")
BETA1_OPTION = typer.Option(None, "--beta1", help="POD order exponent")
BETA2_OPTION = typer.Option(None, "--beta2", help="POD coordinate decay exponent")
FILE_OPTION = typer.Option(None, "--file", help="Explicit weight table")
P_OPTION = typer.Option("2", "--p", help="Exponent: decimal, fraction like 3/2, or inf")
TOL_OPTION = typer.Option(None, "--tol", help="Relative stopping tolerance of the power method")
SEED_OPTION = typer.Option(0, "--seed", help="Seed for random starts and sampled checks")
MAX_ITERS_OPTION = typer.Option(None, "--max-iters", help="Iteration cap of the power method")


def get_scheme(
    weights: str,
    gammas: Optional[str] = None,
    omega: Optional[float] = None,
    q: Optional[int] = None,
    c: Optional[float] = None,
    beta1: Optional[float] = None,
    beta2: Optional[float] = None,
    file: Optional[Path] = None,
) -> WeightScheme:
    """Weight scheme from CLI options; missing parameters are input errors."""
    kind = weights.lower()
    if kind == "explicit":
        if file is None:
            raise InputError("--weights explicit needs --file")
        return load_explicit(file)
    if kind == "product":
        if gammas is None:
            raise InputError("--weights product needs --gammas")
        return make_scheme("product", gammas=parse_float_list(gammas))
    if kind in ("fow", "fdw"):
        if omega is None or q is None:
            raise InputError(f"--weights {kind} needs --omega and --q")
        return make_scheme(kind, omega=omega, q=q)
    if kind == "pod":
        if c is None or beta1 is None or beta2 is None:
            raise InputError("--weights pod needs --c, --beta1 and --beta2")
        return make_scheme("pod", c=c, beta1=beta1, beta2=beta2)
    return make_scheme(kind)


def get_settings(tol: Optional[float], max_iters: Optional[int], seed: int) -> SolverSettings:
    overrides = {"seed": seed}
    if tol is not None:
        overrides["tol"] = tol
    if max_iters is not None:
        overrides["max_iters"] = max_iters
    try:
        return SolverSettings(**overrides)
    except ValidationError as e:
        raise InputError("; ".join(err["msg"] for err in e.errors())) from e


@contextmanager
def cli_errors():
    """Turn library errors into an exit code with the detail on stderr."""
    try:
        yield
    except EmbedNormError as e:
        logger.debug("exit %d: %s", e.exit_code, e.detail)
        typer.echo(f"error: {e.detail}", err=True)
        raise typer.Exit(code=e.exit_code)
    except ValidationError as e:
        typer.echo(f"error: {'; '.join(err['msg'] for err in e.errors())}", err=True)
        raise typer.Exit(code=InputError.exit_code)
