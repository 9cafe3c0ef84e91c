import logging
from pathlib import Path
from typing import Optional

import typer

from .. import deps
from ..bounds import build_report
from ..embedding_operator import ExponentPair
from ..schemas import RunConfig
from ..utils_parse import parse_p
from ..utils_report import csv_header, csv_row, render_json, render_text

logger = logging.getLogger(__name__)


def compute(
    weights: str = deps.WEIGHTS_OPTION,
    gammas: Optional[str] = deps.GAMMAS_OPTION,
    omega: Optional[float] = deps.OMEGA_OPTION,
    q: Optional[int] = deps.Q_OPTION,
    c: Optional[float] = deps.C_OPTION,
    beta1: Optional[float] = deps.BETA1_OPTION,
    beta2: Optional[float] = deps.BETA2_OPTION,
    file: Optional[Path] = deps.FILE_OPTION,
    p: str = deps.P_OPTION,
    s: int = typer.Option(..., "--s", help="Dimension"),
    out: str = typer.Option("json", "--out", help="json | csv | text"),
    tol: Optional[float] = deps.TOL_OPTION,
    seed: int = deps.SEED_OPTION,
    max_iters: Optional[int] = deps.MAX_ITERS_OPTION,
):
    """Bounds and exact values of the embedding norm for one (weights, s, p)."""
    with deps.cli_errors():
        scheme = deps.get_scheme(weights, gammas, omega, q, c, beta1, beta2, file)
        run = RunConfig(
            subcommand="compute",
            weights=scheme.kind,
            params=scheme.model_dump(exclude={"kind"}),
            s_values=(s,),
            p=parse_p(p),
            out=out,
            solver=deps.get_settings(tol, max_iters, seed),
        )
        logger.info("compute %s s=%d p=%s", scheme.describe(), s, p)
        report = build_report(scheme, s, ExponentPair.from_p(run.p), run.solver)

        if run.out == "csv":
            typer.echo(csv_header())
            typer.echo(csv_row(report))
        elif run.out == "text":
            typer.echo(render_text(report))
        else:
            typer.echo(render_json(report))
