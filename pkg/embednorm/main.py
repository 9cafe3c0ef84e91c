import logging

import coloredlogs
import typer

from . import config
from .commands import compute, scan, verify

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

# -------------------------------
# CLI app
# -------------------------------
app = typer.Typer(
    name="embednorm",
    help="Norms of the embedding between weighted anchored and ANOVA spaces.",
    add_completion=False,
    no_args_is_help=True,
)


@app.callback()
def main(
    log_level: str = typer.Option(config.LOG_LEVEL, "--log-level", help="DEBUG, INFO, WARNING or ERROR"),
):
    level = log_level.upper()
    if level not in LOG_LEVELS:
        raise typer.BadParameter(f"unknown log level {log_level}", param_hint="--log-level")
    # diagnostics go to stderr, reports to stdout
    coloredlogs.install(level=level, fmt="%(asctime)s %(name)s %(levelname)s %(message)s")
    logging.getLogger(__name__).debug("log level %s", level)


# -------------------------------
# Commands
# -------------------------------
app.command("compute")(compute.compute)
app.command("scan")(scan.scan)
app.command("verify")(verify.verify)


if __name__ == "__main__":
    app()
