import math
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from . import config

# ---------- Solver ----------

class SolverSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    tol: float = Field(default=config.PNORM_TOL, gt=0)
    max_iters: int = Field(default=config.PNORM_MAX_ITERS, gt=0)
    random_starts: int = Field(default=config.RANDOM_STARTS, ge=0)
    seed: int = 0
    spectral_tol: float = Field(default=config.SPECTRAL_TOL, gt=0)
    spectral_max_iters: int = Field(default=config.SPECTRAL_MAX_ITERS, gt=0)


# ---------- Matrix norms ----------

PNormMethod = Literal["column_sum", "row_sum", "spectral", "power_method", "kronecker", "closed_form"]


class PNormResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    value: float
    method: PNormMethod
    iterations: int = 0
    residual: float = 0.0
    witness: Optional[np.ndarray] = None
    # Kronecker path: one 2-vector per coordinate instead of a 2^s witness
    factor_witnesses: Optional[np.ndarray] = None
    trace: Optional[List[float]] = None
    # which start or closed-form candidate produced value
    candidate: str = ""


# ---------- Reports ----------

class BoundReport(BaseModel):
    scheme: str
    s: int
    p: float
    lower_bound: float
    lower_bound_simple: float
    exact: Optional[float] = None
    upper_bound: Optional[float] = None
    method: str
    iterations: int = 0
    residual: float = 0.0
    candidate: str = ""
    witness_summary: str = ""

    def p_label(self):
        return "inf" if math.isinf(self.p) else self.p


# ---------- CLI ----------

class RunConfig(BaseModel):
    subcommand: Literal["compute", "scan", "verify"]
    weights: Optional[str] = None
    params: dict = Field(default_factory=dict)
    s_values: Tuple[int, ...] = ()
    p: float = 2.0
    out: Literal["json", "csv", "text"] = "json"
    solver: SolverSettings = Field(default_factory=SolverSettings)
    jobs: int = 1

    @field_validator("p")
    @classmethod
    def _p_range(cls, p):
        if math.isnan(p) or p < 1:
            raise ValueError(f"p must lie in [1, inf], got {p}")
        return p

    @model_validator(mode="after")
    def _needs_dimension(self):
        if self.subcommand != "verify" and not self.s_values:
            raise ValueError("s-range is empty")
        if any(s < 1 for s in self.s_values):
            raise ValueError("dimensions must be positive")
        return self


class SuiteResult(BaseModel):
    name: str
    passed: bool
    cases: int
    worst_residual: float
    detail: str = ""
