"""
Weight families γ = (γ_u) over subsets of [s].

Every scheme has a downward-closed support U = {u : γ_u > 0} containing the
empty set, so the anchored and ANOVA spaces coincide as sets.
"""
import logging
import math
from pathlib import Path
from typing import Dict, List, Literal, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt, ValidationError, field_validator, model_validator

from .config import MAX_ENUM_DIM
from .errors import CapacityError, InputError
from .subset_lattice import (
    SubsetMask,
    cardinality,
    coordinates,
    diameter,
    enumerate_subsets,
    format_mask,
    is_downward_closed,
    mask_from_coordinates,
    sets_of_cardinality,
    sets_with_diameter,
)

logger = logging.getLogger(__name__)

# (|u|!)^β1 switches to log-space above this cardinality
FACTORIAL_LOG_CUTOFF = 20


class WeightScheme(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: str

    def weight(self, u: SubsetMask) -> float:
        raise NotImplementedError

    def log_weight(self, u: SubsetMask) -> float:
        w = self.weight(u)
        return math.log(w) if w > 0 else -math.inf

    def active_sets(self, s: int) -> List[SubsetMask]:
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError

    def check_dimension(self, s: int) -> None:
        if s < 1:
            raise InputError(f"dimension must be positive, got {s}")

    def _dense_active_sets(self, s: int) -> List[SubsetMask]:
        self.check_dimension(s)
        return list(enumerate_subsets(s))

    def dense_weights(self, s: int) -> np.ndarray:
        """γ_u for all 2^s masks, zero outside the support."""
        self.check_dimension(s)
        out = np.zeros(1 << s)
        for u in self.active_sets(s):
            out[u] = self.weight(u)
        return out

    def log_weights(self, masks: List[SubsetMask]) -> np.ndarray:
        return np.array([self.log_weight(u) for u in masks], dtype=float)


# -------------------------------
# Product weights
# -------------------------------
class ProductWeights(WeightScheme):
    kind: Literal["product"] = "product"
    gammas: Tuple[PositiveFloat, ...] = Field(min_length=1)

    def check_dimension(self, s: int) -> None:
        super().check_dimension(s)
        if s > len(self.gammas):
            raise InputError(
                f"product weights define {len(self.gammas)} coordinates, s={s} requested"
            )

    def weight(self, u: SubsetMask) -> float:
        w = 1.0
        for j in coordinates(u):
            if j > len(self.gammas):
                raise InputError(f"coordinate {j} has no product weight")
            w *= self.gammas[j - 1]
        return w

    def log_weight(self, u: SubsetMask) -> float:
        return sum(math.log(self.gammas[j - 1]) for j in coordinates(u))

    def active_sets(self, s: int) -> List[SubsetMask]:
        return self._dense_active_sets(s)

    def factors(self, s: int) -> Tuple[float, ...]:
        self.check_dimension(s)
        return self.gammas[:s]

    def describe(self) -> str:
        shown = ",".join(f"{g:g}" for g in self.gammas[:6])
        more = ",..." if len(self.gammas) > 6 else ""
        return f"product(gammas={shown}{more})"


# -------------------------------
# Finite order weights
# -------------------------------
class FiniteOrderWeights(WeightScheme):
    kind: Literal["fow"] = "fow"
    omega: PositiveFloat
    q: PositiveInt

    def weight(self, u: SubsetMask) -> float:
        k = cardinality(u)
        return self.omega ** k if k <= self.q else 0.0

    def active_sets(self, s: int) -> List[SubsetMask]:
        self.check_dimension(s)
        out = []
        for k in range(min(self.q, s) + 1):
            out.extend(sets_of_cardinality(s, k))
        out.sort()
        return out

    def describe(self) -> str:
        return f"fow(omega={self.omega:g},q={self.q})"


# -------------------------------
# Finite diameter weights
# -------------------------------
class FiniteDiameterWeights(WeightScheme):
    kind: Literal["fdw"] = "fdw"
    omega: PositiveFloat
    q: PositiveInt

    def weight(self, u: SubsetMask) -> float:
        return self.omega ** cardinality(u) if diameter(u) <= self.q else 0.0

    def active_sets(self, s: int) -> List[SubsetMask]:
        self.check_dimension(s)
        out = []
        for ell in range(min(self.q, s - 1) + 1):
            out.extend(sets_with_diameter(s, ell))
        out.sort()
        return out

    def describe(self) -> str:
        return f"fdw(omega={self.omega:g},q={self.q})"


# -------------------------------
# Product order-dependent weights
# -------------------------------
class PODWeights(WeightScheme):
    kind: Literal["pod"] = "pod"
    c: PositiveFloat
    beta1: PositiveFloat
    beta2: PositiveFloat

    @model_validator(mode="after")
    def _ordered_betas(self):
        if not self.beta1 < self.beta2:
            raise ValueError(f"POD weights need beta1 < beta2, got {self.beta1} >= {self.beta2}")
        return self

    def log_weight(self, u: SubsetMask) -> float:
        js = coordinates(u)
        return self.beta1 * math.lgamma(len(js) + 1) + sum(
            math.log(self.c) - self.beta2 * math.log(j) for j in js
        )

    def weight(self, u: SubsetMask) -> float:
        js = coordinates(u)
        if len(js) > FACTORIAL_LOG_CUTOFF:
            return math.exp(self.log_weight(u))
        w = float(math.factorial(len(js))) ** self.beta1
        for j in js:
            w *= self.c / j ** self.beta2
        return w

    def active_sets(self, s: int) -> List[SubsetMask]:
        return self._dense_active_sets(s)

    def describe(self) -> str:
        return f"pod(c={self.c:g},beta1={self.beta1:g},beta2={self.beta2:g})"


# -------------------------------
# Explicit weight tables
# -------------------------------
class ExplicitWeights(WeightScheme):
    kind: Literal["explicit"] = "explicit"
    table: Dict[int, PositiveFloat]

    @field_validator("table")
    @classmethod
    def _downward_closed(cls, table):
        if not table:
            raise ValueError("explicit weight table is empty")
        if any(u < 0 for u in table):
            raise ValueError("negative subset mask in weight table")
        if not is_downward_closed(set(table)):
            raise ValueError("support of the weight table is not downward closed")
        return table

    @property
    def dimension(self) -> int:
        return max(u.bit_length() for u in self.table)

    def check_dimension(self, s: int) -> None:
        super().check_dimension(s)
        if s < self.dimension:
            raise InputError(f"weight table uses coordinate {self.dimension}, s={s} requested")
        if s > MAX_ENUM_DIM:
            raise CapacityError(f"explicit weights at s={s} exceed the enumeration cap")

    def weight(self, u: SubsetMask) -> float:
        return self.table.get(u, 0.0)

    def active_sets(self, s: int) -> List[SubsetMask]:
        self.check_dimension(s)
        return sorted(self.table)

    def describe(self) -> str:
        return f"explicit(sets={len(self.table)})"


SCHEMES = {
    "product": ProductWeights,
    "fow": FiniteOrderWeights,
    "fdw": FiniteDiameterWeights,
    "pod": PODWeights,
    "explicit": ExplicitWeights,
}


def make_scheme(kind: str, **params) -> WeightScheme:
    """Build a scheme by tag; validation failures surface as InputError."""
    if kind not in SCHEMES:
        raise InputError(f"unknown weight scheme '{kind}' (choose from {', '.join(SCHEMES)})")
    try:
        return SCHEMES[kind](**params)
    except ValidationError as e:
        msgs = "; ".join(err["msg"] for err in e.errors())
        raise InputError(f"invalid {kind} weights: {msgs}") from e


# -------------------------------
# Explicit weight files
# -------------------------------
def parse_explicit(text: str) -> ExplicitWeights:
    """
    One entry per line: comma separated 1-based coordinates (or "empty"),
    whitespace, positive decimal. Lines starting with '#' are comments.
    """
    table: Dict[int, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InputError(f"line {lineno}: expected '<subset> <weight>', got '{line}'")
        subset, value = parts
        try:
            if subset.lower() == "empty":
                u = 0
            else:
                u = mask_from_coordinates(int(tok) for tok in subset.split(","))
            w = float(value)
        except ValueError as e:
            raise InputError(f"line {lineno}: cannot parse '{line}'") from e
        if u in table:
            raise InputError(f"line {lineno}: duplicate subset {format_mask(u)}")
        table[u] = w
    logger.debug("parsed %d explicit weights", len(table))
    return make_scheme("explicit", table=table)


def load_explicit(path: str | Path) -> ExplicitWeights:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read weight file {path}: {e}") from e
    return parse_explicit(text)
