import math
from fractions import Fraction
from typing import List, Tuple

from .errors import InputError


def parse_p(text: str) -> float:
    """Decimal, fraction ("3/2") or "inf"."""
    token = text.strip().lower()
    if token in ("inf", "infinity", "+inf"):
        return math.inf
    try:
        value = float(Fraction(token))
    except (ValueError, ZeroDivisionError) as e:
        raise InputError(f"cannot parse p from '{text}'") from e
    if math.isnan(value) or value < 1.0:
        raise InputError(f"p must lie in [1, inf], got {text}")
    return value


def parse_float_list(text: str) -> Tuple[float, ...]:
    try:
        values = tuple(float(Fraction(tok.strip())) for tok in text.split(",") if tok.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise InputError(f"cannot parse number list '{text}'") from e
    if not values:
        raise InputError("empty number list")
    return values


def parse_s_range(text: str) -> List[int]:
    """
    a:b[:log|:lin][:step]. log (the default) doubles from a, lin steps by
    step (default 1); b is always included.
    """
    parts = [p.strip() for p in text.split(":")]
    if len(parts) < 2 or len(parts) > 4:
        raise InputError(f"s-range must look like a:b[:log|:lin][:step], got '{text}'")
    try:
        start, stop = int(parts[0]), int(parts[1])
        mode = parts[2].lower() if len(parts) > 2 else "log"
        step = int(parts[3]) if len(parts) > 3 else (2 if mode == "log" else 1)
    except ValueError as e:
        raise InputError(f"cannot parse s-range '{text}'") from e
    if start < 1 or stop < start:
        raise InputError(f"s-range needs 1 <= a <= b, got '{text}'")
    if mode not in ("log", "lin"):
        raise InputError(f"s-range spacing must be 'log' or 'lin', got '{mode}'")
    if (mode == "log" and step < 2) or step < 1:
        raise InputError(f"invalid s-range step {step} for {mode} spacing")

    values = []
    s = start
    while s < stop:
        values.append(s)
        s = s * step if mode == "log" else s + step
    values.append(stop)
    return values
