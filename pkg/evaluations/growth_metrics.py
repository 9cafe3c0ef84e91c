import math

from embednorm.bounds import fit_growth_rate, local_slopes


def slope_error(pairs, expected, offset=0.0):
    return abs(fit_growth_rate(pairs, offset) - expected)


def first_exceeding(pairs, tau, log_values=False):
    """Smallest s whose value exceeds s^tau, or None. With log_values the pairs carry log(value)."""
    for s, value in pairs:
        log_value = value if log_values else math.log(value)
        if log_value > tau * math.log(s):
            return s
    return None


def is_nondecreasing(values, slack=1e-9):
    return all(b >= a - slack for a, b in zip(values, values[1:]))


def log_slopes(log_pairs):
    """Local slopes of log(value) against log(s) from (s, log value) pairs."""
    return [
        (y1 - y0) / (math.log(s1) - math.log(s0))
        for (s0, y0), (s1, y1) in zip(log_pairs, log_pairs[1:])
    ]


def relative_gap(lower, upper):
    """(upper - lower) / upper; 0 when the bounds meet, None without an upper bound."""
    if upper is None:
        return None
    return max(upper - lower, 0.0) / upper


def summarize_slopes(pairs, offset=0.0):
    slopes = local_slopes(pairs, offset)
    return {"first": slopes[0], "last": slopes[-1], "nondecreasing": is_nondecreasing(slopes)}
