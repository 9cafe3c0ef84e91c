from .registry import register_suite
from .suites import (
    endpoint_suite,
    eqell_suite,
    kronecker_suite,
    witness_suite,
)

register_suite(
    name="endpoint",
    max_dim=10,
    func=endpoint_suite,
)

register_suite(
    name="kronecker",
    max_dim=8,
    func=kronecker_suite,
)

register_suite(
    name="eqell",
    max_dim=14,
    func=eqell_suite,
)

register_suite(
    name="witness",
    max_dim=2,
    func=witness_suite,
)
