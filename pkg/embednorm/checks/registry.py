from typing import Callable, Dict

from ..schemas import SuiteResult

SuiteFunc = Callable[[int, int], SuiteResult]

SUITE_REGISTRY: Dict[str, Dict] = {}


def register_suite(
    name: str,
    max_dim: int,
    func: SuiteFunc,
):
    SUITE_REGISTRY[name] = {
        "max_dim": max_dim,
        "func": func,
    }
