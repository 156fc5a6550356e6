import os
import sys

import pytest
from hypothesis import HealthCheck, settings

from cat0lab import Euclidean, PoincareDisk, path4, star3

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(params=["euclidean:2", "euclidean:5", "disk", "tree:star3", "tree:path4"])
def any_space(request):
    return {"euclidean:2": lambda: Euclidean(2), "euclidean:5": lambda: Euclidean(5),
            "disk": PoincareDisk, "tree:star3": star3, "tree:path4": path4}[request.param]()


@pytest.fixture(params=["euclidean:2", "disk", "tree:star3"])
def model_space(request):
    return {"euclidean:2": lambda: Euclidean(2), "disk": PoincareDisk,
            "tree:star3": star3}[request.param]()


VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(VERDICTS, key=lambda s: int(s.split("[")[1].split("]")[0])):
            terminalreporter.write_line(line)
