import numpy as np
import pytest

from fdivot import kernels
from fdivot.generators import make_generator
from fdivot.problem import DiscreteProblem

ALL_KEYS = ["kl", "reverse_kl", "jensen_shannon", "hellinger_sq", "alpha:0.5"]

_ACCEPTANCE_LINES = []


@pytest.fixture(params=ALL_KEYS)
def gen(request):
    return make_generator(request.param)


@pytest.fixture
def benchmark_problem():
    return DiscreteProblem([0.5, 0.5], [0.5, 0.5], [[0.0, 1.0], [1.0, 0.0]], 1.0)


@pytest.fixture(params=["compiled", "python"])
def backend(request, monkeypatch):
    if request.param == "compiled":
        fn = kernels.compiled_half_sweep()
        if fn is None:
            pytest.skip("compiled kernel not built")
    else:
        fn = kernels.python_half_sweep
    monkeypatch.setattr(kernels, "half_sweep", fn)
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


@pytest.fixture
def record_criterion():
    def record(label, passed, detail=""):
        line = f"{'PASS' if passed else 'FAIL'}  {label}  {detail}".rstrip()
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
