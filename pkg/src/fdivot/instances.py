"""Seeded random problem instances."""

from __future__ import annotations

import math

import numpy as np

from .errors import InputError
from .problem import DiscreteProblem

COST_LAWS = ("uniform",)
MARGINAL_LAWS = ("dirichlet", "uniform")

SUITE_SEEDS = range(1, 101)
SUITE_LAMBDA_RANGE = (0.05, 1.0)


def _marginal(rng: np.random.Generator, k: int, law: str) -> np.ndarray:
    if law == "dirichlet":
        w = rng.dirichlet(np.ones(k))
    elif law == "uniform":
        w = np.ones(k)
    else:
        raise InputError(f"unknown marginal law {law!r}; expected one of {MARGINAL_LAWS}")
    return w / w.sum()


def random_problem(
    seed: int | np.random.Generator,
    n: int,
    m: int,
    lam: float = 1.0,
    cost_law: str = "uniform",
    marginal_law: str = "dirichlet",
) -> DiscreteProblem:
    """Costs uniform on [0, 1] and Dirichlet(1) marginals, all from one seeded stream."""
    if n < 2 or m < 2:
        raise InputError("n and m must be at least 2")
    if cost_law not in COST_LAWS:
        raise InputError(f"unknown cost law {cost_law!r}; expected one of {COST_LAWS}")
    rng = np.random.default_rng(seed)
    cost = rng.uniform(0.0, 1.0, size=(n, m))
    px = _marginal(rng, n, marginal_law)
    py = _marginal(rng, m, marginal_law)
    return DiscreteProblem(px, py, cost, lam)


def suite_instance(seed: int) -> DiscreteProblem:
    """Instance ``seed`` of the validation suite.

    Sizes are drawn from ``{2, ..., 10}`` and ``lam`` log-uniformly from
    ``[0.05, 1]``, then the cost and marginals follow from the same stream.
    """
    rng = np.random.default_rng(seed)
    n, m = (int(k) for k in rng.integers(2, 11, size=2))
    lo, hi = SUITE_LAMBDA_RANGE
    lam = float(math.exp(rng.uniform(math.log(lo), math.log(hi))))
    return random_problem(rng, n, m, lam)
