"""Generalized Sinkhorn: alternating exact maximization of the dual in each coordinate.

Each coordinate update solves the scalar monotone equation

    h(t) = sum_j marg_j * inv((t + other_j - cost_j) / lam) = 1,

where ``inv`` is the inverse of the generator's derivative. Row sweeps update
every ``f_i`` against a frozen ``g`` and column sweeps the converse. The
optimal coupling is read off the potentials in closed form.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, NamedTuple

import numpy as np

from . import kernels
from .errors import DomainError, InputError
from .generators import Generator
from .problem import (
    Coupling,
    DiscreteProblem,
    Potentials,
    check_admissible,
    default_margin,
    dual_objective,
    marginal_residuals,
    primal_objective,
)

__all__ = [
    "SolverConfig",
    "SolveReport",
    "Solution",
    "coordinate_update",
    "solve",
    "recover_coupling",
]


@dataclass(frozen=True)
class SolverConfig:
    outer_tol: float = 1e-8
    inner_tol: float = 1e-12
    max_outer_iters: int = 10_000
    max_inner_iters: int = 200
    admissibility_margin: float | None = None
    # a run only counts as converged once primal - dual >= -gap_floor as well
    gap_floor: float = 1e-9

    def __post_init__(self):
        if not (self.outer_tol > 0 and self.inner_tol > 0):
            raise InputError("tolerances must be positive")
        if self.inner_tol >= self.outer_tol:
            raise InputError("inner_tol must be smaller than outer_tol")
        if self.max_outer_iters < 1 or self.max_inner_iters < 1:
            raise InputError("iteration limits must be positive")
        if self.admissibility_margin is not None and not self.admissibility_margin > 0:
            raise InputError("admissibility_margin must be positive")

    def margin_for(self, gen: Generator) -> float:
        if self.admissibility_margin is not None:
            return self.admissibility_margin
        return default_margin(gen)


@dataclass(frozen=True)
class SolveReport:
    iterations: int
    residual_row: float
    residual_col: float
    primal_value: float
    dual_value: float
    duality_gap: float
    admissible: bool
    admissibility_slack: float
    converged: bool
    cost_shift: float
    clamped_updates: int
    backend: str

    def as_dict(self) -> dict:
        return asdict(self)


class Solution(NamedTuple):
    potentials: Potentials
    coupling: Coupling
    report: SolveReport


def coordinate_update(
    gen: Generator,
    lam: float,
    fixed_pot,
    fixed_marginal,
    cost_slice,
    config: SolverConfig | None = None,
    start: float | None = None,
) -> float:
    """Maximize the dual in one coordinate with the opposite potential frozen."""
    config = config or SolverConfig()
    fixed_pot = np.asarray(fixed_pot, dtype=float)
    fixed_marginal = np.asarray(fixed_marginal, dtype=float)
    cost_slice = np.asarray(cost_slice, dtype=float)
    if not fixed_pot.shape == fixed_marginal.shape == cost_slice.shape:
        raise InputError("fixed_pot, fixed_marginal and cost_slice must have equal length")
    if (fixed_marginal <= 0).any():
        raise InputError("fixed_marginal must be strictly positive")
    t, _ = kernels.half_sweep(
        gen,
        float(lam),
        cost_slice[None, :],
        fixed_pot,
        fixed_marginal,
        None if start is None else np.array([start], dtype=float),
        config.inner_tol,
        config.max_inner_iters,
        config.margin_for(gen),
    )
    return float(t[0])


def recover_coupling(
    prob: DiscreteProblem, gen: Generator, pot: Potentials, margin: float | None = None
) -> Coupling:
    """Coupling with density ``inv((f_i + g_j - c_ij) / lam)`` relative to ``px * py``."""
    adm = check_admissible(prob, gen, pot, margin)
    args = (pot.outer_sum() - prob.cost) / prob.lam
    if not adm.ok:
        i, j = np.unravel_index(int(np.argmax(args)), args.shape)
        raise DomainError(
            f"potentials not admissible at entry ({i}, {j}): argument {args[i, j]!r} "
            f"vs beta {gen.beta_phi!r} (slack {adm.slack!r})"
        )
    return Coupling.from_density(gen.phi_prime_inv(args), prob.px, prob.py)


def _residual(dens, px, py) -> float:
    row = np.abs(dens @ py - 1.0) * px
    col = np.abs(px @ dens - 1.0) * py
    return max(row.max(), col.max())


def _gap(gen, lam, cost, f, g, dens, px, py) -> float:
    w = np.outer(px, py)
    args = (f[:, None] + g[None, :] - cost) / lam
    primal = np.sum((cost * dens + lam * gen.phi(dens)) * w)
    dual = f @ px + g @ py - lam * np.sum(gen.phi_star(args) * w)
    return primal - dual


def solve(
    prob: DiscreteProblem,
    gen: Generator,
    config: SolverConfig | None = None,
    init: Potentials | None = None,
    callback: Callable[[str, Potentials], None] | None = None,
) -> Solution:
    """Solve the regularized transport problem.

    Parameters
    ----------
    prob, gen
        Problem instance and regularizing generator.
    config : SolverConfig, optional
        Tolerances and iteration limits.
    init : Potentials, optional
        Starting potentials for the original cost; zeros by default.
    callback : callable, optional
        Called after every half-sweep as ``callback(stage, potentials)`` with
        ``stage`` in ``{"row", "col"}``; potentials refer to the original cost.

    Returns
    -------
    Solution
        ``(potentials, coupling, report)``. Potentials carry the canonical
        normalization ``<f, px> = <g, py>``. Running out of sweeps is not an
        error: the last iterate is returned with ``report.converged = False``.
    """
    config = config or SolverConfig()
    margin = config.margin_for(gen)
    lam = prob.lam
    px, py = prob.px, prob.py
    shift = float(prob.cost.min())
    cost = prob.cost - shift
    cost_t = np.ascontiguousarray(cost.T)

    if init is None:
        f = np.zeros(px.size)
        g = np.zeros(py.size)
    else:
        f = np.array(init.f, dtype=float) - shift
        g = np.array(init.g, dtype=float)

    def emit(stage):
        if callback is not None:
            callback(stage, Potentials(f + shift, g))

    clamped = 0
    converged = False
    it = 0
    with np.errstate(over="ignore"):
        for it in range(1, config.max_outer_iters + 1):
            f, c1 = kernels.half_sweep(
                gen, lam, cost, g, py, f,
                config.inner_tol, config.max_inner_iters, margin,
            )
            emit("row")
            g, c2 = kernels.half_sweep(
                gen, lam, cost_t, f, px, g,
                config.inner_tol, config.max_inner_iters, margin,
            )
            emit("col")
            clamped += c1 + c2
            dens = gen.phi_prime_inv((f[:, None] + g[None, :] - cost) / lam)
            if (
                _residual(dens, px, py) <= config.outer_tol
                and _gap(gen, lam, cost, f, g, dens, px, py) >= -config.gap_floor
            ):
                converged = True
                break

    pot = Potentials(f + shift, g).normalized(px, py)
    adm = check_admissible(prob, gen, pot, margin)
    coup = Coupling.from_density(
        gen.phi_prime_inv((pot.outer_sum() - prob.cost) / lam), px, py
    )
    res_row, res_col = marginal_residuals(prob, coup)
    primal = primal_objective(prob, gen, coup)
    dual = dual_objective(prob, gen, pot)
    report = SolveReport(
        iterations=it,
        residual_row=res_row,
        residual_col=res_col,
        primal_value=primal,
        dual_value=dual,
        duality_gap=primal - dual if math.isfinite(dual) else math.inf,
        admissible=adm.ok,
        admissibility_slack=adm.slack,
        converged=converged,
        cost_shift=shift,
        clamped_updates=clamped,
        backend=kernels.BACKEND,
    )
    return Solution(pot, coup, report)
