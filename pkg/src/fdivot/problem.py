"""Discrete problem instances, objective functionals and admissibility checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InputError
from .generators import Generator

__all__ = [
    "DiscreteProblem",
    "Potentials",
    "Coupling",
    "Admissibility",
    "divergence",
    "primal_objective",
    "dual_objective",
    "check_admissible",
    "default_margin",
    "marginal_residuals",
    "optimality_residuals",
]

SUM_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _probability_vector(v, field: str) -> np.ndarray:
    arr = np.array(v, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise InputError(f"{field} must be a non-empty vector")
    if not np.isfinite(arr).all():
        raise InputError(f"{field} has non-finite entries")
    if (arr <= 0).any():
        raise InputError(f"{field} must be strictly positive; trim zero-mass atoms")
    if abs(arr.sum() - 1.0) > SUM_TOL:
        raise InputError(f"{field} sums to {arr.sum()!r}, not 1")
    return _frozen(arr)


@dataclass(frozen=True, eq=False)
class DiscreteProblem:
    """Marginals on two finite supports, a bounded cost and a regularization strength."""

    px: np.ndarray
    py: np.ndarray
    cost: np.ndarray
    lam: float

    def __post_init__(self):
        px = _probability_vector(self.px, "marginal_x")
        py = _probability_vector(self.py, "marginal_y")
        cost = np.array(self.cost, dtype=float)
        if cost.shape != (px.size, py.size):
            raise InputError(
                f"cost has shape {cost.shape}, expected {(px.size, py.size)}"
            )
        if not np.isfinite(cost).all():
            raise InputError("cost has non-finite entries")
        lam = float(self.lam)
        if not (lam > 0 and math.isfinite(lam)):
            raise InputError(f"lambda must be a positive finite real, got {self.lam!r}")
        object.__setattr__(self, "px", px)
        object.__setattr__(self, "py", py)
        object.__setattr__(self, "cost", _frozen(cost))
        object.__setattr__(self, "lam", lam)

    @property
    def shape(self) -> tuple[int, int]:
        return self.cost.shape

    @property
    def product(self) -> np.ndarray:
        return np.outer(self.px, self.py)

    def with_cost(self, cost) -> "DiscreteProblem":
        return DiscreteProblem(self.px, self.py, cost, self.lam)

    def with_lambda(self, lam: float) -> "DiscreteProblem":
        return DiscreteProblem(self.px, self.py, self.cost, lam)


@dataclass(frozen=True, eq=False)
class Potentials:
    f: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        f = np.array(self.f, dtype=float).reshape(-1)
        g = np.array(self.g, dtype=float).reshape(-1)
        if not (np.isfinite(f).all() and np.isfinite(g).all()):
            raise InputError("potentials must be finite")
        object.__setattr__(self, "f", _frozen(f))
        object.__setattr__(self, "g", _frozen(g))

    def outer_sum(self) -> np.ndarray:
        """The matrix ``f_i + g_j``."""
        return self.f[:, None] + self.g[None, :]

    def shifted(self, a: float) -> "Potentials":
        """Apply the invariance ``(f, g) -> (f + a, g - a)``."""
        return Potentials(self.f + a, self.g - a)

    def normalized(self, px, py) -> "Potentials":
        """Canonical representative with ``<f, px> = <g, py>``."""
        return self.shifted(0.5 * (self.g @ py - self.f @ px))


@dataclass(frozen=True, eq=False)
class Coupling:
    joint: np.ndarray
    density: np.ndarray

    @classmethod
    def from_density(cls, density, px, py) -> "Coupling":
        density = np.asarray(density, dtype=float)
        return cls(_frozen(density * np.outer(px, py)), _frozen(density))

    @classmethod
    def product(cls, px, py) -> "Coupling":
        return cls.from_density(np.ones((len(px), len(py))), px, py)


class Admissibility(NamedTuple):
    ok: bool
    slack: float


def divergence(gen: Generator, p, q) -> float:
    """``sum phi(p / q) q`` over the common grid; ``+inf`` if ``p`` charges a zero of ``q``."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise InputError(f"shape mismatch: {p.shape} vs {q.shape}")
    if np.isnan(p).any() or np.isnan(q).any():
        raise InputError("NaN in divergence arguments")
    if (p < 0).any() or (q < 0).any():
        raise InputError("divergence arguments must be non-negative")
    support = q > 0
    if (p[~support] > 0).any():
        return math.inf
    ratio = p[support] / q[support]
    return float(np.sum(gen.phi(ratio) * q[support]))


def primal_objective(prob: DiscreteProblem, gen: Generator, coup: Coupling) -> float:
    r = coup.density
    w = prob.product
    return float(np.sum((prob.cost * r + prob.lam * gen.phi(r)) * w))


def _arguments(prob: DiscreteProblem, pot: Potentials) -> np.ndarray:
    return (pot.outer_sum() - prob.cost) / prob.lam


def dual_objective(prob: DiscreteProblem, gen: Generator, pot: Potentials) -> float:
    """Dual value; ``-inf`` when some argument reaches the conjugate's boundary."""
    args = _arguments(prob, pot)
    if (args >= gen.beta_phi).any():
        return -math.inf
    conj = gen.phi_star(args)
    return float(
        pot.f @ prob.px + pot.g @ prob.py - prob.lam * np.sum(conj * prob.product)
    )


def default_margin(gen: Generator) -> float:
    beta = gen.beta_phi
    return 1e-9 * max(1.0, beta) if math.isfinite(beta) else 0.0


def check_admissible(
    prob: DiscreteProblem, gen: Generator, pot: Potentials, margin: float | None = None
) -> Admissibility:
    """Test ``max (f_i + g_j - c_ij) / lam <= beta - margin``.

    The slack ``beta - max(...)`` is reported (``inf`` when ``beta`` is).
    """
    if margin is None:
        margin = default_margin(gen)
    if not math.isfinite(gen.beta_phi):
        return Admissibility(True, math.inf)
    slack = float(gen.beta_phi - _arguments(prob, pot).max())
    return Admissibility(slack >= margin, slack)


def marginal_residuals(prob: DiscreteProblem, coup: Coupling) -> tuple[float, float]:
    """L-infinity violation of the row and column marginal constraints."""
    joint = coup.joint
    return (
        float(np.max(np.abs(joint.sum(axis=1) - prob.px))),
        float(np.max(np.abs(joint.sum(axis=0) - prob.py))),
    )


def optimality_residuals(
    prob: DiscreteProblem, gen: Generator, pot: Potentials
) -> tuple[float, float]:
    """Residuals of the first-order conditions for potentials ``pot``.

    Row ``i`` contributes ``px_i * |sum_j inv(a_ij) py_j - 1|`` with
    ``a = (f + g - c) / lam`` (columns alike), which is the marginal
    violation of the coupling these potentials induce.
    """
    dens = gen.phi_prime_inv(_arguments(prob, pot))
    row = np.abs(dens @ prob.py - 1.0) * prob.px
    col = np.abs(prob.px @ dens - 1.0) * prob.py
    return float(row.max()), float(col.max())
