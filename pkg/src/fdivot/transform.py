"""Cost transformation that carries a solved problem over to another generator.

Given optimal potentials ``(f, g)`` of the ``(c, phi)`` problem, the cost

    v = 1 - lam * psi'(phi'^{-1}((f + g - c) / lam))

makes the ``(v, psi)`` problem share the same optimal coupling, and the
constant potentials ``(1/2, 1/2)`` are optimal for it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericalError
from .generators import Generator
from .problem import (
    Admissibility,
    DiscreteProblem,
    Potentials,
    check_admissible,
    optimality_residuals,
)
from .solver import SolveReport, SolverConfig, solve

__all__ = [
    "TransformResult",
    "EquivalenceCertificate",
    "transform_cost",
    "verify_equivalence",
    "EQUIVALENCE_TOL",
]

EQUIVALENCE_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class TransformResult:
    v: np.ndarray
    source_gen: str
    target_gen: str
    predicted_potentials: Potentials
    admissible_for_target: Admissibility

    def target_problem(self, prob: DiscreteProblem) -> DiscreteProblem:
        return prob.with_cost(self.v)


def transform_cost(
    prob: DiscreteProblem,
    source_gen: Generator,
    pot_hat: Potentials,
    target_gen: Generator,
    margin: float | None = None,
) -> TransformResult:
    """Transformed cost for moving the regularizer from ``source_gen`` to ``target_gen``."""
    src_adm = check_admissible(prob, source_gen, pot_hat, margin)
    if not src_adm.ok:
        raise DomainError(
            f"source potentials are not admissible for {source_gen.key} "
            f"(slack {src_adm.slack!r})"
        )
    lam = prob.lam
    fg = pot_hat.outer_sum()
    if source_gen == target_gen:
        # psi' o phi'^{-1} is the identity
        v = prob.cost - fg + 1.0
    else:
        with np.errstate(over="ignore", divide="ignore"):
            dens = source_gen.phi_prime_inv((fg - prob.cost) / lam)
            v = 1.0 - lam * target_gen.phi_prime(dens)
    if not np.isfinite(v).all():
        i, j = np.argwhere(~np.isfinite(v))[0]
        raise NumericalError(f"transformed cost is not finite at entry ({i}, {j})")
    predicted = Potentials(np.full(prob.px.size, 0.5), np.full(prob.py.size, 0.5))
    adm = check_admissible(prob.with_cost(v), target_gen, predicted, margin)
    return TransformResult(v, source_gen.key, target_gen.key, predicted, adm)


@dataclass(frozen=True, eq=False)
class EquivalenceCertificate:
    source_generator: str
    target_generator: str
    max_joint_discrepancy: float
    max_density_discrepancy: float
    predicted_potential_residuals: tuple[float, float]
    predicted_potential_tol: float
    potential_shift: float
    max_potential_deviation: float
    admissible_for_target: bool
    tolerance: float
    passed: bool
    inconclusive: bool
    source_report: SolveReport
    target_report: SolveReport | None
    transform: TransformResult | None = field(default=None, repr=False)

    def as_dict(self) -> dict:
        return {
            "source_generator": self.source_generator,
            "target_generator": self.target_generator,
            "max_joint_discrepancy": self.max_joint_discrepancy,
            "max_density_discrepancy": self.max_density_discrepancy,
            "predicted_potential_residuals": list(self.predicted_potential_residuals),
            "predicted_potential_tol": self.predicted_potential_tol,
            "potential_shift": self.potential_shift,
            "max_potential_deviation": self.max_potential_deviation,
            "admissible_for_target": self.admissible_for_target,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "inconclusive": self.inconclusive,
            "source_report": self.source_report.as_dict(),
            "target_report": None if self.target_report is None else self.target_report.as_dict(),
        }


def verify_equivalence(
    prob: DiscreteProblem,
    source_gen: Generator,
    target_gen: Generator,
    config: SolverConfig | None = None,
    tol: float = EQUIVALENCE_TOL,
) -> EquivalenceCertificate:
    """Solve, transform, check the predicted potentials, re-solve and compare couplings.

    A certificate is inconclusive (never passed) when either solve fails to
    converge.
    """
    config = config or SolverConfig()
    nan = math.nan
    src = solve(prob, source_gen, config)
    if not src.report.converged:
        return EquivalenceCertificate(
            source_gen.key, target_gen.key, nan, nan, (nan, nan),
            10 * config.outer_tol, nan, nan, False, tol,
            passed=False, inconclusive=True,
            source_report=src.report, target_report=None,
        )

    tr = transform_cost(prob, source_gen, src.potentials, target_gen, config.admissibility_margin)
    target_prob = tr.target_problem(prob)
    predicted = optimality_residuals(target_prob, target_gen, tr.predicted_potentials)
    pred_tol = 10 * config.outer_tol

    tgt = solve(target_prob, target_gen, config)
    joint_gap = float(np.max(np.abs(src.coupling.joint - tgt.coupling.joint)))
    dens_gap = float(np.max(np.abs(src.coupling.density - tgt.coupling.density)))
    # remove the (f + a, g - a) freedom before comparing with (1/2, 1/2)
    shift = float(0.5 * (np.mean(tgt.potentials.f) - np.mean(tgt.potentials.g)))
    aligned = tgt.potentials.shifted(-shift)
    deviation = float(
        max(np.max(np.abs(aligned.f - 0.5)), np.max(np.abs(aligned.g - 0.5)))
    )

    inconclusive = not tgt.report.converged
    passed = (
        not inconclusive
        and joint_gap <= tol
        and max(predicted) <= pred_tol
        and tr.admissible_for_target.ok
    )
    return EquivalenceCertificate(
        source_generator=source_gen.key,
        target_generator=target_gen.key,
        max_joint_discrepancy=joint_gap,
        max_density_discrepancy=dens_gap,
        predicted_potential_residuals=predicted,
        predicted_potential_tol=pred_tol,
        potential_shift=shift,
        max_potential_deviation=deviation,
        admissible_for_target=tr.admissible_for_target.ok,
        tolerance=tol,
        passed=passed,
        inconclusive=inconclusive,
        source_report=src.report,
        target_report=tgt.report,
        transform=tr,
    )
