"""Command-line interface: ``fdivot {solve,transform,equivalence,gen,divergence}``.

Exit codes: 0 success, 1 input error, 2 non-convergence or inconclusive
certificate, 3 failed equivalence certificate.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .errors import FDivOTError, InputError
from .generators import parse_generator
from .instances import COST_LAWS, MARGINAL_LAWS, random_problem
from .problem import divergence
from .solver import SolverConfig, solve
from .transform import transform_cost, verify_equivalence

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_CONVERGED = 2
EXIT_FAILED = 3


@dataclass
class RunManifest:
    command: str
    inputs: list[str] = field(default_factory=list)
    generators: list[str] = field(default_factory=list)
    lambda_override: float | None = None
    config: dict = field(default_factory=dict)
    seed: int | None = None
    out: str | None = None

    def record(self) -> dict:
        # the output path is left out so identical runs give identical files
        doc = asdict(self)
        doc.pop("out")
        return doc


def _config(args) -> SolverConfig:
    kw = {}
    if args.tol_outer is not None:
        kw["outer_tol"] = args.tol_outer
    if args.tol_inner is not None:
        kw["inner_tol"] = args.tol_inner
    elif args.tol_outer is not None and args.tol_outer <= SolverConfig.inner_tol:
        kw["inner_tol"] = args.tol_outer / 100
    if args.max_iters is not None:
        kw["max_outer_iters"] = args.max_iters
    return SolverConfig(**kw)


def _load_problem(args):
    prob = io.read_problem(args.problem)
    if args.lam is not None:
        prob = prob.with_lambda(args.lam)
    return prob


def _manifest(args, generators) -> RunManifest:
    inputs = [str(p) for p in (getattr(args, "problem", None), getattr(args, "potentials", None)) if p]
    cfg = {
        k: getattr(args, k)
        for k in ("tol_outer", "tol_inner", "max_iters")
        if getattr(args, k, None) is not None
    }
    return RunManifest(
        command=args.command,
        inputs=inputs,
        generators=[g.key for g in generators],
        lambda_override=getattr(args, "lam", None),
        config=cfg,
        seed=getattr(args, "seed", None),
        out=getattr(args, "out", None),
    )


def _emit(doc, out) -> None:
    text = io.write_json(doc, out)
    if out is None:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    gen = parse_generator(args.divergence)
    prob = _load_problem(args)
    pot, coup, report = solve(prob, gen, _config(args))
    doc = io.result_to_dict(gen, prob, pot, coup, report)
    doc["manifest"] = _manifest(args, [gen]).record()
    _emit(doc, args.out)
    if args.csv:
        io.write_csv(coup.joint, args.csv)
    if not report.converged:
        print(f"solve did not converge in {report.iterations} sweeps", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_transform(args) -> int:
    src = parse_generator(args.source)
    tgt = parse_generator(args.target)
    prob = _load_problem(args)
    config = _config(args)
    if args.potentials:
        prior = io.read_json(args.potentials)
        if isinstance(prior, dict) and prior.get("converged") is False:
            print("prior solve did not converge", file=sys.stderr)
            return EXIT_NOT_CONVERGED
        pot = io.potentials_from_result(prior)
        if pot.f.size != prob.px.size or pot.g.size != prob.py.size:
            raise InputError("potentials do not match the problem dimensions")
    else:
        pot, _, report = solve(prob, src, config)
        if not report.converged:
            print("source solve did not converge", file=sys.stderr)
            return EXIT_NOT_CONVERGED
    tr = transform_cost(prob, src, pot, tgt, config.admissibility_margin)
    doc = io.problem_to_dict(tr.target_problem(prob))
    doc.update(
        {
            "source_generator": tr.source_gen,
            "target_generator": tr.target_gen,
            "predicted_potentials": {
                "f": tr.predicted_potentials.f,
                "g": tr.predicted_potentials.g,
            },
            "admissible_for_target": tr.admissible_for_target.ok,
            "admissibility_slack": tr.admissible_for_target.slack,
            "manifest": _manifest(args, [src, tgt]).record(),
        }
    )
    _emit(doc, args.out)
    return EXIT_OK


def cmd_equivalence(args) -> int:
    src = parse_generator(args.source)
    tgt = parse_generator(args.target)
    prob = _load_problem(args)
    cert = verify_equivalence(prob, src, tgt, _config(args))
    doc = cert.as_dict()
    doc["manifest"] = _manifest(args, [src, tgt]).record()
    _emit(doc, args.out)
    if cert.inconclusive:
        return EXIT_NOT_CONVERGED
    return EXIT_OK if cert.passed else EXIT_FAILED


def cmd_gen(args) -> int:
    lam = 1.0 if args.lam is None else args.lam
    prob = random_problem(args.seed, args.n, args.m, lam, args.cost_law, args.marginal_law)
    doc = io.problem_to_dict(prob)
    doc["manifest"] = _manifest(args, []).record()
    doc["manifest"].update(
        {"n": args.n, "m": args.m, "cost_law": args.cost_law, "marginal_law": args.marginal_law}
    )
    _emit(doc, args.out)
    return EXIT_OK


def _distribution(path) -> np.ndarray:
    doc = io.read_json(path)
    if isinstance(doc, dict):
        for key in ("p", "q", "joint", "values"):
            if key in doc:
                doc = doc[key]
                break
        else:
            raise InputError(f"{path}: expected an array or an object with `p`/`q`/`joint`")
    try:
        return np.array(doc, dtype=float)
    except (TypeError, ValueError):
        raise InputError(f"{path}: not a numeric array") from None


def cmd_divergence(args) -> int:
    gen = parse_generator(args.divergence)
    value = divergence(gen, _distribution(args.p), _distribution(args.q))
    print(f"{value:.12g}")
    return EXIT_OK


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--problem", required=True, help="problem JSON file")
    p.add_argument("--lambda", dest="lam", type=float, help="override the file's lambda")
    p.add_argument("--out", help="output path (stdout when omitted)")
    p.add_argument("--tol-outer", type=float, help="marginal residual tolerance")
    p.add_argument("--tol-inner", type=float, help="coordinate root tolerance")
    p.add_argument("--max-iters", type=int, help="maximum number of full sweeps")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdivot",
        description="Optimal transport regularized by Legendre-type f-divergences.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a regularized transport problem")
    _add_solver_flags(p)
    p.add_argument("--divergence", default="kl", help="kl, reverse_kl, jensen_shannon, hellinger_sq or alpha:<a>")
    p.add_argument("--csv", help="also write the joint matrix as CSV")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("transform", help="transformed cost for a different regularizer")
    _add_solver_flags(p)
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--to", dest="target", required=True)
    p.add_argument("--potentials", help="result file of a prior solve of the source problem")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("equivalence", help="certify that two regularizations share a minimizer")
    _add_solver_flags(p)
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--to", dest="target", required=True)
    p.set_defaults(func=cmd_equivalence)

    p = sub.add_parser("gen", help="write a seeded random problem")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--cost-law", choices=COST_LAWS, default="uniform")
    p.add_argument("--marginal-law", choices=MARGINAL_LAWS, default="dirichlet")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("divergence", help="evaluate D(p || q)")
    p.add_argument("--p", required=True, help="JSON array (or object with `p`)")
    p.add_argument("--q", required=True, help="JSON array (or object with `q`)")
    p.add_argument("--divergence", default="kl")
    p.set_defaults(func=cmd_divergence)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("problem", "potentials", "p", "q"):
        path = getattr(args, name, None)
        if path and not Path(path).exists():
            print(f"error: {name} file not found: {path}", file=sys.stderr)
            return EXIT_INPUT
    try:
        return args.func(args)
    except FDivOTError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
