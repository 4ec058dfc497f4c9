"""JSON interchange: problem, result and certificate files.

Floats are written with 17 significant digits so every file re-parses to the
exact in-memory value.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from pathlib import Path
from typing import Any

import numpy as np

from .errors import InputError
from .generators import Generator
from .problem import Coupling, DiscreteProblem, Potentials
from .solver import SolveReport

RENORMALIZE_TOL = 1e-6
EXACT_TOL = 1e-12


def _number(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    text = format(x, ".17g")
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def _flat(obj) -> bool:
    return isinstance(obj, list) and all(not isinstance(v, (list, dict)) for v in obj)


def _encode(obj, level: int) -> str:
    pad = "  " * (level + 1)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _number(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), level)
    if isinstance(obj, (list, tuple)):
        obj = list(obj)
        if _flat(obj):
            return "[" + ", ".join(_encode(v, level) for v in obj) + "]"
        inner = (",\n" + pad).join(_encode(v, level + 1) for v in obj)
        return "[\n" + pad + inner + "\n" + "  " * level + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = (f"{json.dumps(str(k))}: {_encode(v, level + 1)}" for k, v in obj.items())
        return "{\n" + pad + (",\n" + pad).join(items) + "\n" + "  " * level + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return _encode(obj, 0) + "\n"


def write_json(obj: Any, path: str | Path | None) -> str:
    text = dumps(obj)
    if path is not None:
        Path(path).write_text(text)
    return text


def read_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InputError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None


def _vector(doc: dict, name: str) -> np.ndarray:
    if name not in doc:
        raise InputError(f"missing field `{name}`")
    try:
        arr = np.array(doc[name], dtype=float)
    except (TypeError, ValueError):
        raise InputError(f"field `{name}` must be an array of numbers") from None
    if arr.ndim != 1 or arr.size == 0:
        raise InputError(f"field `{name}` must be a non-empty array")
    if not np.isfinite(arr).all() or (arr <= 0).any():
        raise InputError(f"field `{name}` must contain positive finite reals")
    err = abs(arr.sum() - 1.0)
    if err > RENORMALIZE_TOL:
        raise InputError(f"field `{name}` sums to {arr.sum()!r}; expected 1")
    if err > EXACT_TOL:
        warnings.warn(f"`{name}` sums to {arr.sum()!r}; renormalizing", stacklevel=3)
        arr = arr / arr.sum()
    return arr


def problem_from_dict(doc: Any) -> DiscreteProblem:
    if not isinstance(doc, dict):
        raise InputError("problem file must hold a JSON object")
    px = _vector(doc, "marginal_x")
    py = _vector(doc, "marginal_y")
    if "cost" not in doc:
        raise InputError("missing field `cost`")
    try:
        cost = np.array(doc["cost"], dtype=float)
    except (TypeError, ValueError):
        raise InputError("field `cost` must be an n x m array of numbers") from None
    if cost.shape != (px.size, py.size):
        raise InputError(f"field `cost` has shape {cost.shape}, expected {(px.size, py.size)}")
    if "lambda" not in doc:
        raise InputError("missing field `lambda`")
    lam = doc["lambda"]
    if isinstance(lam, bool) or not isinstance(lam, (int, float)):
        raise InputError("field `lambda` must be a number")
    try:
        return DiscreteProblem(px, py, cost, float(lam))
    except InputError as exc:
        raise InputError(f"invalid problem: {exc}") from None


def problem_to_dict(prob: DiscreteProblem) -> dict:
    return {
        "marginal_x": prob.px,
        "marginal_y": prob.py,
        "cost": prob.cost,
        "lambda": prob.lam,
    }


def read_problem(path: str | Path) -> DiscreteProblem:
    return problem_from_dict(read_json(path))


def result_to_dict(
    gen: Generator, prob: DiscreteProblem, pot: Potentials, coup: Coupling, report: SolveReport
) -> dict:
    return {
        "generator": gen.key,
        "lambda": prob.lam,
        "f": pot.f,
        "g": pot.g,
        "joint": coup.joint,
        "density": coup.density,
        "primal": report.primal_value,
        "dual": report.dual_value,
        "gap": report.duality_gap,
        "iterations": report.iterations,
        "residuals": {"row": report.residual_row, "col": report.residual_col},
        "converged": report.converged,
        "cost_shift": report.cost_shift,
        "admissible": report.admissible,
        "admissibility_slack": report.admissibility_slack,
        "clamped_updates": report.clamped_updates,
        "backend": report.backend,
    }


def potentials_from_result(doc: Any) -> Potentials:
    if not isinstance(doc, dict):
        raise InputError("result file must hold a JSON object")
    for name in ("f", "g"):
        if name not in doc:
            raise InputError(f"missing field `{name}`")
    try:
        return Potentials(doc["f"], doc["g"])
    except (TypeError, ValueError) as exc:
        raise InputError(f"invalid potentials: {exc}") from None


def write_csv(matrix: np.ndarray, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in np.atleast_2d(matrix):
            writer.writerow([_number(float(v)) for v in row])
