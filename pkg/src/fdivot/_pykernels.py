"""Pure numpy half-sweep kernel, used when the compiled extension is absent.

All coordinates of a half-sweep are independent (each only reads the frozen
opposite potential), so the safeguarded Newton iteration runs on every row at
once with an active mask.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericalError
from .generators import KL, Generator


def _kl_rows(lam, d, marg):
    # lam * log sum_j marg_j exp(-d_j / lam); d >= 0 with min 0, so the max-shift is built in
    return lam * np.log(np.exp(-d / lam) @ marg)


def half_sweep(
    gen: Generator,
    lam: float,
    cost: np.ndarray,
    other: np.ndarray,
    marg: np.ndarray,
    start: np.ndarray | None,
    inner_tol: float,
    max_inner: int,
    margin: float,
):
    """Solve ``sum_j marg_j inv((t_k + other_j - cost_kj) / lam) = 1`` for every row ``k``.

    Returns the new potentials and the number of updates that had to be clamped
    below ``beta - margin``.
    """
    s = other[None, :] - cost
    if not np.isfinite(s).all():
        bad = int(np.argwhere(~np.isfinite(s))[0, 0])
        raise NumericalError(f"non-finite potential or cost at coordinate {bad}")
    top = s.max(axis=1)
    d = top[:, None] - s
    spread = d.max(axis=1)

    if gen.code == KL:
        return -_kl_rows(lam, d, marg) - top, 0

    fam = gen._family
    hi = np.minimum(spread, lam * gen.beta_phi)
    lo = np.zeros_like(hi)
    if start is None:
        u = 0.5 * hi
    else:
        u = np.clip(start + top, lo, hi)
        u = np.where(u >= hi, 0.5 * (lo + hi), u)
    done = spread == 0.0
    u[done] = 0.0

    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        for _ in range(max_inner):
            act = ~done
            if not act.any():
                break
            arg = (u[act, None] - d[act]) / lam
            dens = fam.phi_prime_inv(arg)
            dens[arg >= gen.beta_phi] = np.inf
            h = dens @ marg
            dh = (fam.phi_prime_inv_deriv(arg) @ marg) / lam
            ua, la, ha = u[act], lo[act], hi[act]
            ok = np.abs(h - 1.0) <= inner_tol
            above = h > 1.0
            ha = np.where(above, ua, ha)
            la = np.where(above, la, ua)
            step = ua - (h - 1.0) / dh
            inside = (step > la) & (step < ha)
            nxt = np.where(inside, step, 0.5 * (la + ha))
            collapsed = (ha - la) <= 4.0 * np.spacing(np.maximum(np.abs(la), np.abs(ha)))
            fin = ok | collapsed
            u[act] = np.where(ok, ua, np.where(collapsed, 0.5 * (la + ha), nxt))
            lo[act], hi[act] = la, ha
            idx = np.flatnonzero(act)
            done[idx[fin]] = True
        else:
            if not done.all():
                k = int(np.flatnonzero(~done)[0])
                raise NumericalError(
                    f"coordinate {k}: root not bracketed to tolerance in {max_inner} steps"
                )

    clamped = 0
    if np.isfinite(gen.beta_phi):
        cap = lam * (gen.beta_phi - margin)
        over = u > cap
        clamped = int(over.sum())
        u[over] = cap
    return u - top, clamped
