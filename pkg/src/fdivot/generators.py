"""Catalogue of Legendre-type generators and their conjugacy maps.

Every generator is normalized so that ``phi(1) = phi'(1) = 0`` and lives on
``(0, inf)``. For each one we provide ``phi``, its derivative, the inverse of
the derivative (which is the derivative of the convex conjugate), the
conjugate itself and ``beta``, the right end of the conjugate's domain.

The closed forms are written to stay accurate near ``x = 1`` (``log1p`` /
``expm1`` rearrangements) since that is where regularized couplings live.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .errors import InputError, ParameterError

__all__ = [
    "Generator",
    "make_generator",
    "parse_generator",
    "CATALOGUE",
    "eval_phi",
    "eval_phi_prime",
    "eval_phi_prime_inv",
    "eval_phi_star",
]

CATALOGUE = ("kl", "reverse_kl", "jensen_shannon", "hellinger_sq", "alpha")

# integer codes shared with the compiled kernels
KL, REVERSE_KL, JENSEN_SHANNON, HELLINGER_SQ, ALPHA = range(5)

_NEAR_ONE = 0.5

ArrayFn = Callable[[np.ndarray], np.ndarray]


class _Family(NamedTuple):
    phi: ArrayFn
    phi_prime: ArrayFn
    phi_prime_inv: ArrayFn
    phi_prime_inv_deriv: ArrayFn
    phi_star: ArrayFn | None


def _branch(x, near, far):
    # evaluate `near` close to 1 and `far` elsewhere without touching the other branch's domain
    x = np.asarray(x, dtype=float)
    close = np.abs(x - 1.0) < _NEAR_ONE
    out = np.empty_like(x)
    out[close] = near(x[close])
    out[~close] = far(x[~close])
    return out


def _kl() -> _Family:
    return _Family(
        phi=lambda x: _branch(
            x,
            lambda u: u * np.log1p(u - 1.0) - (u - 1.0),
            lambda u: u * np.log(u) - u + 1.0,
        ),
        phi_prime=np.log,
        phi_prime_inv=np.exp,
        phi_prime_inv_deriv=np.exp,
        phi_star=np.expm1,
    )


def _reverse_kl() -> _Family:
    return _Family(
        phi=lambda x: _branch(
            x,
            lambda u: (u - 1.0) - np.log1p(u - 1.0),
            lambda u: (u - 1.0) - np.log(u),
        ),
        phi_prime=lambda x: (x - 1.0) / x,
        phi_prime_inv=lambda y: 1.0 / (1.0 - y),
        phi_prime_inv_deriv=lambda y: 1.0 / (1.0 - y) ** 2,
        phi_star=lambda y: -np.log1p(-y),
    )


def _js_phi_near(x):
    s = (x - 1.0) / (x + 1.0)
    return x * np.log1p(s) + np.log1p(-s)


def _js_phi_far(x):
    return x * np.log(2.0 * x / (x + 1.0)) + np.log(2.0 / (x + 1.0))


def _js_phi_prime(x):
    x = np.asarray(x, dtype=float)
    small = x < 1.0 / 3.0
    out = np.empty_like(x)
    xs = x[small]
    out[small] = np.log(2.0 * xs) - np.log1p(xs)
    xl = x[~small]
    out[~small] = np.log1p((xl - 1.0) / (xl + 1.0))
    return out


def _jensen_shannon() -> _Family:
    return _Family(
        phi=lambda x: _branch(x, _js_phi_near, _js_phi_far),
        phi_prime=_js_phi_prime,
        # e^y / (2 - e^y), with 2 - e^y written as 1 - expm1(y)
        phi_prime_inv=lambda y: np.exp(y) / (1.0 - np.expm1(y)),
        phi_prime_inv_deriv=lambda y: 2.0 * np.exp(y) / (1.0 - np.expm1(y)) ** 2,
        phi_star=lambda y: -np.log1p(-np.expm1(y)),
    )


def _hellinger_sq() -> _Family:
    def phi_prime(x):
        r = np.sqrt(x)
        return (x - 1.0) / (r * (r + 1.0))

    return _Family(
        phi=lambda x: ((x - 1.0) / (np.sqrt(x) + 1.0)) ** 2,
        phi_prime=phi_prime,
        phi_prime_inv=lambda y: 1.0 / (1.0 - y) ** 2,
        phi_prime_inv_deriv=lambda y: 2.0 / (1.0 - y) ** 3,
        phi_star=lambda y: y / (1.0 - y),
    )


def _alpha(a: float) -> _Family:
    am1 = a - 1.0

    def phi(x):
        return (np.expm1(a * np.log(x)) - a * (x - 1.0)) / (a * am1)

    return _Family(
        phi=phi,
        phi_prime=lambda x: np.expm1(am1 * np.log(x)) / am1,
        phi_prime_inv=lambda y: np.exp(np.log1p(am1 * y) / am1),
        phi_prime_inv_deriv=lambda y: np.exp(np.log1p(am1 * y) * (2.0 - a) / am1),
        phi_star=lambda y: np.expm1(a / am1 * np.log1p(am1 * y)) / a,
    )


def _as_float_array(v, what: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if np.isnan(arr).any():
        raise InputError(f"NaN passed to {what}")
    return arr


def _scalar_or_array(arr: np.ndarray, like) -> float | np.ndarray:
    return float(arr) if np.ndim(like) == 0 else arr


@dataclass(frozen=True, eq=False)
class Generator:
    """A Legendre-type generator together with its conjugacy maps.

    The public methods accept scalars or arrays and apply the domain rules:
    ``phi`` is ``+inf`` for negative arguments (and equals its right limit at
    zero), and the conjugate-side maps return ``+inf`` at or beyond ``beta``
    so that bracketing root finders can probe past the boundary.
    """

    name: str
    code: int
    beta_phi: float
    phi_at_zero: float
    param: float | None = None
    _family: _Family = field(repr=False, default=None)

    alpha_phi: float = -math.inf
    a_phi: float = 0.0
    b_phi: float = math.inf

    @property
    def key(self) -> str:
        """Selection string accepted by :func:`parse_generator`."""
        if self.param is None:
            return self.name
        return f"{self.name}:{self.param!r}"

    def __eq__(self, other):
        return isinstance(other, Generator) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    # guarded evaluations ------------------------------------------------

    def phi(self, x):
        xa = _as_float_array(x, "phi")
        out = np.full(xa.shape, math.inf)
        pos = xa > 0
        with np.errstate(over="ignore"):
            out[pos] = self._family.phi(xa[pos])
        out[xa == 0] = self.phi_at_zero
        return _scalar_or_array(out, x)

    def phi_prime(self, x):
        xa = _as_float_array(x, "phi_prime")
        if (xa < 0).any():
            raise InputError("phi_prime requires x > 0")
        out = np.full(xa.shape, -math.inf)
        pos = xa > 0
        out[pos] = self._family.phi_prime(xa[pos])
        return _scalar_or_array(out, x)

    def _conjugate_side(self, fn, y, what):
        ya = _as_float_array(y, what)
        out = np.full(ya.shape, math.inf)
        inside = ya < self.beta_phi
        with np.errstate(over="ignore"):
            out[inside] = fn(ya[inside])
        return _scalar_or_array(out, y)

    def phi_prime_inv(self, y):
        """Inverse of ``phi'``, equal to the derivative of the conjugate."""
        return self._conjugate_side(self._family.phi_prime_inv, y, "phi_prime_inv")

    def phi_prime_inv_deriv(self, y):
        return self._conjugate_side(
            self._family.phi_prime_inv_deriv, y, "phi_prime_inv_deriv"
        )

    def phi_star(self, y):
        fn = self._family.phi_star
        if fn is None:
            return self.phi_star_generic(y)
        return self._conjugate_side(fn, y, "phi_star")

    def phi_star_generic(self, y):
        """Conjugate through the Fenchel equality ``y x - phi(x)`` at ``x = phi'^{-1}(y)``."""

        def fenchel(v):
            x = self._family.phi_prime_inv(v)
            return v * x - self._family.phi(x)

        return self._conjugate_side(fenchel, y, "phi_star")


def make_generator(name: str, alpha: float | None = None) -> Generator:
    """Build a catalogue generator.

    Parameters
    ----------
    name : str
        One of ``kl``, ``reverse_kl``, ``jensen_shannon``, ``hellinger_sq``
        or ``alpha``. The form ``alpha:<value>`` is also accepted.
    alpha : float, optional
        Order of the alpha family, strictly inside ``(0, 1)``.
    """
    if name.startswith("alpha:"):
        return parse_generator(name)
    if name == "kl":
        return Generator("kl", KL, math.inf, 1.0, None, _kl())
    if name == "reverse_kl":
        return Generator("reverse_kl", REVERSE_KL, 1.0, math.inf, None, _reverse_kl())
    if name == "jensen_shannon":
        return Generator(
            "jensen_shannon", JENSEN_SHANNON, math.log(2.0), math.log(2.0), None,
            _jensen_shannon(),
        )
    if name == "hellinger_sq":
        return Generator("hellinger_sq", HELLINGER_SQ, 1.0, 1.0, None, _hellinger_sq())
    if name == "alpha":
        if alpha is None:
            raise ParameterError("the alpha family needs a parameter in (0, 1)")
        a = float(alpha)
        if not 0.0 < a < 1.0:
            raise ParameterError(f"alpha must lie strictly inside (0, 1), got {a}")
        return Generator("alpha", ALPHA, 1.0 / (1.0 - a), 1.0 / a, a, _alpha(a))
    raise ParameterError(f"unknown generator {name!r}; expected one of {CATALOGUE}")


def parse_generator(text: str) -> Generator:
    """Parse a selection string such as ``kl`` or ``alpha:0.5``."""
    text = text.strip()
    if ":" in text:
        head, _, tail = text.partition(":")
        if head != "alpha":
            raise ParameterError(f"only the alpha family takes a parameter, got {text!r}")
        try:
            value = float(tail)
        except ValueError:
            raise ParameterError(f"cannot parse alpha parameter in {text!r}") from None
        return make_generator("alpha", value)
    return make_generator(text)


def eval_phi(gen: Generator, x):
    return gen.phi(x)


def eval_phi_prime(gen: Generator, x):
    return gen.phi_prime(x)


def eval_phi_prime_inv(gen: Generator, y):
    return gen.phi_prime_inv(y)


def eval_phi_star(gen: Generator, y):
    return gen.phi_star(y)
