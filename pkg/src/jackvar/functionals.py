"""Statistical functionals: smooth functions of the mean and trimmed L-statistics.

Both families expose plug-in evaluation on an :class:`EmpiricalSample` and the
empirical influence function used by the infinitesimal jackknife.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Union

import numpy as np

from .empirical import EmpiricalSample
from .errors import InvalidParams, NonFiniteResult, TooFewSamples
from .quadrature import adaptive_simpson

__all__ = [
    "SmoothFunctionOfMean",
    "WeightFunction",
    "TrimmedLStatistic",
    "FunctionalSpec",
    "identity",
    "square",
    "paper_sgn",
    "constant",
    "box",
    "mesa",
    "holder_cusp",
    "custom_weight",
    "l_weights",
    "weight_integral",
    "eval_function_of_mean",
    "influence_function_of_mean",
    "eval_l_statistic",
    "influence_l_statistic",
    "evaluate",
    "influence",
    "parse_functional",
]

QUAD_TOL = 1e-10
QUAD_MAX_DEPTH = 30


# --------------------------------------------------------------------------
# smooth functions of the mean

@dataclass(frozen=True, eq=False)
class SmoothFunctionOfMean:
    """``T(m) = g(mean of m)``.

    ``g`` and ``g_prime`` must accept floats and numpy arrays. ``holder_order``
    and ``holder_constant`` describe ``g_prime`` and are metadata for rate
    experiments only. ``kinks`` lists points where ``g_prime`` is not
    differentiable; derivative checks stay away from them.
    """

    name: str
    g: Callable
    g_prime: Callable
    holder_order: float = 1.0
    holder_constant: Optional[float] = None
    kinks: tuple = ()

    def __post_init__(self):
        if not (0.0 < self.holder_order <= 1.0):
            raise InvalidParams(f"holder_order must lie in (0, 1], got {self.holder_order}")
        if self.holder_constant is not None and not self.holder_constant > 0:
            raise InvalidParams("holder_constant must be positive")

    def check_derivative(self, points, step=1e-5, tol=1e-6) -> float:
        """Largest gap between ``g_prime`` and a central difference of ``g``.

        Probe points closer than ``step`` to a declared kink are skipped.
        Raises :class:`InvalidParams` if the gap exceeds ``tol``.
        """
        worst = 0.0
        for x in np.asarray(points, dtype=float).ravel():
            if any(abs(x - k) <= step for k in self.kinks):
                continue
            fd = (float(self.g(x + step)) - float(self.g(x - step))) / (2 * step)
            worst = max(worst, abs(fd - float(self.g_prime(x))))
        if worst > tol:
            raise InvalidParams(
                f"g_prime of {self.name!r} disagrees with finite differences of g by {worst:.3g}"
            )
        return worst

    def __str__(self):
        return self.name


def _sgn_g(x):
    return x - np.sign(x) * x * x


def _sgn_gp(x):
    return 1.0 - 2.0 * np.abs(x)


identity = SmoothFunctionOfMean("identity", lambda x: x * 1.0, lambda x: np.ones_like(x, dtype=float) if np.ndim(x) else 1.0)
square = SmoothFunctionOfMean("square", lambda x: x * x, lambda x: 2.0 * x, holder_constant=2.0)
# g' = 1 - 2|x| is Lipschitz but g'' jumps at 0
paper_sgn = SmoothFunctionOfMean("paper_sgn", _sgn_g, _sgn_gp, holder_constant=2.0, kinks=(0.0,))


def constant(c: float) -> SmoothFunctionOfMean:
    """The functional ``T = c``; every pseudovalue equals ``c``."""
    c = float(c)
    return SmoothFunctionOfMean(
        f"constant({c!r})",
        lambda x: np.full_like(x, c, dtype=float) if np.ndim(x) else c,
        lambda x: np.zeros_like(x, dtype=float) if np.ndim(x) else 0.0,
    )


def eval_function_of_mean(spec: SmoothFunctionOfMean, sample: EmpiricalSample) -> float:
    value = float(spec.g(sample.mean))
    if not math.isfinite(value):
        raise NonFiniteResult(f"{spec.name}: g(mean) is not finite")
    return value


def influence_function_of_mean(spec: SmoothFunctionOfMean, sample: EmpiricalSample, x):
    """``g'(xbar) * (x - xbar)``; ``x`` may be a scalar or an array."""
    m = sample.mean
    out = spec.g_prime(m) * (np.asarray(x, dtype=float) - m)
    if not np.all(np.isfinite(out)):
        raise NonFiniteResult(f"{spec.name}: influence function is not finite")
    return float(out) if np.ndim(out) == 0 else out


# --------------------------------------------------------------------------
# trimmed L-statistics

@dataclass(frozen=True, eq=False)
class WeightFunction:
    """A bounded weight function on (0, 1) that vanishes outside ``[alpha, 1-alpha]``.

    Piecewise-linear families (``box``, ``mesa``) carry ``segments`` of the
    form ``(s0, s1, v0, v1)`` and get exact cell integrals. Everything else is
    integrated with adaptive Simpson, splitting cells at ``breakpoints``.
    """

    kind: str
    alpha: float
    evaluator: Callable
    holder_order: Optional[float] = None
    params: tuple = ()
    segments: Optional[tuple] = None
    breakpoints: tuple = ()
    label: str = field(default="")

    def __post_init__(self):
        if not (0.0 <= self.alpha < 0.5):
            raise InvalidParams(f"trimming level must lie in (0, 1/2), got {self.alpha}")

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        inside = (s >= self.alpha) & (s <= 1.0 - self.alpha)
        out = np.where(inside, self.evaluator(s), 0.0)
        return float(out) if out.ndim == 0 else out

    @property
    def exact(self) -> bool:
        return self.segments is not None

    def antiderivative(self, s):
        """``int_0^s l`` for piecewise-linear weights (vectorised)."""
        if self.segments is None:
            raise TypeError(f"{self.kind} weights have no closed-form antiderivative")
        s = np.asarray(s, dtype=float)
        total = np.zeros_like(s)
        for s0, s1, v0, v1 in self.segments:
            t = np.clip(s, s0, s1) - s0
            slope = (v1 - v0) / (s1 - s0)
            total = total + t * v0 + 0.5 * slope * t * t
        return total

    def __str__(self):
        return self.label or self.kind


def _segments_evaluator(segments):
    def ev(s):
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        for s0, s1, v0, v1 in segments:
            mask = (s >= s0) & (s <= s1)
            out = np.where(mask, v0 + (v1 - v0) * (s - s0) / (s1 - s0), out)
        return out
    return ev


def box(alpha: float) -> WeightFunction:
    """``l = 1`` on ``[alpha, 1-alpha]``, endpoints included."""
    alpha = float(alpha)
    if not (0.0 < alpha < 0.5):
        raise InvalidParams(f"box trimming level must lie in (0, 1/2), got {alpha}")
    segs = ((alpha, 1.0 - alpha, 1.0, 1.0),)
    return WeightFunction("box", alpha, _segments_evaluator(segs), None, (alpha,), segs,
                          label=f"box({alpha!r})")


def mesa(a: float, b: float, c: float, d: float) -> WeightFunction:
    """Trapezoid of height 1: rises on ``[a, b]``, flat on ``[b, c]``, falls on ``[c, d]``."""
    a, b, c, d = map(float, (a, b, c, d))
    if not (0.0 < a <= b <= c <= d < 1.0) or a == d:
        raise InvalidParams(f"mesa needs 0 < a <= b <= c <= d < 1 with a < d, got {(a, b, c, d)}")
    segs = tuple(
        seg for seg in ((a, b, 0.0, 1.0), (b, c, 1.0, 1.0), (c, d, 1.0, 0.0)) if seg[1] > seg[0]
    )
    lipschitz = a < b and c < d
    return WeightFunction(
        "mesa", min(a, 1.0 - d), _segments_evaluator(segs), 1.0 if lipschitz else None,
        (a, b, c, d), segs, label=f"mesa({a!r},{b!r},{c!r},{d!r})",
    )


def holder_cusp(h: float, alpha: float) -> WeightFunction:
    """``l(s) = max(0, 1 - |2s-1|^h)`` on ``[alpha, 1-alpha]``; a Hölder-``h`` cusp at 1/2."""
    h, alpha = float(h), float(alpha)
    if not (0.0 < h <= 1.0):
        raise InvalidParams(f"cusp order must lie in (0, 1], got {h}")
    if not (0.0 < alpha < 0.5):
        raise InvalidParams(f"cusp trimming level must lie in (0, 1/2), got {alpha}")

    def ev(s):
        return np.maximum(0.0, 1.0 - np.abs(2.0 * np.asarray(s, dtype=float) - 1.0) ** h)

    return WeightFunction("holder_cusp", alpha, ev, h, (h, alpha),
                          breakpoints=(alpha, 0.5, 1.0 - alpha),
                          label=f"holder_cusp({h!r},{alpha!r})")


def custom_weight(evaluator: Callable, alpha: float, breakpoints=(), holder_order=None,
                  label="custom") -> WeightFunction:
    """Wrap a pure, bounded, vectorised ``evaluator``; values outside ``[alpha, 1-alpha]`` are zeroed."""
    alpha = float(alpha)
    bps = tuple(sorted({alpha, 1.0 - alpha, *map(float, breakpoints)}))
    return WeightFunction("custom", alpha, evaluator, holder_order, (), None, bps, label)


@dataclass(frozen=True, eq=False)
class TrimmedLStatistic:
    """``L(p) = int_0^1 P^{-1}(s) l(s) ds`` with a trimmed weight ``l``."""

    weight: WeightFunction

    @property
    def name(self) -> str:
        return str(self.weight)

    def __str__(self):
        return self.name


FunctionalSpec = Union[SmoothFunctionOfMean, TrimmedLStatistic]


def _as_weight(w) -> WeightFunction:
    return w.weight if isinstance(w, TrimmedLStatistic) else w


def _cell_integral(w: WeightFunction, lo: float, hi: float) -> float:
    f = lambda s: float(w(s))  # noqa: E731
    cuts = [lo] + [b for b in w.breakpoints if lo < b < hi] + [hi]
    return sum(adaptive_simpson(f, x0, x1, QUAD_TOL, QUAD_MAX_DEPTH) for x0, x1 in zip(cuts, cuts[1:]))


@lru_cache(maxsize=256)
def _l_weights_cached(w: WeightFunction, n: int) -> np.ndarray:
    grid = np.arange(n + 1) / n
    if w.exact:
        out = np.diff(w.antiderivative(grid))
    else:
        out = np.zeros(n)
        lo_sup, hi_sup = w.alpha, 1.0 - w.alpha
        for i in range(n):
            lo, hi = grid[i], grid[i + 1]
            if hi < lo_sup or lo > hi_sup:
                continue
            out[i] = _cell_integral(w, max(lo, lo_sup), min(hi, hi_sup))
    out.setflags(write=False)
    return out


def l_weights(w, n: int) -> np.ndarray:
    """Coefficients ``w_i = int_{(i-1)/n}^{i/n} l(s) ds`` for ``i = 1..n`` (read-only)."""
    if n < 1:
        raise InvalidParams(f"n must be positive, got {n}")
    return _l_weights_cached(_as_weight(w), int(n))


def weight_integral(w) -> float:
    """``int_0^1 l``."""
    w = _as_weight(w)
    if w.exact:
        return float(w.antiderivative(1.0))
    return _cell_integral(w, w.alpha, 1.0 - w.alpha)


def eval_l_statistic(w, sample: EmpiricalSample) -> float:
    """Plug-in L-statistic ``sum_i x_(i) w_i``."""
    value = float(np.dot(sample.values, l_weights(w, sample.n)))
    if not math.isfinite(value):
        raise NonFiniteResult("L-statistic is not finite")
    return value


def l_node_terms(w, sample: EmpiricalSample) -> np.ndarray:
    """``l(j/n) * (x_(j+1) - x_(j))`` for ``j = 1..n-1``."""
    n = sample.n
    if n < 2:
        raise TooFewSamples("L-statistic influence needs at least 2 observations")
    w = _as_weight(w)
    nodes = np.arange(1, n) / n
    return np.asarray(w(nodes)) * np.diff(sample.values)


def influence_l_statistic(w, sample: EmpiricalSample, x):
    """Empirical influence function of the L-statistic at ``x``.

    ``phi(x) = -sum_j (1{x <= x_(j)} - j/n) l(j/n) (x_(j+1) - x_(j))``.
    Accepts scalar or array ``x``.
    """
    c = l_node_terms(w, sample)
    n = sample.n
    j_over_n = np.arange(1, n) / n
    # suffix[k] = c[k:].sum(); x <= x_(j) holds exactly for 0-based j >= first
    suffix = np.concatenate([np.cumsum(c[::-1])[::-1], [0.0]])
    x_arr = np.asarray(x, dtype=float)
    first = np.searchsorted(sample.values[:-1], x_arr, side="left")
    out = float(np.dot(j_over_n, c)) - suffix[first]
    return float(out) if np.ndim(out) == 0 else out


# --------------------------------------------------------------------------
# dispatch

def evaluate(spec: FunctionalSpec, sample: EmpiricalSample) -> float:
    """Plug-in estimate ``T(eps_n)``."""
    if isinstance(spec, SmoothFunctionOfMean):
        return eval_function_of_mean(spec, sample)
    return eval_l_statistic(spec.weight, sample)


def influence(spec: FunctionalSpec, sample: EmpiricalSample, x):
    if isinstance(spec, SmoothFunctionOfMean):
        return influence_function_of_mean(spec, sample, x)
    return influence_l_statistic(spec.weight, sample, x)


_CALL = re.compile(r"^\s*([A-Za-z_]\w*)\s*(?:\((.*)\))?\s*$")

_BUILTINS = {
    "identity": (identity, 0),
    "square": (square, 0),
    "paper_sgn": (paper_sgn, 0),
}
_WEIGHTS = {"box": (box, 1), "mesa": (mesa, 4), "holder_cusp": (holder_cusp, 2)}


def parse_call(text: str):
    """Split ``"name(a, b)"`` into ``("name", [a, b])`` with float arguments."""
    m = _CALL.match(text)
    if not m:
        raise InvalidParams(f"cannot parse {text!r}")
    name, argtext = m.group(1), m.group(2)
    args = []
    if argtext is not None and argtext.strip():
        try:
            args = [float(a) for a in argtext.split(",")]
        except ValueError:
            raise InvalidParams(f"non-numeric argument in {text!r}") from None
    return name, args


def parse_functional(text: str) -> FunctionalSpec:
    """Resolve a registry name such as ``square`` or ``mesa(0.1,0.2,0.8,0.9)``."""
    name, args = parse_call(text)
    if name in _BUILTINS:
        spec, arity = _BUILTINS[name]
        if args:
            raise InvalidParams(f"{name} takes no arguments")
        return spec
    if name in _WEIGHTS:
        factory, arity = _WEIGHTS[name]
        if len(args) != arity:
            raise InvalidParams(f"{name} takes {arity} argument(s), got {len(args)}")
        return TrimmedLStatistic(factory(*args))
    raise InvalidParams(f"unknown functional {name!r}")
