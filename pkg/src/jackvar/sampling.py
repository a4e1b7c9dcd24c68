"""Seeded population models and their true asymptotic variances.

Draws use numpy's PCG64 generator (``numpy.random.default_rng``). Replicate
seeds come from :func:`derive_seed`, which feeds ``(master_seed, n,
replicate, stream)`` to ``numpy.random.SeedSequence`` and takes the first
64-bit word of its output. The mapping depends only on its arguments, so
replicates can be computed in any order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate, special, stats

from .empirical import EmpiricalSample, from_samples
from .errors import InsufficientMoments, InvalidParams
from .functionals import (
    FunctionalSpec,
    SmoothFunctionOfMean,
    TrimmedLStatistic,
    parse_call,
)

__all__ = ["PopulationModel", "derive_seed", "draw", "true_sigma_squared", "parse_model"]

_ARITY = {"normal": 2, "uniform": 2, "exponential": 1, "student_t": 1, "two_point": 3}

TRUTH_TOL = 1e-8


def derive_seed(master_seed: int, n: int, replicate: int, stream: int = 0) -> int:
    """Order-free per-replicate seed."""
    ss = np.random.SeedSequence([int(master_seed) & 0xFFFFFFFFFFFFFFFF, int(n), int(replicate), int(stream)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class PopulationModel:
    """A named univariate population.

    Parameters are positional as in the registry strings:
    ``normal(mean, sd)``, ``uniform(a, b)``, ``exponential(rate)``,
    ``student_t(df)``, ``two_point(x0, x1, q)`` where ``q = P(X = x1)``.
    """

    kind: str
    params: tuple

    def __post_init__(self):
        if self.kind not in _ARITY:
            raise InvalidParams(f"unknown population model {self.kind!r}")
        if len(self.params) != _ARITY[self.kind]:
            raise InvalidParams(f"{self.kind} takes {_ARITY[self.kind]} parameter(s), got {len(self.params)}")
        p = tuple(float(v) for v in self.params)
        if not all(math.isfinite(v) for v in p):
            raise InvalidParams(f"{self.kind} parameters must be finite")
        object.__setattr__(self, "params", p)
        ok = {
            "normal": lambda mu, sd: sd > 0,
            "uniform": lambda a, b: a < b,
            "exponential": lambda lam: lam > 0,
            "student_t": lambda nu: nu > 0,
            "two_point": lambda x0, x1, q: 0 < q < 1,
        }[self.kind](*p)
        if not ok:
            raise InvalidParams(f"invalid parameters for {self.kind}: {p}")

    @property
    def moment_order(self) -> float:
        """Supremum of orders with finite absolute moment (moments below it are finite)."""
        if self.kind == "student_t":
            return self.params[0]
        return math.inf

    def has_moment(self, order: float) -> bool:
        return order < self.moment_order

    @property
    def continuous(self) -> bool:
        return self.kind != "two_point"

    def _dist(self):
        k, p = self.kind, self.params
        if k == "normal":
            return stats.norm(loc=p[0], scale=p[1])
        if k == "uniform":
            return stats.uniform(loc=p[0], scale=p[1] - p[0])
        if k == "exponential":
            return stats.expon(scale=1.0 / p[0])
        if k == "student_t":
            return stats.t(df=p[0])
        return None

    def cdf(self, x):
        k, p = self.kind, self.params
        if k == "normal":
            return special.ndtr((np.asarray(x, dtype=float) - p[0]) / p[1])
        if k == "uniform":
            return np.clip((np.asarray(x, dtype=float) - p[0]) / (p[1] - p[0]), 0.0, 1.0)
        if k == "exponential":
            return -np.expm1(-p[0] * np.maximum(np.asarray(x, dtype=float), 0.0))
        if k == "student_t":
            return special.stdtr(p[0], np.asarray(x, dtype=float))
        x0, x1, q = p
        x = np.asarray(x, dtype=float)
        low_mass = q if x1 < x0 else 1.0 - q
        return np.where(x >= max(x0, x1), 1.0, np.where(x >= min(x0, x1), low_mass, 0.0))

    def ppf(self, s):
        return self._dist().ppf(s)

    def mean_var(self):
        """Population mean and variance (variance ``inf`` when it does not exist)."""
        k, p = self.kind, self.params
        if k == "normal":
            return p[0], p[1] ** 2
        if k == "uniform":
            return 0.5 * (p[0] + p[1]), (p[1] - p[0]) ** 2 / 12.0
        if k == "exponential":
            return 1.0 / p[0], 1.0 / p[0] ** 2
        if k == "student_t":
            nu = p[0]
            mean = 0.0 if nu > 1 else math.nan
            var = nu / (nu - 2) if nu > 2 else math.inf
            return mean, var
        x0, x1, q = p
        mean = (1 - q) * x0 + q * x1
        return mean, q * (1 - q) * (x1 - x0) ** 2

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        k, p = self.kind, self.params
        if k == "normal":
            return rng.normal(p[0], p[1], size=n)
        if k == "uniform":
            return rng.uniform(p[0], p[1], size=n)
        if k == "exponential":
            return rng.exponential(1.0 / p[0], size=n)
        if k == "student_t":
            return rng.standard_t(p[0], size=n)
        x0, x1, q = p
        return np.where(rng.random(n) < q, x1, x0)

    def __str__(self):
        return f"{self.kind}({','.join(repr(v) for v in self.params)})"


def parse_model(text: str) -> PopulationModel:
    """Resolve a registry string such as ``normal(0,1)`` or ``student_t(1.5)``."""
    name, args = parse_call(text)
    return PopulationModel(name, tuple(args))


def draw(model: PopulationModel, n: int, seed: int) -> EmpiricalSample:
    """``n`` iid draws from ``model``; identical for identical ``(model, n, seed)``."""
    if int(n) != n or n < 1:
        raise InvalidParams(f"sample size must be a positive integer, got {n}")
    rng = np.random.default_rng(seed)
    return from_samples(model.sample(rng, int(n)))


def _l_truth(model: PopulationModel, weight) -> float:
    """Double integral of ``l(P(y)) [P(y^z) - P(y)P(z)] l(P(z))`` over the plane.

    Written as ``2 int_{y<z} l(P(y)) P(y) (1-P(z)) l(P(z)) dz dy`` over the
    finite window ``[P^-1(alpha), P^-1(1-alpha)]`` outside of which ``l(P)`` vanishes.
    """
    lo, hi = float(model.ppf(weight.alpha)), float(model.ppf(1.0 - weight.alpha))
    knots = set()
    for bp in weight.breakpoints:
        knots.add(bp)
    for seg in weight.segments or ():
        knots.update(seg[:2])
    pts = sorted(float(model.ppf(s)) for s in knots if weight.alpha < s < 1 - weight.alpha)

    def lp(y):
        return float(weight(float(model.cdf(y))))

    def inner(y):
        inner_pts = [p for p in pts if y < p < hi] or None
        val, _ = integrate.quad(
            lambda z: (1.0 - float(model.cdf(z))) * lp(z), y, hi,
            epsabs=TRUTH_TOL, epsrel=0.0, limit=200, points=inner_pts,
        )
        return val

    def outer(y):
        wy = lp(y)
        if wy == 0.0:
            return 0.0
        return wy * float(model.cdf(y)) * inner(y)

    val, _ = integrate.quad(outer, lo, hi, epsabs=TRUTH_TOL, epsrel=0.0, limit=200, points=pts or None)
    return 2.0 * val


def true_sigma_squared(model: PopulationModel, spec: FunctionalSpec) -> Optional[float]:
    """Asymptotic variance of ``sqrt(n)(T_n - T(p))`` under ``model``, or ``None``.

    Function of the mean: ``g'(mu)^2 Var(X)``; needs a finite second moment.
    Trimmed L-statistic: numeric double integral against the model cdf;
    only for continuous models.
    """
    if isinstance(spec, SmoothFunctionOfMean):
        if not model.has_moment(2.0):
            raise InsufficientMoments(
                f"{model} has no finite second moment (moment order {model.moment_order})"
            )
        mu, var = model.mean_var()
        gp = float(spec.g_prime(mu))
        return gp * gp * var
    if isinstance(spec, TrimmedLStatistic):
        if not model.continuous:
            return None
        return _l_truth(model, spec.weight)
    return None
