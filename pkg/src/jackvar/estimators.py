"""Jackknife, infinitesimal jackknife and bootstrap estimates of ``sigma^2``.

Every estimator targets ``sigma^2 = lim Var(sqrt(n) T_n)`` so the three are
directly comparable. The bootstrap variance is therefore multiplied by ``n``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .empirical import EmpiricalSample
from .errors import InvalidB, NonFiniteResult, TooFewSamples
from .functionals import (
    FunctionalSpec,
    SmoothFunctionOfMean,
    evaluate,
    influence,
    l_node_terms,
    l_weights,
)

__all__ = [
    "PseudovalueSet",
    "VarianceEstimate",
    "DecompositionReport",
    "leave_one_out_estimates",
    "pseudovalues",
    "jackknife_variance",
    "infinitesimal_jackknife_variance",
    "bootstrap_variance",
    "decomposition",
    "JACKKNIFE",
    "INFINITESIMAL_JACKKNIFE",
    "BOOTSTRAP",
]

JACKKNIFE = "jackknife"
INFINITESIMAL_JACKKNIFE = "infinitesimal_jackknife"
BOOTSTRAP = "bootstrap"

# cap on resample matrix entries held in memory at once
_BOOT_CHUNK = 1 << 21


@dataclass(frozen=True, eq=False)
class PseudovalueSet:
    """``Q_i = n T_n - (n-1) T(eps_ni)``, indexed like the sorted sample."""

    values: np.ndarray
    base_estimate: float
    loo_estimates: np.ndarray

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class VarianceEstimate:
    value: float
    estimator_kind: str
    n: int
    aux: Optional[dict] = field(default=None, compare=False)

    def __float__(self):
        return self.value


@dataclass(frozen=True, eq=False)
class DecompositionReport:
    """Exact split of ``v_jack`` around the infinitesimal jackknife.

    ``delta[i] = (Q_i - Qbar) - phi(x_i)`` and
    ``v_jack = term1 + term2 + term3 + term4`` with
    ``term1 = mean(phi^2)``, ``term2 = term1/(n-1)``,
    ``term3 = 2/(n-1) sum(phi*delta)``, ``term4 = 1/(n-1) sum(delta^2)``.
    """

    delta: np.ndarray
    influence: np.ndarray
    term1: float
    term2: float
    term3: float
    term4: float
    v_jack: float

    @property
    def reconstructed(self) -> float:
        return self.term1 + self.term2 + self.term3 + self.term4


def _require_n(sample: EmpiricalSample, what: str):
    if sample.n < 2:
        raise TooFewSamples(f"{what} needs at least 2 observations, got {sample.n}")


def _loo_centered(spec: FunctionalSpec, sample: EmpiricalSample):
    """Leave-one-out estimates as ``(offset, centered)`` with ``T_i = offset + centered[i]``.

    Centering keeps the spread of the ``T_i`` free of the cancellation that
    a large common level would cause.
    """
    n = sample.n
    x = sample.values
    if isinstance(spec, SmoothFunctionOfMean):
        t = np.asarray(spec.g(sample.leave_one_out_means()), dtype=float)
        if t.shape != x.shape:
            t = np.broadcast_to(t, x.shape).astype(float)
        if not np.all(np.isfinite(t)):
            raise NonFiniteResult(f"{spec}: non-finite leave-one-out estimate")
        if sample.is_constant or np.all(t == t[0]):
            return float(t[0]), np.zeros(n)
        offset = float(np.mean(t))
        return offset, t - offset

    w = l_weights(spec.weight, n - 1)
    wsum = float(np.sum(w))
    if sample.is_constant:
        return float(x[0]) * wsum, np.zeros(n)
    shift = float(x[n // 2])
    xc = x - shift
    # T_k = sum_{j<k} x_j w_j + sum_{j>k} x_j w_{j-1}   (0-based, k deleted)
    head = np.concatenate([[0.0], np.cumsum(xc[:-1] * w)])
    tail_terms = xc[1:] * w
    tail = np.concatenate([np.cumsum(tail_terms[::-1])[::-1], [0.0]])
    centered = head + tail
    return shift * wsum, centered


def leave_one_out_estimates(spec: FunctionalSpec, sample: EmpiricalSample) -> np.ndarray:
    """``T(eps_ni)`` for every deleted order statistic ``i``."""
    _require_n(sample, "leave-one-out")
    offset, centered = _loo_centered(spec, sample)
    t = offset + centered
    if not np.all(np.isfinite(t)):
        raise NonFiniteResult(f"{spec}: non-finite leave-one-out estimate")
    return t


def pseudovalues(spec: FunctionalSpec, sample: EmpiricalSample) -> PseudovalueSet:
    _require_n(sample, "pseudovalues")
    n = sample.n
    t_n = evaluate(spec, sample)
    loo = leave_one_out_estimates(spec, sample)
    q = n * t_n - (n - 1) * loo
    return PseudovalueSet(q, t_n, loo)


def _pseudo_deviations(spec, sample) -> np.ndarray:
    """``Q_i - Qbar = -(n-1)(T_i - Tbar)``, computed without forming ``n T_n``."""
    n = sample.n
    _, centered = _loo_centered(spec, sample)
    if not np.all(np.isfinite(centered)):
        raise NonFiniteResult(f"{spec}: non-finite leave-one-out estimate")
    if np.all(centered == centered[0]):
        return np.zeros(n)
    return -(n - 1) * (centered - np.mean(centered))


def jackknife_variance(spec: FunctionalSpec, sample: EmpiricalSample) -> VarianceEstimate:
    """Sample variance (divisor ``n-1``) of the jackknife pseudovalues."""
    _require_n(sample, "jackknife variance")
    dev = _pseudo_deviations(spec, sample)
    value = float(np.dot(dev, dev)) / (sample.n - 1)
    return VarianceEstimate(value, JACKKNIFE, sample.n)


def ijack_double_sum(w, sample: EmpiricalSample) -> float:
    """``sum_ij l(i/n) l(j/n) (min(i,j)/n - ij/n^2) gap_i gap_j`` in O(n).

    Uses ``min(u,v) - uv = u_min (1 - u_max)`` so that for nonnegative
    weights every summand is nonnegative.
    """
    n = sample.n
    c = l_node_terms(w, sample)
    u = np.arange(1, n) / n
    r = c * (1.0 - u)
    # r_after[i] = sum_{j > i} r_j
    r_after = np.concatenate([np.cumsum(r[::-1])[::-1][1:], [0.0]])
    value = float(np.sum(c * u * (r + 2.0 * r_after)))
    return max(value, 0.0)


def infinitesimal_jackknife_variance(spec: FunctionalSpec, sample: EmpiricalSample) -> VarianceEstimate:
    """Plug-in ``E_{eps_n} phi^2`` of the asymptotic variance."""
    _require_n(sample, "infinitesimal jackknife")
    if isinstance(spec, SmoothFunctionOfMean):
        if sample.is_constant:
            value = 0.0
        else:
            m = sample.mean
            d = sample.values - m
            gp = float(spec.g_prime(m))
            value = gp * gp * float(np.dot(d, d)) / sample.n
    else:
        value = ijack_double_sum(spec.weight, sample)
    if not np.isfinite(value):
        raise NonFiniteResult(f"{spec}: infinitesimal jackknife is not finite")
    return VarianceEstimate(value, INFINITESIMAL_JACKKNIFE, sample.n)


def _resample_statistics(spec, x, idx):
    if isinstance(spec, SmoothFunctionOfMean):
        return np.asarray(spec.g(x[idx].mean(axis=1)), dtype=float)
    w = l_weights(spec.weight, x.shape[0])
    # x is sorted, so sorted indices give sorted resamples
    return x[np.sort(idx, axis=1)] @ w


def bootstrap_variance(spec: FunctionalSpec, sample: EmpiricalSample, B: int, seed: int) -> VarianceEstimate:
    """Monte Carlo bootstrap: ``n`` times the variance (divisor ``B-1``) of ``B`` resampled estimates."""
    _require_n(sample, "bootstrap variance")
    if int(B) != B or B < 2:
        raise InvalidB(f"bootstrap needs B >= 2 resamples, got {B}")
    B = int(B)
    n = sample.n
    x = sample.values
    rng = np.random.default_rng(seed)
    rows = max(1, _BOOT_CHUNK // n)
    stats = []
    done = 0
    while done < B:
        k = min(rows, B - done)
        stats.append(_resample_statistics(spec, x, rng.integers(0, n, size=(k, n))))
        done += k
    t = np.concatenate(stats)
    if not np.all(np.isfinite(t)):
        raise NonFiniteResult(f"{spec}: non-finite bootstrap replicate")
    if np.all(t == t[0]):
        value = 0.0
    else:
        value = n * float(np.var(t, ddof=1))
    return VarianceEstimate(value, BOOTSTRAP, n, {"B": B, "seed": seed})


def decomposition(spec: FunctionalSpec, sample: EmpiricalSample) -> DecompositionReport:
    _require_n(sample, "decomposition")
    n = sample.n
    dev = _pseudo_deviations(spec, sample)
    phi = np.asarray(influence(spec, sample, sample.values), dtype=float)
    delta = dev - phi
    term1 = float(np.dot(phi, phi)) / n
    v_jack = float(np.dot(dev, dev)) / (n - 1)
    return DecompositionReport(
        delta=delta,
        influence=phi,
        term1=term1,
        term2=term1 / (n - 1),
        term3=2.0 * float(np.dot(phi, delta)) / (n - 1),
        term4=float(np.dot(delta, delta)) / (n - 1),
        v_jack=v_jack,
    )
