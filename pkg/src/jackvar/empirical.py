"""Empirical distributions of a univariate sample and their leave-one-out variants.

Observations are stored sorted; every estimator downstream is invariant under
permutation of the input, so the original order is discarded.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import (
    EmptySample,
    IndexOutOfRange,
    NonFiniteValue,
    OutOfRange,
    SampleFileError,
    TooFewSamples,
)

__all__ = [
    "EmpiricalSample",
    "LeaveOneOutSample",
    "from_samples",
    "read_sample_file",
]


@dataclass(frozen=True, eq=False)
class EmpiricalSample:
    """Sorted observations, each carrying mass ``1/n``.

    Build instances with :func:`from_samples`; the constructor trusts that
    ``values`` is already a sorted, finite, read-only float array.
    """

    values: np.ndarray

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @cached_property
    def mean(self) -> float:
        v = self.values
        if v[0] == v[-1]:
            # constant sample: avoid rounding in sum/n
            return float(v[0])
        return float(np.mean(v))

    @property
    def is_constant(self) -> bool:
        return bool(self.values[0] == self.values[-1])

    def count_le(self, x: float) -> int:
        """Number of observations ``<= x``."""
        return int(np.searchsorted(self.values, x, side="right"))

    def cdf(self, x: float) -> float:
        """Right-continuous empirical cdf ``#{x_i <= x} / n``."""
        return self.count_le(x) / self.n

    def quantile(self, s: float) -> float:
        """Generalized inverse ``min{x_i : cdf(x_i) >= s}`` for ``0 < s <= 1``."""
        if not (0.0 < s <= 1.0):
            raise OutOfRange(f"quantile level must lie in (0, 1], got {s!r}")
        n = self.n
        k = min(max(math.ceil(n * s), 1), n)
        # correct float rounding of n*s so that k is the least k with k/n >= s
        while k > 1 and (k - 1) / n >= s:
            k -= 1
        while k < n and k / n < s:
            k += 1
        return float(self.values[k - 1])

    def leave_one_out(self, i: int) -> LeaveOneOutSample:
        """Drop the ``i``-th order statistic (1-based)."""
        if self.n < 2:
            raise TooFewSamples("leave-one-out needs at least 2 observations")
        if not 1 <= i <= self.n:
            raise IndexOutOfRange(f"index {i} outside 1..{self.n}")
        return LeaveOneOutSample(self, i)

    def leave_one_out_means(self) -> np.ndarray:
        """All ``n`` leave-one-out means in O(n), ordered like ``values``."""
        n = self.n
        if n < 2:
            raise TooFewSamples("leave-one-out needs at least 2 observations")
        m = self.mean
        return m - (self.values - m) / (n - 1)

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"EmpiricalSample(n={self.n}, mean={self.mean:.6g})"


@dataclass(frozen=True, eq=False)
class LeaveOneOutSample:
    """The empirical measure of ``parent`` with one observation removed.

    ``omitted_index`` is 1-based into the parent's sorted values. The
    remaining ``n - 1`` observations each carry mass ``1/(n-1)``.
    """

    parent: EmpiricalSample
    omitted_index: int

    @property
    def n(self) -> int:
        return self.parent.n - 1

    @property
    def omitted_value(self) -> float:
        return float(self.parent.values[self.omitted_index - 1])

    @property
    def values(self) -> np.ndarray:
        return np.delete(self.parent.values, self.omitted_index - 1)

    @property
    def mean(self) -> float:
        p = self.parent
        return (p.n * p.mean - self.omitted_value) / (p.n - 1)

    def count_le(self, t: float) -> int:
        return self.parent.count_le(t) - (1 if self.omitted_value <= t else 0)

    def cdf(self, t: float) -> float:
        return self.count_le(t) / self.n

    def as_sample(self) -> EmpiricalSample:
        return _wrap(self.values.copy())


def _wrap(arr: np.ndarray) -> EmpiricalSample:
    arr.setflags(write=False)
    return EmpiricalSample(arr)


def from_samples(values) -> EmpiricalSample:
    """Build an :class:`EmpiricalSample` from any iterable of reals."""
    arr = np.array(values, dtype=float).ravel()
    if arr.size == 0:
        raise EmptySample("sample has no observations")
    if not np.all(np.isfinite(arr)):
        bad = arr[~np.isfinite(arr)][0]
        raise NonFiniteValue(f"sample contains non-finite value {bad!r}")
    arr.sort(kind="stable")
    return _wrap(arr)


def read_sample_file(path) -> EmpiricalSample:
    """Read one observation per line; blank lines and ``#`` lines are skipped."""
    path = Path(path)
    values = []
    with path.open() as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise SampleFileError(
                    f"{path}:{lineno}: cannot parse {line!r} as a number"
                ) from None
    try:
        return from_samples(values)
    except (EmptySample, NonFiniteValue) as exc:
        raise type(exc)(f"{path}: {exc}") from None
