"""Adaptive Simpson quadrature for bounded integrands on short intervals."""
from __future__ import annotations

import heapq

from .errors import QuadratureFailure

__all__ = ["adaptive_simpson"]


def _simpson(fa, fm, fb, a, b):
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def _panel(f, a, b, fa, fm, fb, whole, depth):
    """Split ``[a, b]`` once; return a heap entry carrying the local error estimate."""
    m = 0.5 * (a + b)
    flm, frm = f(0.5 * (a + m)), f(0.5 * (m + b))
    left = _simpson(fa, flm, fm, a, m)
    right = _simpson(fm, frm, fb, m, b)
    delta = left + right - whole
    # |delta| rather than |delta|/15: the /15 rule presumes four derivatives and
    # underestimates the error next to a |s - c|^h cusp
    err = abs(delta)
    value = left + right + delta / 15.0
    return (-err, a, b, depth, value, (fa, flm, fm, frm, fb), left, right)


def adaptive_simpson(f, a, b, tol=1e-10, max_depth=30):
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance ``tol``.

    Globally adaptive: the panel with the largest error estimate
    ``|S_left + S_right - S_whole|`` is bisected until the summed estimate is
    at most ``tol``. Panels are never bisected more than ``max_depth`` times.
    The returned value includes the Richardson correction.

    Raises
    ------
    QuadratureFailure
        If the tolerance is still missed when the worst panel is at ``max_depth``.
    """
    if a == b:
        return 0.0
    if b < a:
        return -adaptive_simpson(f, b, a, tol, max_depth)
    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    heap = [_panel(f, a, b, fa, fm, fb, _simpson(fa, fm, fb, a, b), 0)]
    total_err = -heap[0][0]
    while total_err > tol:
        neg_err, a0, b0, depth, _, (fa0, flm, fm0, frm, fb0), left, right = heapq.heappop(heap)
        if depth >= max_depth:
            raise QuadratureFailure(
                f"adaptive Simpson missed tolerance {tol:g} (estimate {total_err:.3g}); "
                f"panel [{a0!r}, {b0!r}] reached depth {max_depth}"
            )
        m0 = 0.5 * (a0 + b0)
        kids = (
            _panel(f, a0, m0, fa0, flm, fm0, left, depth + 1),
            _panel(f, m0, b0, fm0, frm, fb0, right, depth + 1),
        )
        for k in kids:
            heapq.heappush(heap, k)
        # recompute rather than update to keep the running sum from drifting
        total_err = sum(-e[0] for e in heap)
    return sum(e[4] for e in heap)
