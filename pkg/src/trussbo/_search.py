"""Seed-free deterministic line/coordinate search used by the GP fitter and
the acquisition maximizer."""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(
    f: Callable[[float], float], lo: float, hi: float, iters: int
) -> tuple[float, float]:
    """Maximize ``f`` on [lo, hi]; returns the best evaluated (x, f(x)).

    Plain golden-section bracketing, ``iters + 2`` evaluations. Exact for
    unimodal functions, a deterministic local heuristic otherwise.
    """
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc = f(c)
    fd = f(d)
    if fc >= fd:
        best_x, best_f = c, fc
    else:
        best_x, best_f = d, fd
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
            if fc > best_f:
                best_x, best_f = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
            if fd > best_f:
                best_x, best_f = d, fd
    return best_x, best_f


def coordinate_ascent(
    f: Callable[[np.ndarray], float],
    x0: Sequence[float],
    lo: Sequence[float],
    hi: Sequence[float],
    *,
    sweeps: int,
    line_iters: int,
) -> tuple[np.ndarray, float]:
    """Coordinate-wise golden-section ascent of ``f`` inside a box.

    Each coordinate move is accepted only on strict improvement, so the
    result never scores worse than the starting point.
    """
    x = np.array(x0, dtype=float)
    fx = f(x)
    for _ in range(sweeps):
        for i in range(len(x)):
            def line(v: float, _i: int = i) -> float:
                y = x.copy()
                y[_i] = v
                return f(y)

            xi, fi = golden_section_max(line, float(lo[i]), float(hi[i]), line_iters)
            if fi > fx:
                x[i] = xi
                fx = fi
    return x, fx
