"""Sign-change bracketing on adaptively refined grids.

Shared by the cycle finder and the Melnikov zero counter.  A uniform base
grid is refined around local minima of |f| (where close root pairs hide)
and around existing sign changes until two consecutive refinement levels
agree on the root count; persistent disagreement is reported, never
silently resolved.
"""

from __future__ import annotations

import numpy as np

from .errors import CountUnstableError

__all__ = ["scan_roots", "bisect_root"]


def _root_count(fs):
    count = 0
    prev = 0.0
    for f in fs:
        if f == 0.0:
            count += 1
            continue
        if prev != 0.0 and (f > 0.0) != (prev > 0.0):
            count += 1
        prev = f
    return count


def _suspicious_cells(xs, fs):
    cells = set()
    n = len(xs)
    for i in range(n - 1):
        a, b = fs[i], fs[i + 1]
        if a == 0.0 or b == 0.0 or (a > 0.0) != (b > 0.0):
            cells.add(i)
    for i in range(1, n - 1):
        if abs(fs[i]) <= abs(fs[i - 1]) and abs(fs[i]) <= abs(fs[i + 1]):
            cells.add(i - 1)
            cells.add(i)
    return sorted(cells)


def _refine(fun, xs, fs, insert):
    new_xs, new_fs = [], []
    cells = set(_suspicious_cells(xs, fs))
    for i in range(len(xs) - 1):
        new_xs.append(xs[i])
        new_fs.append(fs[i])
        if i in cells:
            for x in np.linspace(xs[i], xs[i + 1], insert + 2)[1:-1]:
                new_xs.append(float(x))
                new_fs.append(fun(float(x)))
    new_xs.append(xs[-1])
    new_fs.append(fs[-1])
    return new_xs, new_fs


def scan_roots(fun, lo, hi, n, max_refine=5, insert=8):
    """Bracket every sign change of ``fun`` on [lo, hi].

    Returns (exact_roots, brackets) where brackets are
    (x_lo, x_hi, f_lo_positive) triples.  Raises CountUnstableError when
    the count keeps changing between refinement levels.
    """
    xs = [float(v) for v in np.linspace(lo, hi, n)]
    fs = [fun(x) for x in xs]
    counts = [_root_count(fs)]
    while True:
        xs, fs = _refine(fun, xs, fs, insert)
        counts.append(_root_count(fs))
        if counts[-1] == counts[-2]:
            break
        if len(counts) > max_refine:
            raise CountUnstableError(
                f"root count did not stabilize across refinements: {counts}"
            )
    exact = [x for x, f in zip(xs, fs) if f == 0.0]
    brackets = []
    prev_i = None
    for i, f in enumerate(fs):
        if f == 0.0:
            continue
        if prev_i is not None and (f > 0.0) != (fs[prev_i] > 0.0):
            brackets.append((xs[prev_i], xs[i], fs[prev_i] > 0.0))
        prev_i = i
    return exact, brackets


def bisect_root(fun, lo, hi, f_lo_positive, xtol=1e-12):
    """Plain bisection of a bracketed sign change down to width ``xtol``."""
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        fm = fun(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == f_lo_positive:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
