"""Parameter state and the saturated piecewise-linear field.

The equation under study is

    x' = eps * f(x) + mu * sin(t) + lam,

with f(x) = a*x + (b - a)*sat(x), i.e. slope ``b`` on [-1, 1] and slope
``a`` outside.  ``eps`` scales the field (eps=1 is the plain equation) and
``lam`` is a constant bias used by the crossing-time machinery; both
default to the unmodified equation so one parameter type covers every
variant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

__all__ = ["Params", "SymmetryTransform", "sat", "f_eval", "symmetry_reduce"]


def sat(x: float) -> float:
    """Normalized saturation: identity on [-1, 1], clamped to +-1 outside."""
    if x > 1.0:
        return 1.0
    if x < -1.0:
        return -1.0
    return x


@dataclass(frozen=True)
class Params:
    """Full parameter state (a, b, mu) plus the eps/lam deformation scalars."""

    a: float
    b: float
    mu: float
    eps: float = 1.0
    lam: float = 0.0

    def __post_init__(self):
        for name in ("a", "b", "mu", "eps", "lam"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"parameter {name} must be finite, got {v!r}")

    @property
    def product_sign(self) -> str:
        """Sign of a*b as one of 'neg', 'zero', 'pos' (always recomputed)."""
        ab = self.a * self.b
        if ab > 0.0:
            return "pos"
        if ab < 0.0:
            return "neg"
        return "zero"

    @property
    def a_eff(self) -> float:
        """Outer-zone slope of the effective field eps*f."""
        return self.eps * self.a

    @property
    def b_eff(self) -> float:
        """Inner-zone slope of the effective field eps*f."""
        return self.eps * self.b


def f_eval(p: Params, x: float) -> float:
    """The piecewise-linear field f(x) = a*x + (b - a)*sat(x).

    Equals a*x + (a - b) for x <= -1, b*x on [-1, 1], and a*x + (b - a)
    for x >= 1; odd in x and continuous at the breakpoints.
    """
    return p.a * x + (p.b - p.a) * sat(x)


@dataclass(frozen=True)
class SymmetryTransform:
    """Record of the variable changes applied by :func:`symmetry_reduce`.

    ``phase_shifted`` flips the sign of mu (t -> t + pi), ``time_reversed``
    flips the signs of both slopes (t -> -t).  Each is an involution.
    """

    time_reversed: bool = False
    phase_shifted: bool = False

    def apply(self, p: Params) -> Params:
        q = p
        if self.time_reversed:
            q = replace(q, a=-q.a, b=-q.b)
        if self.phase_shifted:
            q = replace(q, mu=-q.mu)
        return q


def symmetry_reduce(p: Params) -> tuple[Params, SymmetryTransform]:
    """Return an equivalent parameter set with mu >= 0 and the transform used.

    The shift t -> t + pi maps solutions of the mu-equation onto solutions
    of the (-mu)-equation, so cycle counts and multipliers are preserved;
    a cycle x0 of the reduced equation corresponds to the cycle through
    u(pi, 0, x0) of the original one.
    """
    if p.mu < 0.0:
        transform = SymmetryTransform(phase_shifted=True)
        return transform.apply(p), transform
    return p, SymmetryTransform()
