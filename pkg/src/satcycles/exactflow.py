"""Event-driven exact integration of the saturated forcing equation.

Inside one linearity zone the equation reduces to x' = p*x + q + mu*sin(t),
whose solution is elementary.  Trajectories are assembled by chaining that
closed form between zone-boundary contacts located by a uniform scan plus
bisection; a contact switches zones only when the flow actually leaves the
zone (tangential grazes are skipped).  A fixed-step RK4 integrator of the
continuous right-hand side is provided as an independent oracle for tests.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .errors import ZoneSwitchLimitError
from .model import Params

__all__ = [
    "LOWER",
    "INNER",
    "UPPER",
    "ZoneCoeffs",
    "Segment",
    "Trajectory",
    "zone_of",
    "zone_coeffs",
    "linear_zone_flow",
    "first_crossing",
    "advance",
    "rk4_oracle",
    "sample",
    "transitions",
]

TWO_PI = 2.0 * math.pi

LOWER = "lower"
INNER = "inner"
UPPER = "upper"

# |p| below this uses the exact p=0 form; avoids cancellation in (e^{p dt}-1)/p.
P_DEGENERATE = 1e-10
# Scan resolution for contact detection, samples per forcing period per zone.
SCAN_PER_PERIOD = 256
CROSSING_TIME_TOL = 1e-12
# A located contact with |du/dt| below this is treated as a potential graze.
GRAZE_DERIV_TOL = 1e-9
GRAZE_PROBE_DT = 1e-9
# An in-zone extremum counts as a boundary contact when this close to the level.
TOUCH_VALUE_TOL = 1e-12


@dataclass(frozen=True)
class ZoneCoeffs:
    """Per-zone linear equation x' = p*x + q + mu*sin(t)."""

    p: float
    q: float


@dataclass(frozen=True)
class Segment:
    t_start: float
    t_end: float
    zone: str
    entry_state: float


@dataclass(frozen=True)
class Trajectory:
    """Piecewise record of one solution over [tau, t_end].

    ``a_in_measure`` is the total time spent with |u| <= 1; the half
    measure is the same restricted to the first half period
    [tau, tau + pi].
    """

    segments: tuple[Segment, ...]
    a_in_measure: float
    a_in_half_measure: float
    final_state: float

    @property
    def t_start(self) -> float:
        return self.segments[0].t_start

    @property
    def t_end(self) -> float:
        return self.segments[-1].t_end


def zone_of(x: float) -> str:
    """Zone membership; |x| = 1 is assigned to the inner zone."""
    if x > 1.0:
        return UPPER
    if x < -1.0:
        return LOWER
    return INNER


def zone_coeffs(p: Params, zone: str) -> ZoneCoeffs:
    """Linear coefficients of eps*f(x) + lam on the given zone."""
    if zone == INNER:
        return ZoneCoeffs(p.b_eff, p.lam)
    if zone == UPPER:
        return ZoneCoeffs(p.a_eff, p.eps * (p.b - p.a) + p.lam)
    if zone == LOWER:
        return ZoneCoeffs(p.a_eff, p.eps * (p.a - p.b) + p.lam)
    raise ValueError(f"unknown zone {zone!r}")


def _exp(z: float) -> float:
    # math.exp raises OverflowError near 710; saturate instead.
    return math.exp(z) if z < 709.0 else math.inf


def linear_zone_flow(z: ZoneCoeffs, mu: float, tau: float, x: float, t: float) -> float:
    """Closed-form solution of x' = p*x + q + mu*sin(t) with value x at tau."""
    p, q = z.p, z.q
    dt = t - tau
    if abs(p) < P_DEGENERATE:
        return x + q * dt + mu * (math.cos(tau) - math.cos(t))
    e = _exp(p * dt)
    c = p * p + 1.0
    return (
        e * x
        + (q / p) * (e - 1.0)
        + mu * (e * (p * math.sin(tau) + math.cos(tau)) - (p * math.sin(t) + math.cos(t))) / c
    )


def _flow_grid(z: ZoneCoeffs, mu: float, tau: float, x: float, ts: np.ndarray) -> np.ndarray:
    """Vectorized :func:`linear_zone_flow` over an array of times."""
    p, q = z.p, z.q
    dt = ts - tau
    if abs(p) < P_DEGENERATE:
        return x + q * dt + mu * (math.cos(tau) - np.cos(ts))
    with np.errstate(over="ignore"):
        e = np.exp(p * dt)
    c = p * p + 1.0
    return (
        e * x
        + (q / p) * (e - 1.0)
        + mu * (e * (p * math.sin(tau) + math.cos(tau)) - (p * np.sin(ts) + np.cos(ts))) / c
    )


def _flow_deriv(z: ZoneCoeffs, mu: float, t: float, u: float) -> float:
    return z.p * u + z.q + mu * math.sin(t)


def _bisect_contact(z, mu, tau, x, level, lo, hi, g_lo_pos):
    """Refine a bracketed level crossing to CROSSING_TIME_TOL, then polish."""
    while hi - lo > CROSSING_TIME_TOL:
        mid = 0.5 * (lo + hi)
        gm = linear_zone_flow(z, mu, tau, x, mid) - level
        if gm == 0.0:
            lo = hi = mid
            break
        if (gm > 0.0) == g_lo_pos:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    # Newton polish toward machine precision; stay inside the bracket.
    for _ in range(3):
        g = linear_zone_flow(z, mu, tau, x, root) - level
        if g == 0.0:
            break
        dg = _flow_deriv(z, mu, root, g + level)
        if dg == 0.0:
            break
        nxt = root - g / dg
        if not lo <= nxt <= hi:
            break
        root = nxt
    return root


def _bisect_extremum(z, mu, tau, x, lo, hi, d_lo_pos):
    """Locate a zero of the flow time-derivative inside [lo, hi]."""
    def deriv(s):
        return _flow_deriv(z, mu, s, linear_zone_flow(z, mu, tau, x, s))

    while hi - lo > CROSSING_TIME_TOL:
        mid = 0.5 * (lo + hi)
        dm = deriv(mid)
        if dm == 0.0:
            return mid
        if (dm > 0.0) == d_lo_pos:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _next_contact(z, mu, tau, x, levels, t_max):
    """Earliest time in (tau, t_max] where the in-zone flow meets any level.

    Returns (time, level) or None.  Both transversal crossings and
    tangential touches (flow extremum landing on a level) are contacts.
    """
    if not t_max > tau:
        return None
    p, q = z.p, z.q

    # Starting exactly on a queried level: establish the departure side a
    # hair later so the sign scan has a nonzero reference.
    t_ref, u_ref = tau, x
    if any(x == lv for lv in levels):
        for off in (GRAZE_PROBE_DT, TWO_PI / SCAN_PER_PERIOD / 16.0):
            t_probe = min(tau + off, t_max)
            u_probe = linear_zone_flow(z, mu, tau, x, t_probe)
            if all(u_probe != lv for lv in levels):
                t_ref, u_ref = t_probe, u_probe
                break
        else:
            return None  # flow is glued to the boundary; nothing to report

    step = TWO_PI / SCAN_PER_PERIOD
    n = max(1, int(math.ceil((t_max - t_ref) / step - 1e-12)))
    ts = t_ref + step * np.arange(1, n + 1)
    ts[-1] = t_max
    us = _flow_grid(z, mu, tau, x, ts)
    dus = p * us + q + mu * np.sin(ts)

    t_l, u_l = t_ref, u_ref
    du_l = p * u_l + q + mu * math.sin(t_l)
    for i in range(n):
        t_r, u_r, du_r = float(ts[i]), float(us[i]), float(dus[i])
        if t_r <= t_l:
            continue
        candidates = []
        # Tangential touch: derivative changes sign, extremum sits on a level.
        if (du_l > 0.0) != (du_r > 0.0):
            t_ext = _bisect_extremum(z, mu, tau, x, t_l, t_r, du_l > 0.0)
            u_ext = linear_zone_flow(z, mu, tau, x, t_ext)
            for lv in levels:
                if abs(u_ext - lv) <= TOUCH_VALUE_TOL:
                    candidates.append((t_ext, lv))
        # Transversal crossing: value changes side.
        for lv in levels:
            g_l, g_r = u_l - lv, u_r - lv
            if g_r == 0.0:
                candidates.append((t_r, lv))
            elif (g_l > 0.0) != (g_r > 0.0):
                root = _bisect_contact(z, mu, tau, x, lv, t_l, t_r, g_l > 0.0)
                candidates.append((root, lv))
        if candidates:
            return min(candidates)
        t_l, u_l, du_l = t_r, u_r, du_r
    return None


def first_crossing(z: ZoneCoeffs, mu: float, tau: float, x: float, level: float,
                   t_max: float):
    """Smallest s in (tau, t_max] with flow value equal to ``level``, else None.

    Tangential contacts are reported too; whether they switch zones is the
    caller's decision (see :func:`advance`).
    """
    hit = _next_contact(z, mu, tau, x, (level,), t_max)
    return None if hit is None else hit[0]


_ZONE_EXITS = {INNER: (-1.0, 1.0), UPPER: (1.0,), LOWER: (-1.0,)}
_NEIGHBOR = {(INNER, 1.0): UPPER, (INNER, -1.0): LOWER, (UPPER, 1.0): INNER, (LOWER, -1.0): INNER}


def _departure_zone(p: Params, tau: float, x: float, t_end: float) -> str:
    """Zone to integrate in when starting exactly on a breakpoint.

    The field is continuous, so the initial derivative is zone-independent
    and its sign tells which side the solution moves to; a grazing start
    (zero derivative) is resolved by probing the inner-zone extension.
    """
    z = zone_coeffs(p, INNER)
    xdot = z.p * x + z.q + p.mu * math.sin(tau)
    if xdot == 0.0:
        probe = linear_zone_flow(z, p.mu, tau, x, min(tau + GRAZE_PROBE_DT, t_end))
        xdot = probe - x
    if x == 1.0:
        return UPPER if xdot > 0.0 else INNER
    return LOWER if xdot < 0.0 else INNER


def advance(p: Params, tau: float, x: float, t_end: float,
            max_switches: int = 10_000) -> Trajectory:
    """Exact solution over [tau, t_end] chained across zone crossings.

    Fails only when the zone-switch count exceeds ``max_switches``; genuine
    solutions cross at most a few times per period, so hitting the cap
    always signals a tolerance pathology.
    """
    if t_end < tau:
        raise ValueError("t_end must be >= tau")
    zone = zone_of(x)
    if x == 1.0 or x == -1.0:
        zone = _departure_zone(p, tau, x, t_end)
    segments = []
    seg_t, seg_x = tau, x
    search_t, search_x = tau, x
    events = 0
    while True:
        z = zone_coeffs(p, zone)
        hit = _next_contact(z, p.mu, search_t, search_x, _ZONE_EXITS[zone], t_end)
        if hit is None:
            segments.append(Segment(seg_t, t_end, zone, seg_x))
            final = linear_zone_flow(z, p.mu, seg_t, seg_x, t_end)
            break
        s, level = hit
        events += 1
        if events > max_switches:
            raise ZoneSwitchLimitError(
                f"more than {max_switches} zone contacts in [{tau}, {t_end}]"
            )
        # Switch zones only when the flow actually leaves the zone; a grazing
        # contact (zero derivative, no side change just after) is skipped.
        xdot = z.p * level + z.q + p.mu * math.sin(s)
        inside_pos = zone == UPPER or (zone == INNER and level == -1.0)
        crossing = abs(xdot) >= GRAZE_DERIV_TOL
        if not crossing:
            t_probe = min(s + GRAZE_PROBE_DT, t_end)
            g_after = linear_zone_flow(z, p.mu, seg_t, seg_x, t_probe) - level
            crossing = g_after != 0.0 and (g_after > 0.0) != inside_pos
        if not crossing:
            search_t, search_x = s, level
            continue
        segments.append(Segment(seg_t, s, zone, seg_x))
        zone = _NEIGHBOR[(zone, level)]
        seg_t = search_t = s
        seg_x = search_x = float(level)

    a_in = sum(s.t_end - s.t_start for s in segments if s.zone == INNER)
    half_end = tau + math.pi
    a_half = sum(
        max(0.0, min(s.t_end, half_end) - s.t_start)
        for s in segments
        if s.zone == INNER
    )
    return Trajectory(tuple(segments), a_in, a_half, final)


def sample(p: Params, traj: Trajectory, ts) -> np.ndarray:
    """Evaluate the trajectory at times ``ts`` (inside its span)."""
    starts = [s.t_start for s in traj.segments]
    out = np.empty(len(ts))
    for j, t in enumerate(ts):
        i = min(max(bisect_right(starts, t) - 1, 0), len(starts) - 1)
        seg = traj.segments[i]
        z = zone_coeffs(p, seg.zone)
        out[j] = linear_zone_flow(z, p.mu, seg.t_start, seg.entry_state, t)
    return out


def transitions(traj: Trajectory):
    """Zone-switch events as (time, level, zone_from, zone_to) tuples."""
    return [
        (s1.t_start, s1.entry_state, s0.zone, s1.zone)
        for s0, s1 in zip(traj.segments, traj.segments[1:])
    ]


def rk4_oracle(p: Params, tau: float, x, t_end: float, step: float):
    """Classical fixed-step RK4 of the continuous right-hand side.

    Used only in tests as a cross-check of :func:`advance`; accepts a
    scalar or an array of initial states.
    """
    if step <= 0.0:
        raise ValueError("step must be positive")
    span = t_end - tau
    scalar = np.isscalar(x)
    if span <= 0.0:
        return float(x) if scalar else np.asarray(x, dtype=float)
    n = max(1, int(math.ceil(span / step)))
    h = span / n
    a, slope_gap, mu, eps, lam = p.a, p.b - p.a, p.mu, p.eps, p.lam

    if scalar:
        u = float(x)
        sin = math.sin

        def rhs(t, v):
            s = 1.0 if v > 1.0 else (-1.0 if v < -1.0 else v)
            return eps * (a * v + slope_gap * s) + mu * sin(t) + lam

    else:
        u = np.asarray(x, dtype=float)

        def rhs(t, v):
            return eps * (a * v + slope_gap * np.clip(v, -1.0, 1.0)) + mu * math.sin(t) + lam

    for i in range(n):
        t = tau + i * h
        k1 = rhs(t, u)
        k2 = rhs(t + 0.5 * h, u + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, u + 0.5 * h * k2)
        k4 = rhs(t + h, u + h * k3)
        u = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return u
