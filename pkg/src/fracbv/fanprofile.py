"""Self-similar fan profile for balance laws.

For the balance law u_t + f(u)_x = alpha(t) u the centered-rarefaction
profile V(x, t) generalizes (f')^{-1}(x/t): it is the unique solution of

    x = integral over [0, t] of f'(V exp(B(theta))) dtheta,

where B is the cumulative source.  Rarefaction regions of exact solutions
evaluate as V(x - center, t) * exp(B(t)).  For power-law fluxes the profile
has the closed form sign(x) |x|^(1/p) * G^(-1/p) with G the effective time;
for general convex fluxes it is found by monotone bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericsError
from .flux import Flux
from .source import SourceProfile

_MAX_SIMPSON_NODES = 1 << 16


@dataclass(frozen=True)
class FanContext:
    flux: Flux
    source: SourceProfile
    root_tol: float = 1e-12


def integrate_smooth(g, a: float, b: float, tol: float) -> float:
    """Composite Simpson with interval doubling until two refinements agree.

    ``g`` must accept numpy arrays.  Intended for smooth integrands (the
    time integrands here are exponentials composed with powers).
    """
    if b <= a:
        return 0.0
    n = 16
    xs = np.linspace(a, b, n + 1)
    vals = np.asarray(g(xs), dtype=float)
    prev = _simpson(vals, (b - a) / n)
    while n < _MAX_SIMPSON_NODES:
        n *= 2
        # interleave previously computed nodes with the new midpoints
        xs_new = np.linspace(a, b, n + 1)
        vals_new = np.empty(n + 1)
        vals_new[::2] = vals
        vals_new[1::2] = np.asarray(g(xs_new[1::2]), dtype=float)
        vals = vals_new
        cur = _simpson(vals, (b - a) / n)
        if abs(cur - prev) <= tol:
            return cur
        prev = cur
    raise NumericsError(f"quadrature failed to reach tolerance {tol} on [{a}, {b}]")


def _simpson(vals: np.ndarray, h: float) -> float:
    return h / 3.0 * (vals[0] + vals[-1] + 4.0 * vals[1::2].sum() + 2.0 * vals[2:-1:2].sum())


def slope_time_integral(flux: Flux, source: SourceProfile, v: float, t: float) -> float:
    """integral over [0, t] of f'(v exp(B(theta))) dtheta.

    Exact for power-law fluxes (equals v |v|^(p-1) * effective_time); smooth
    quadrature per source piece otherwise.
    """
    if flux.power is not None:
        p = flux.power
        return v * abs(v) ** (p - 1.0) * source.effective_time(p, t)
    return slope_time_integral_numeric(flux, source, v, t)


def slope_time_integral_numeric(
    flux: Flux, source: SourceProfile, v: float, t: float, tol: float = 1e-13
) -> float:
    """Quadrature evaluation of the slope time integral, piece by piece.

    Kept separate from :func:`slope_time_integral` so closed forms can be
    cross-checked against an independent numerical route.
    """
    total = 0.0
    for left, value, right in source._pieces():
        if t <= left:
            break
        hi = min(t, right)
        b_left = source.cumulative_source(left)

        def integrand(theta, _b=b_left, _a=value, _l=left):
            return flux.df(v * np.exp(_b + _a * (theta - _l)))

        total += integrate_smooth(integrand, left, hi, tol * max(1.0, abs(v)))
    return total


def fan_profile(ctx: FanContext, x: float, t: float) -> float:
    """Evaluate the fan profile V(x, t); strictly increasing in x, V(0, t) = 0.

    Power-law fluxes use the closed form; others fall back to bisection.
    Raises NumericsError when the value escapes the flux working interval.
    """
    if t <= 0.0:
        raise ValueError(f"fan profile needs t > 0, got {t}")
    if x == 0.0:
        return 0.0
    if ctx.flux.power is not None:
        p = ctx.flux.power
        g = ctx.source.effective_time(p, t)
        v = math.copysign(abs(x) ** (1.0 / p) * g ** (-1.0 / p), x)
        _check_range(ctx, v, t)
        return v
    return fan_profile_rootfind(ctx, x, t)


def fan_profile_rootfind(ctx: FanContext, x: float, t: float) -> float:
    """Monotone bisection for the fan profile (any convex flux)."""
    if t <= 0.0:
        raise ValueError(f"fan profile needs t > 0, got {t}")
    if x == 0.0:
        return 0.0
    bound = ctx.flux.M * math.exp(ctx.source.sup_norm * t)
    lo, hi = -bound, bound
    flo = slope_time_integral(ctx.flux, ctx.source, lo, t) - x
    fhi = slope_time_integral(ctx.flux, ctx.source, hi, t) - x
    if flo > 0.0 or fhi < 0.0:
        raise NumericsError(
            f"fan profile root escapes the flux interval for x={x}, t={t}"
        )
    while hi - lo > ctx.root_tol:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fm = slope_time_integral(ctx.flux, ctx.source, mid, t) - x
        if fm < 0.0:
            lo = mid
        else:
            hi = mid
    v = 0.5 * (lo + hi)
    _check_range(ctx, v, t)
    return v


def fan_profile_residual(ctx: FanContext, x: float, t: float, value=None) -> float:
    """Residual x - integral of f'(V exp(B)) via independent quadrature."""
    v = fan_profile(ctx, x, t) if value is None else value
    return x - slope_time_integral_numeric(ctx.flux, ctx.source, v, t)


def fan_holder_gap(ctx: FanContext, z1: float, z2: float, t: float):
    """Two sides of the Hoelder estimate for the fan profile.

    Returns (lhs, rhs) with lhs = |V(z1,t) - V(z2,t)| and
    rhs = (|z1 - z2| / (c0 * effective_time(p, t)))^(1/p); the flux must
    carry degeneracy metadata (p, c0).  Contract: lhs <= rhs + root_tol.
    """
    deg = ctx.flux.degeneracy
    if deg is None:
        raise ValueError("flux carries no degeneracy metadata (p, c0)")
    lhs = abs(fan_profile(ctx, z1, t) - fan_profile(ctx, z2, t))
    g = ctx.source.effective_time(deg.p, t)
    rhs = (abs(z1 - z2) / (deg.c0 * g)) ** (1.0 / deg.p)
    return lhs, rhs


def _check_range(ctx: FanContext, v: float, t: float) -> None:
    limit = ctx.flux.M * math.exp(-ctx.source.min_cumulative_source(t))
    if abs(v) > limit * (1.0 + 1e-9):
        raise NumericsError(
            f"fan profile value {v} escapes the flux interval (limit {limit})"
        )
