"""Planar Keyfitz-Kranzer data whose angular factor defeats BV factorization.

The system u_t + div(h(|u|) u) = 0 with h = (g, 0) splits into a scalar law
for the modulus and a transport equation for the direction.  The initial
data stacks dyadic bands I_i = [2^-i, 2^-i+1): each band is cut into
roughly i^(p(1+delta)) strips whose modulus bumps alternate between two
nearby levels, and the direction alternates between the base direction and
a slightly rotated one on a 2^-i checkerboard in x.  Rows move with speed
g(modulus), so at time t each strip boundary carries jump segments of
length t 2^-i; summing their sizes against any candidate BV factor yields
a lower-bound series with unit terms, which is the blow-up signature.

Everything here is for the planar case (two space dimensions, two state
components) with the affine default g(u) = u - |b|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np


@dataclass(frozen=True, eq=False)
class KKSetup:
    """Parameters of the direction-oscillation construction.

    ``p`` is the reciprocal of the targeted fractional order, ``delta`` the
    extra exponent in the strip counts m_i = i^(p + p delta), ``n`` the
    first dyadic band, ``i_max`` the band truncation.  ``g`` defaults to the
    affine u - |b| (so the modulus bumps are exactly r_i = 2^-i).
    """

    p: float
    delta: float
    b: Tuple[float, float] = (1.0, 0.0)
    n: int = 1
    i_max: int = 4
    epsilon: Optional[float] = None
    M: Optional[float] = None
    g: Optional[Callable] = None
    b_norm: float = field(init=False)
    beta: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.p <= 1.0 or self.delta <= 0.0:
            raise ValueError("need p > 1 and delta > 0")
        if not 1 <= self.n <= self.i_max:
            raise ValueError("need 1 <= n <= i_max")
        b = np.asarray(self.b, dtype=float)
        b_norm = float(np.hypot(b[0], b[1]))
        if b_norm == 0.0:
            raise ValueError("b must be nonzero")
        object.__setattr__(self, "b_norm", b_norm)
        object.__setattr__(self, "beta", b / b_norm)
        if self.epsilon is None:
            object.__setattr__(self, "epsilon", 0.25 * b_norm)
        if self.g is None:
            object.__setattr__(self, "g", lambda u, _c=b_norm: u - _c)
        if self.M is None:
            span = np.linspace(b_norm - 2 * self.epsilon, b_norm + 2 * self.epsilon, 257)
            gmax = float(np.max(np.abs(np.asarray(self.g(span), dtype=float))))
            object.__setattr__(self, "M", 4.0 * (1.0 + gmax))
        if self.M <= 1.0:
            raise ValueError("support box M must exceed 1")

    def strip_count(self, i: int) -> float:
        """m_i = i^(p(1+delta)); the divergence series uses the real value."""
        return float(i) ** (self.p * (1.0 + self.delta))

    def strip_count_int(self, i: int) -> int:
        """Integer strip count used when laying out grids."""
        return max(1, int(math.floor(self.strip_count(i))))

    def bump(self, i: int) -> float:
        """r_i with g(|b| + r_i) = 2^-i; exact 2^-i for the affine default."""
        target = 2.0 ** (-i)
        lo, hi = -2.0 * self.epsilon, 2.0 * self.epsilon
        glo = float(self.g(self.b_norm + lo))
        ghi = float(self.g(self.b_norm + hi))
        if not glo <= target <= ghi:
            raise ValueError(f"g does not reach 2^-{i} on the injectivity window")
        # affine fast path keeps r_i exact
        mid_slope = (ghi - glo) / (hi - lo)
        r_affine = lo + (target - glo) / mid_slope
        if abs(float(self.g(self.b_norm + r_affine)) - target) < 1e-15:
            return r_affine
        while hi - lo > 1e-15:
            mid = 0.5 * (lo + hi)
            if float(self.g(self.b_norm + mid)) < target:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def rotated_direction(self, i: int) -> np.ndarray:
        """Unit vector at chord distance i^(-1-delta) from the base direction."""
        chord = float(i) ** (-1.0 - self.delta)
        angle = 2.0 * math.asin(0.5 * chord)
        c, s = math.cos(angle), math.sin(angle)
        bx, by = self.beta
        return np.array([c * bx - s * by, s * bx + c * by])

    def sup_distance_bound(self) -> float:
        """|b| n^(-1-delta) + 2^(-n+1): bound on the sup distance of u0 to b."""
        return self.b_norm * float(self.n) ** (-1.0 - self.delta) + 2.0 ** (-self.n + 1)


def band_index(setup: KKSetup, ys: np.ndarray) -> np.ndarray:
    """Dyadic band index i with y in [2^-i, 2^-i+1); 0 where y is outside.

    Only bands n..i_max count; everything else maps to 0.
    """
    ys = np.asarray(ys, dtype=float)
    idx = np.zeros(ys.shape, dtype=np.int64)
    inside = (ys > 0.0) & (ys < 2.0 ** (-setup.n + 1))
    if np.any(inside):
        i = np.ceil(-np.log2(ys[inside])).astype(np.int64)
        i = np.where(2.0 ** (-i) > ys[inside], i + 1, i)
        i = np.where(2.0 ** (-i + 1) <= ys[inside], i - 1, i)
        i = np.where((i >= setup.n) & (i <= setup.i_max), i, 0)
        idx[inside] = i
    return idx


def modulus_at(setup: KKSetup, xs, ys) -> np.ndarray:
    """Initial modulus |b| + Lambda(x, y), vectorized over a point set."""
    xs, ys = np.broadcast_arrays(
        np.atleast_1d(np.asarray(xs, dtype=float)),
        np.atleast_1d(np.asarray(ys, dtype=float)),
    )
    out = np.full(xs.shape, setup.b_norm)
    idx = band_index(setup, ys)
    active = (idx > 0) & (np.abs(xs) <= setup.M)
    for i in np.unique(idx[active]):
        sel = active & (idx == i)
        m_int = setup.strip_count_int(int(i))
        base = 2.0 ** (-int(i))
        j = np.floor((ys[sel] - base) * m_int / base).astype(np.int64) + 1
        j = np.clip(j, 1, m_int)
        bump = np.where(j % 2 == 0, setup.bump(int(i)), setup.bump(int(i) + 1))
        out[sel] = setup.b_norm + bump
    return out


def direction_at(setup: KKSetup, xs, ys) -> np.ndarray:
    """Initial direction field (..., 2): rotated on odd x-checker cells in bands."""
    xs, ys = np.broadcast_arrays(
        np.atleast_1d(np.asarray(xs, dtype=float)),
        np.atleast_1d(np.asarray(ys, dtype=float)),
    )
    out = np.empty(xs.shape + (2,))
    out[...] = setup.beta
    idx = band_index(setup, ys)
    active = (idx > 0) & (np.abs(xs) <= setup.M)
    for i in np.unique(idx[active]):
        sel = active & (idx == i)
        odd = np.floor(xs[sel] * 2.0 ** int(i)).astype(np.int64) % 2 != 0
        rotated = setup.rotated_direction(int(i))
        block = out[sel]
        block[odd] = rotated
        out[sel] = block
    return out


def direction_at_time(setup: KKSetup, xs, ys, t: float) -> np.ndarray:
    """Direction field at time t: rows shift by t * g(row modulus).

    Rows whose modulus equals |b| are frozen; rows inside band i move with
    speed 2^-i (even strips) or 2^-i-1 (odd strips).  Valid while the
    observation window stays inside the frozen-modulus cone, which the
    default M guarantees on t in [0, 1].
    """
    if not 0.0 <= t < 1.0:
        raise ValueError(f"evolution window is t in [0, 1), got {t}")
    xs, ys = np.broadcast_arrays(
        np.atleast_1d(np.asarray(xs, dtype=float)),
        np.atleast_1d(np.asarray(ys, dtype=float)),
    )
    row_modulus = modulus_at(setup, np.zeros_like(ys), ys)
    speed = np.asarray(setup.g(row_modulus), dtype=float)
    return direction_at(setup, xs - t * speed, ys)


def grid_axes(setup: KKSetup, resolution: int):
    """Cell-centered axes over the square [-2M, 2M]^2."""
    h = 4.0 * setup.M / resolution
    lo = -2.0 * setup.M
    centers = lo + (np.arange(resolution) + 0.5) * h
    return centers, h


def check_resolution(setup: KKSetup, resolution: int) -> None:
    """Require >= 4 cells across the finest strip and the finest x-checker."""
    _, h = grid_axes(setup, resolution)
    finest_strip = 2.0 ** (-setup.i_max) / setup.strip_count_int(setup.i_max)
    finest_checker = 2.0 ** (-setup.i_max)
    needed = min(finest_strip, finest_checker) / 4.0
    if h > needed:
        raise ValueError(
            f"grid of {resolution}^2 cells over [-2M, 2M]^2 (cell {h:.3e}) cannot "
            f"resolve the finest strips (need cell <= {needed:.3e}); "
            f"raise the resolution or lower i_max"
        )


def build_initial_data(setup: KKSetup, resolution: int, require_resolved: bool = True):
    """Sampled (modulus, direction) grids on the cell-centered square.

    Returns (eta, omega, centers) with eta of shape (res, res) indexed
    [iy, ix] and omega of shape (res, res, 2).  Refuses under-resolved grids
    unless ``require_resolved`` is disabled (aliased samples stay valid
    pointwise values but grid norms lose meaning).
    """
    if require_resolved:
        check_resolution(setup, resolution)
    centers, _ = grid_axes(setup, resolution)
    X, Y = np.meshgrid(centers, centers)
    eta = modulus_at(setup, X, Y)
    omega = direction_at(setup, X, Y)
    return eta, omega, centers


def evolve(setup: KKSetup, t: float, resolution: int, require_resolved: bool = True):
    """Direction grid at time t on the same cell-centered square."""
    if require_resolved:
        check_resolution(setup, resolution)
    centers, _ = grid_axes(setup, resolution)
    X, Y = np.meshgrid(centers, centers)
    return direction_at_time(setup, X, Y, t)


def initial_state(setup: KKSetup, resolution: int, require_resolved: bool = True):
    """Vector initial data u0 = modulus * direction on the grid."""
    eta, omega, centers = build_initial_data(setup, resolution, require_resolved)
    return eta[..., None] * omega, centers


def bv_grid_norm(grid: np.ndarray, box: Tuple[float, float, float, float]) -> float:
    """Anisotropic discrete BV seminorm of a cell-centered grid function.

    Sums |difference| between adjacent cells times the shared edge length in
    both directions; converges to the BV seminorm for data piecewise
    constant on strips as the grid refines.  Vector-valued grids (trailing
    length-2 axis) use the Euclidean norm of the differences.
    """
    grid = np.asarray(grid, dtype=float)
    x_lo, x_hi, y_lo, y_hi = box
    if grid.ndim == 2:
        grid = grid[..., None]
    ny, nx = grid.shape[:2]
    dx = (x_hi - x_lo) / nx
    dy = (y_hi - y_lo) / ny
    jumps_x = np.sqrt(np.sum(np.diff(grid, axis=1) ** 2, axis=-1))
    jumps_y = np.sqrt(np.sum(np.diff(grid, axis=0) ** 2, axis=-1))
    return float(jumps_x.sum() * dy + jumps_y.sum() * dx)


def jump_sum_lower_bound(setup: KKSetup, t: float, N_i: int) -> float:
    """(t/2) * sum over i = n .. n+N_i of (m_i - 1) i^(-p(1+delta)).

    Lower bound (normalized by the free Hoelder constant) on the BV mass any
    factorization of the time-t direction field would need; the terms tend
    to 1, so the partial sums grow linearly and the bound is unbounded.
    """
    if not 0.0 < t < 1.0:
        raise ValueError(f"need t in (0, 1), got {t}")
    if N_i < 0:
        raise ValueError("need N_i >= 0")
    i = np.arange(setup.n, setup.n + N_i + 1, dtype=float)
    expo = setup.p * (1.0 + setup.delta)
    return float(t / 2.0 * np.sum((i**expo - 1.0) * i ** (-expo)))


def jump_segments(setup: KKSetup, i: int, t: float, limit: int = 16):
    """A sample of the jump segments along the top edges of band-i strips.

    Yields (y, x_lo, x_hi): across each returned horizontal segment the
    time-t direction field jumps between the base and rotated directions.
    """
    m_int = setup.strip_count_int(i)
    base = 2.0 ** (-i)
    count = 0
    for j in range(1, m_int):
        y = base + j * base / m_int
        for l in range(1, 2**i):
            yield y, l * base, (l + t) * base
            count += 1
            if count >= limit:
                return
