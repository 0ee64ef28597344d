"""First-order Godunov finite-volume oracle for u_t + f(u)_x = alpha(t) u.

Independent of every exact construction in this package: conservative
transport update with the exact Riemann flux for convex fluxes (sonic point
at 0), followed by an exact integrating-factor step for the linear source.
Used to validate the analytic solution structures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from .errors import NumericsError
from .flux import Flux
from .source import SourceProfile


@dataclass(frozen=True)
class MeshRun:
    domain: Tuple[float, float]
    cells: int
    cfl: float
    t_end: float
    snapshots: Tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.cells < 8:
            raise ValueError("need at least 8 cells")
        if not 0.0 < self.cfl < 1.0:
            raise ValueError("cfl must lie in (0, 1)")
        if self.domain[1] <= self.domain[0]:
            raise ValueError("empty domain")
        if any(s < 0.0 or s > self.t_end for s in self.snapshots):
            raise ValueError("snapshots must lie in [0, t_end]")

    @property
    def dx(self) -> float:
        return (self.domain[1] - self.domain[0]) / self.cells

    def centers(self) -> np.ndarray:
        lo, _ = self.domain
        return lo + (np.arange(self.cells) + 0.5) * self.dx


def godunov_flux(F: Flux, u_left: np.ndarray, u_right: np.ndarray) -> np.ndarray:
    """Exact Riemann interface flux for convex f with minimum at 0."""
    return np.maximum(F.f(np.maximum(u_left, 0.0)), F.f(np.minimum(u_right, 0.0)))


def godunov_solve(
    F: Flux, S: SourceProfile, u0: Sequence[float], run: MeshRun
) -> List[Tuple[float, np.ndarray]]:
    """March ``u0`` (cell averages) to ``run.t_end``; returns (time, cells) pairs.

    Snapshot times are hit exactly (time steps are clipped).  Outflow
    boundaries with a zero exterior state; all test data is compactly
    supported inside the domain, so the boundary never activates.
    """
    u = np.asarray(u0, dtype=float).copy()
    if u.shape != (run.cells,):
        raise ValueError(f"u0 must have shape ({run.cells},)")
    dx = run.dx
    events = sorted(set(list(run.snapshots) + [run.t_end]))
    out: List[Tuple[float, np.ndarray]] = []
    t = 0.0
    if events and events[0] == 0.0:
        out.append((0.0, u.copy()))
        events = events[1:]

    padded = np.empty(run.cells + 2)
    for target in events:
        while t < target:
            speed = float(np.max(np.abs(F.df(u))))
            dt = run.cfl * dx / speed if speed > 0.0 else target - t
            dt = min(dt, target - t)
            # transport substep
            padded[0] = 0.0
            padded[-1] = 0.0
            padded[1:-1] = u
            flux = godunov_flux(F, padded[:-1], padded[1:])
            u -= dt / dx * (flux[1:] - flux[:-1])
            # exact source factor
            u *= math.exp(S.cumulative_source(t + dt) - S.cumulative_source(t))
            t += dt
            if not np.all(np.isfinite(u)):
                raise NumericsError(f"non-finite state at t={t}")
        out.append((target, u.copy()))
    return out


def l1_distance(a: np.ndarray, b: np.ndarray, dx: float) -> float:
    return float(np.sum(np.abs(np.asarray(a) - np.asarray(b))) * dx)
