"""Piecewise-constant source coefficients and their exact primitives.

The balance law u_t + f(u)_x = alpha(t) u is driven by a bounded coefficient
alpha.  Everything downstream needs three derived quantities, all available
in closed form when alpha is piecewise constant:

* cumulative_source(t)            B(t) = integral of alpha over [0, t]
* effective_time(p, t)            integral of exp(p B) over [0, t]
* effective_time_limit(p)         the t -> infinity limit of the above

``effective_time`` plays the role of a rescaled time: it equals t when
alpha = 0 and saturates at a finite value when alpha is eventually negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

from .errors import ConfigError


@dataclass(frozen=True)
class SourceProfile:
    """alpha as a right-continuous step function.

    ``breakpoints`` are the left endpoints of the constancy pieces; the first
    must be 0 and the last piece extends to infinity.
    """

    breakpoints: Tuple[float, ...]
    values: Tuple[float, ...]

    def __post_init__(self):
        if len(self.breakpoints) != len(self.values) or not self.breakpoints:
            raise ValueError("breakpoints and values must be equal-length, non-empty")
        if self.breakpoints[0] != 0.0:
            raise ValueError("first breakpoint must be 0")
        if any(b >= c for b, c in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("breakpoints must be strictly increasing")

    @classmethod
    def zero(cls) -> "SourceProfile":
        return cls((0.0,), (0.0,))

    @classmethod
    def constant(cls, a: float) -> "SourceProfile":
        return cls((0.0,), (float(a),))

    @classmethod
    def piecewise(cls, breakpoints, values) -> "SourceProfile":
        return cls(tuple(float(b) for b in breakpoints), tuple(float(v) for v in values))

    @property
    def sup_norm(self) -> float:
        return max(abs(v) for v in self.values)

    @property
    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.values)

    def cumulative_source(self, t: float) -> float:
        """B(t): piecewise-linear primitive of alpha, B(0) = 0."""
        if t < 0.0:
            raise ValueError(f"time must be non-negative, got {t}")
        total = 0.0
        for left, value, right in self._pieces():
            if t <= left:
                break
            total += value * (min(t, right) - left)
        return total

    def min_cumulative_source(self, t: float) -> float:
        """min of B over [0, t]; attained at 0, t, or a breakpoint."""
        if t < 0.0:
            raise ValueError(f"time must be non-negative, got {t}")
        candidates = [0.0, self.cumulative_source(t)]
        for b in self.breakpoints:
            if 0.0 < b < t:
                candidates.append(self.cumulative_source(b))
        return min(candidates)

    def effective_time(self, p: float, t: float) -> float:
        """integral of exp(p B(theta)) over [0, t]; strictly increasing in t.

        ``t = math.inf`` returns :meth:`effective_time_limit`.  Each piece is
        integrated exactly (exp of a linear function).
        """
        if p < 1.0:
            raise ValueError(f"exponent must satisfy p >= 1, got {p}")
        if t < 0.0:
            raise ValueError(f"time must be non-negative, got {t}")
        if math.isinf(t):
            return self.effective_time_limit(p)
        total = 0.0
        b_left = 0.0
        for left, value, right in self._pieces():
            if t <= left:
                break
            span = min(t, right) - left
            total += _exp_linear_integral(p, b_left, value, span)
            b_left += value * (right - left) if right < t else 0.0
        return total

    def effective_time_limit(self, p: float) -> float:
        """Limit of effective_time as t -> infinity; may be math.inf.

        Finite exactly when the last piece has a strictly negative value.
        """
        if p < 1.0:
            raise ValueError(f"exponent must satisfy p >= 1, got {p}")
        last_value = self.values[-1]
        if last_value >= 0.0:
            return math.inf
        last_left = self.breakpoints[-1]
        head = self.effective_time(p, last_left) if last_left > 0.0 else 0.0
        b_last = self.cumulative_source(last_left)
        # integral over [last_left, inf) of exp(p (b_last + a theta')) dtheta'
        return head + math.exp(p * b_last) / (p * abs(last_value))

    def effective_time_inverse(self, p: float, target: float) -> float:
        """The unique t with effective_time(p, t) = target, or math.inf.

        Returns math.inf when target >= effective_time_limit(p): the target
        level is never reached.
        """
        if target < 0.0:
            raise ValueError(f"target must be non-negative, got {target}")
        if target == 0.0:
            return 0.0
        if target >= self.effective_time_limit(p):
            return math.inf
        # Locate the piece containing the target, then invert in closed form.
        acc = 0.0
        b_left = 0.0
        for left, value, right in self._pieces():
            width = right - left
            piece = _exp_linear_integral(p, b_left, value, width)
            if acc + piece >= target or math.isinf(right):
                remainder = target - acc
                scale = math.exp(p * b_left)
                if value == 0.0:
                    return left + remainder / scale
                # remainder = scale * (exp(p a tau) - 1) / (p a)
                arg = remainder * p * value / scale
                return left + math.log1p(arg) / (p * value)
            acc += piece
            b_left += value * width
        raise AssertionError("unreachable: last piece is unbounded")

    def _pieces(self):
        """Yield (left, value, right) with right = inf on the last piece."""
        for i, (left, value) in enumerate(zip(self.breakpoints, self.values)):
            right = self.breakpoints[i + 1] if i + 1 < len(self.breakpoints) else math.inf
            yield left, value, right


def _exp_linear_integral(p: float, b0: float, slope: float, span: float) -> float:
    """integral over [0, span] of exp(p (b0 + slope*theta)) dtheta."""
    if span <= 0.0:
        return 0.0
    scale = math.exp(p * b0)
    if math.isinf(span):
        return math.inf if slope >= 0.0 else scale / (p * abs(slope))
    if slope == 0.0:
        return scale * span
    return scale * math.expm1(p * slope * span) / (p * slope)


def source_from_config(cfg: dict) -> SourceProfile:
    """Build a source from a config mapping.

    Supported forms::

        {"alpha": "zero"}
        {"alpha": "constant", "a": <real>}
        {"alpha": "pw", "t": [...], "v": [...]}
    """
    if not isinstance(cfg, dict) or "alpha" not in cfg:
        raise ConfigError("source config must be a mapping with an 'alpha' key")
    kind = cfg["alpha"]
    known = {"zero": {"alpha"}, "constant": {"alpha", "a"}, "pw": {"alpha", "t", "v"}}
    if kind not in known:
        raise ConfigError(f"unknown source kind {kind!r}")
    extra = set(cfg) - known[kind]
    if extra:
        raise ConfigError(f"unknown source config keys: {sorted(extra)}")
    try:
        if kind == "zero":
            return SourceProfile.zero()
        if kind == "constant":
            return SourceProfile.constant(float(cfg["a"]))
        return SourceProfile.piecewise(cfg["t"], cfg["v"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad source config: {exc}") from exc
