"""Closed enumeration of the norm spaces used by ratio experiments."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .grid import GridError, GridFunction, lp_norm


@dataclass(frozen=True)
class SpaceSpec:
    """Selects a norm: kind "sobolev" (order m) or "besov" (smoothness r,
    difference order m_diff).  Besov ratios use the difference norm as the
    canonical realization so all experiments share one discretization bias.
    """

    kind: str
    p: float
    m: int | None = None
    r: float | None = None
    m_diff: int | None = None

    def __post_init__(self):
        if self.kind == "sobolev":
            if self.m is None or self.m < 0:
                raise GridError("sobolev space needs a nonnegative integer m")
            if not 1.0 < self.p < math.inf:
                raise GridError(f"sobolev norms require 1 < p < inf, got {self.p}")
        elif self.kind == "besov":
            if self.r is None or not self.r > 0:
                raise GridError("besov space needs r > 0")
            if self.m_diff is None or not self.m_diff > self.r:
                raise GridError("besov space needs integer m_diff > r")
            if not self.p >= 1.0:
                raise GridError(f"p must lie in [1, inf], got {self.p}")
        else:
            raise GridError(f"unknown space kind {self.kind!r}")

    def label(self) -> str:
        if self.kind == "sobolev":
            return f"sobolev(m={self.m},p={self.p})"
        return f"besov(r={self.r},p={self.p},m_diff={self.m_diff})"


def space_norm(u: GridFunction, spec: SpaceSpec) -> float:
    if spec.kind == "sobolev":
        from .sobolev import sobolev_norm_full

        return sobolev_norm_full(u, spec.m, spec.p)
    from .differences import besov_norm_diff

    return besov_norm_diff(u, spec.r, spec.p, spec.m_diff)


def sup_norm(u: GridFunction) -> float:
    return lp_norm(u, math.inf)
