"""Mixed difference calculus and difference-based Besov norms.

Differences act along coordinate axes with steps snapped to whole grid cells.
The modulus of smoothness replaces the supremum over continuous steps by a
maximum over a small log-spaced probe set per dyadic scale; identical probe
sampling on both sides of every compared ratio cancels the induced bias.

The direction-set sum runs exactly over all 2^d subsets of the axes (d <= 3).
"""

from __future__ import annotations

import itertools
import math
import warnings
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .grid import (
    GridError,
    GridFunction,
    lp_norm,
    lp_norm_pow,
    pointwise_multiply,
    require_same_grid,
    shift_values,
)


class DegenerateStepWarning(UserWarning):
    """A difference step or modulus scale snapped below one grid cell."""


def all_direction_sets(d: int) -> list[tuple[int, ...]]:
    """Every subset of the axes {0, .., d-1}, the empty set first."""
    axes = range(d)
    out: list[tuple[int, ...]] = []
    for size in range(d + 1):
        out.extend(itertools.combinations(axes, size))
    return out


def snap_step(h: float, dx: float) -> int:
    """Nearest whole-cell count for a real step (ties to even)."""
    return int(np.rint(h / dx))


def _as_axis_vector(value, d: int, name: str) -> tuple:
    if np.isscalar(value):
        return (value,) * d
    value = tuple(value)
    if len(value) != d:
        raise GridError(f"{name} has length {len(value)}, expected {d}")
    return value


def _diff_values(values: np.ndarray, axis: int, m: int, cells: int, extension: str) -> np.ndarray:
    # m-th forward difference with step `cells` grid cells along `axis`
    out = np.zeros_like(values)
    for ell in range(m + 1):
        w = (-1.0) ** (m - ell) * comb(m, ell)
        out += w * shift_values(values, axis, ell * cells, extension)
    return out


def directional_difference(u: GridFunction, axis: int, m: int, h: float) -> GridFunction:
    """m-th order difference of u in one direction, step h.

    h is snapped to the nearest whole number of grid cells; a step that snaps
    to zero cells yields the zero function and a DegenerateStepWarning.
    """
    if not 0 <= axis < u.d:
        raise GridError(f"axis {axis} out of range for d={u.d}")
    if m < 1:
        raise GridError(f"difference order must be >= 1, got {m}")
    cells = snap_step(h, u.dx[axis])
    if cells == 0:
        warnings.warn(
            f"step h={h} snapped to zero cells (dx={u.dx[axis]}); returning zero",
            DegenerateStepWarning,
            stacklevel=2,
        )
        return u.with_values(np.zeros_like(u.values))
    return u.with_values(_diff_values(u.values, axis, m, cells, u.extension))


def mixed_difference(
    u: GridFunction,
    e: Iterable[int],
    m: int | Sequence[int],
    h: float | Sequence[float],
) -> GridFunction:
    """Composition of directional differences over the axes in e.

    e is treated as a set: axes are applied in sorted order regardless of the
    order given, so both orderings produce bit-identical results.  The empty
    set is the identity.
    """
    axes = sorted(set(int(a) for a in e))
    if axes and not (0 <= axes[0] and axes[-1] < u.d):
        raise GridError(f"direction set {axes} out of range for d={u.d}")
    if not axes:
        return u
    mv = _as_axis_vector(m, u.d, "m")
    hv = _as_axis_vector(h, u.d, "h")
    out = u
    for axis in axes:
        out = directional_difference(out, axis, int(mv[axis]), float(hv[axis]))
    return out


def _mixed_diff_cells(
    values: np.ndarray,
    axes: Sequence[int],
    orders: Sequence[int],
    cells: Sequence[int],
    extension: str,
) -> np.ndarray:
    out = values
    for axis, m, s in zip(axes, orders, cells):
        out = _diff_values(out, axis, m, s, extension)
    return out


def _interior_slices(
    shape: tuple[int, ...], axes: Sequence[int], orders: Sequence[int], cells: Sequence[int]
) -> tuple[slice, ...] | None:
    # nodes whose whole difference stencil stays inside the box
    slices = [slice(None)] * len(shape)
    for axis, m, s in zip(axes, orders, cells):
        n = shape[axis]
        reach = m * abs(s)
        if reach >= n:
            return None
        slices[axis] = slice(reach, n) if s < 0 else slice(0, n - reach)
    return tuple(slices)


def admissible_cells(t: float, dx: float) -> list[int]:
    """Whole-cell step magnitudes probing the modulus at scale t.

    Probes c*t for c in {1/4, 1/2, 3/4, 1}, snapped to cells, clipped to the
    strict constraint s*dx < t, plus the largest admissible cell shift.
    """
    s_max = int(math.ceil(t / dx - 1e-12)) - 1
    if s_max < 1:
        return []
    probes = {int(np.rint(c * t / dx)) for c in (0.25, 0.5, 0.75, 1.0)}
    probes.add(s_max)
    return sorted(s for s in probes if 1 <= s <= s_max)


def ladder_cells(t: float, dx: float) -> list[int]:
    """Probe magnitudes below t drawn from the absolute dyadic ladder.

    The ladder is the union of per-scale probe sets anchored at t = 2^-k,
    k >= 0; filtering it by s * dx < t gives step sets that are nested in t,
    so the discrete modulus is monotone in the scale vector.
    """
    out: set[int] = set()
    scale = 1.0
    while scale > dx:
        out.update(s for s in admissible_cells(scale, dx) if s * dx < t)
        scale /= 2.0
    return sorted(out)


def modulus(
    u: GridFunction,
    e: Iterable[int],
    m: int | Sequence[int],
    t: float | Sequence[float],
    p: float,
    interior: bool = False,
) -> float:
    """Mixed modulus of smoothness at scale vector t.

    Maximum over the sampled step set of the L_p norm of the mixed difference;
    the empty direction set returns the plain L_p norm.  With interior=True
    the norm is restricted to nodes whose difference stencil stays inside the
    box (boundary handled by the support margin in normal use).
    """
    axes = sorted(set(int(a) for a in e))
    if not axes:
        return lp_norm(u, p)
    mv = _as_axis_vector(m, u.d, "m")
    tv = _as_axis_vector(t, u.d, "t")
    for axis in axes:
        if not 0 < tv[axis] <= 1.0:
            raise GridError(f"scale t must lie in (0, 1], got {tv[axis]} on axis {axis}")
    sets = []
    for axis in axes:
        mags = ladder_cells(float(tv[axis]), u.dx[axis])
        if not mags:
            warnings.warn(
                f"scale t={tv[axis]} is below one grid cell on axis {axis}; modulus degenerates to 0",
                DegenerateStepWarning,
                stacklevel=2,
            )
            return 0.0
        sets.append([s for mag in mags for s in (mag, -mag)])
    orders = [int(mv[axis]) for axis in axes]
    best = 0.0
    vol = u.cell_volume
    for combo in itertools.product(*sets):
        arr = _mixed_diff_cells(u.values, axes, orders, combo, u.extension)
        if interior:
            sl = _interior_slices(u.n, axes, orders, combo)
            if sl is None:
                continue
            arr = arr[sl]
            if arr.size == 0:
                continue
        val = lp_norm_pow(arr, p, vol)
        if val > best:
            best = val
    if math.isinf(p):
        return best
    return best ** (1.0 / p)


def dyadic_level_count(u: GridFunction) -> tuple[int, ...]:
    """Retained dyadic scales per axis: floor(log2(1/dx)) - 1, so the finest
    scale spans at least two grid cells."""
    return tuple(int(math.floor(math.log2(1.0 / d))) - 1 for d in u.dx)


def _check_levels(u: GridFunction) -> tuple[int, ...]:
    ks = dyadic_level_count(u)
    if min(ks) < 2:
        raise GridError(
            f"grid too coarse for dyadic analysis: levels {ks} per axis, need >= 2"
        )
    return ks


def _signed(mags: Iterable[int]) -> list[int]:
    return [s for mag in mags for s in (mag, -mag)]


def _norm_table(
    u: GridFunction,
    axes: Sequence[int],
    orders: Sequence[int],
    signed_sets: Sequence[Sequence[int]],
    p: float,
) -> dict[tuple[int, ...], float]:
    # powered L_p norms of every composed difference over the signed-step
    # product set; partial compositions are cached along the recursion
    vol = u.cell_volume
    table: dict[tuple[int, ...], float] = {}

    def rec(depth: int, arr: np.ndarray, prefix: tuple[int, ...]) -> None:
        if depth == len(axes):
            table[prefix] = lp_norm_pow(arr, p, vol)
            return
        axis, m = axes[depth], orders[depth]
        for s in signed_sets[depth]:
            rec(depth + 1, _diff_values(arr, axis, m, s, u.extension), prefix + (s,))

    rec(0, u.values, ())
    return table


def besov_norm_diff(u: GridFunction, r: float, p: float, m_diff: int) -> float:
    """Difference-based Besov norm of dominating mixed smoothness.

    Sum over all direction sets e of the dyadically weighted l_p aggregate of
    moduli at scales 2^-k, k in N_0^d(e), truncated at the per-axis level
    count; the l_p sum over k becomes a sup when p = inf.  Requires the
    difference order to exceed the smoothness r.
    """
    if not r > 0:
        raise GridError(f"r must be positive, got {r}")
    if not m_diff > r:
        raise GridError(f"difference order m_diff={m_diff} must exceed r={r}")
    if not p >= 1.0:
        raise GridError(f"p must lie in [1, inf], got {p}")
    ks = _check_levels(u)
    d = u.d
    scale_sets: list[list[list[int]]] = []
    for axis in range(d):
        per_axis = [admissible_cells(2.0**-k, u.dx[axis]) for k in range(ks[axis] + 1)]
        scale_sets.append(per_axis)

    total = 0.0
    for e in all_direction_sets(d):
        if not e:
            total += lp_norm(u, p)
            continue
        axes = list(e)
        orders = [m_diff] * len(axes)
        signed_sets = []
        for axis in axes:
            union = sorted({s for mags in scale_sets[axis] for s in mags})
            signed_sets.append(_signed(union))
        table = _norm_table(u, axes, orders, signed_sets, p)
        shape_k = tuple(ks[a] + 1 for a in axes)
        exact = np.empty(shape_k)
        for kvec in itertools.product(*(range(s) for s in shape_k)):
            exact[kvec] = max(
                table[combo]
                for combo in itertools.product(
                    *(_signed(scale_sets[a][k]) for a, k in zip(axes, kvec))
                )
            )
        # steps admissible at finer scales stay admissible: the modulus at
        # level k is the max over the upper orthant of exact-level maxima,
        # which keeps the discrete modulus monotone across scales
        omega = exact
        for pos in range(len(axes)):
            omega = np.flip(np.maximum.accumulate(np.flip(omega, axis=pos), axis=pos), axis=pos)
        ksum = np.indices(shape_k).sum(axis=0)
        if math.isinf(p):
            term = float(np.max(2.0 ** (r * ksum) * omega))
        else:
            term = float(np.sum(2.0 ** (r * ksum * p) * omega)) ** (1.0 / p)
        total += term
    return total


def isotropic_besov_norm(u: GridFunction, r: float, p: float, m_diff: int) -> float:
    """One-dimensional Besov norm; coincides with besov_norm_diff for d = 1."""
    if u.d != 1:
        raise GridError(f"isotropic norm needs a 1-d function, got d={u.d}")
    return besov_norm_diff(u, r, p, m_diff)


def besov_norm_integral(u: GridFunction, r: float, p: float, m_diff: int) -> float:
    """Integral-form Besov norm: L_p norm plus, for each nonempty direction
    set, the weighted step integral of pure mixed differences.

    The step integral over [-1, 1]^|e| with weight prod |h_i|^(-rp) dh_i/|h_i|
    is evaluated per axis by a midpoint rule on dyadic panels
    [2^-k-1, 2^-k], matching the scale set of the discrete norm; the panel
    mass of the singular weight is used exactly.
    """
    if not r > 0:
        raise GridError(f"r must be positive, got {r}")
    if not m_diff > r:
        raise GridError(f"difference order m_diff={m_diff} must exceed r={r}")
    if not p >= 1.0:
        raise GridError(f"p must lie in [1, inf], got {p}")
    ks = _check_levels(u)
    d = u.d

    # per axis: panel list of (cells, weight or |h| value)
    panels: list[list[tuple[int, float]]] = []
    for axis in range(d):
        dxv = u.dx[axis]
        entries = []
        for k in range(ks[axis]):
            t_hi, t_lo = 2.0**-k, 2.0 ** -(k + 1)
            s_lo = int(math.floor(t_lo / dxv + 1e-12)) + 1
            s_hi = int(math.floor(t_hi / dxv + 1e-12))
            if s_hi < s_lo:
                continue
            s = min(max(int(np.rint(0.75 * t_hi / dxv)), s_lo), s_hi)
            if math.isinf(p):
                entries.append((s, s * dxv))
            else:
                mass = (2.0 ** (r * p * (k + 1)) - 2.0 ** (r * p * k)) / (r * p)
                entries.append((s, mass))
        panels.append(entries)

    total = lp_norm(u, p)
    for e in all_direction_sets(d):
        if not e:
            continue
        axes = list(e)
        orders = [m_diff] * len(axes)
        signed_sets = [_signed(sorted({s for s, _ in panels[a]})) for a in axes]
        table = _norm_table(u, axes, orders, signed_sets, p)
        if math.isinf(p):
            t_e = 0.0
            for choice in itertools.product(*(panels[a] for a in axes)):
                weight = float(np.prod([h ** (-r) for _, h in choice]))
                for signs in itertools.product((1, -1), repeat=len(axes)):
                    combo = tuple(sg * s for sg, (s, _) in zip(signs, choice))
                    t_e = max(t_e, weight * table[combo])
        else:
            acc = 0.0
            for choice in itertools.product(*(panels[a] for a in axes)):
                weight = float(np.prod([w for _, w in choice]))
                for signs in itertools.product((1, -1), repeat=len(axes)):
                    combo = tuple(sg * s for sg, (s, _) in zip(signs, choice))
                    acc += weight * table[combo]
            t_e = acc ** (1.0 / p)
        total += t_e
    return total


def leibniz_difference(
    psi: GridFunction, phi: GridFunction, m: int, h: float, axis: int = 0
) -> GridFunction:
    """Product-rule expansion of the m-th difference of psi * phi.

    Returns sum_j C(m, j) (D^{m-j} psi)(. + j h) * (D^j phi)(.), which equals
    the direct difference of the product identically on the lattice.
    """
    require_same_grid(psi, phi)
    if m < 1:
        raise GridError(f"order must be >= 1, got {m}")
    cells = snap_step(h, psi.dx[axis])
    ext = psi.extension
    out = np.zeros_like(psi.values)
    for j in range(m + 1):
        left = psi.values
        if m - j > 0:
            left = _diff_values(left, axis, m - j, cells, ext)
        left = shift_values(left, axis, j * cells, ext)
        right = phi.values
        if j > 0:
            right = _diff_values(right, axis, j, cells, ext)
        out += comb(m, j) * left * right
    return psi.with_values(out)


def mixed_leibniz_terms(
    f: GridFunction,
    g: GridFunction,
    e: Iterable[int],
    m: int,
    h: float | Sequence[float],
) -> list[tuple[tuple[int, ...], GridFunction]]:
    """Terms of the mixed product rule for the order-2m difference of f * g.

    Each term is C(2m, u) * (D^{2m-u, e} f)(. + u <> h) * (D^{u, e} g)(.) for a
    multi-index u supported on e with entries at most 2m (<> is the
    componentwise product); the terms sum to the mixed difference of f * g.
    The empty direction set yields the single term f * g.
    """
    require_same_grid(f, g)
    axes = sorted(set(int(a) for a in e))
    if not axes:
        return [(tuple([0] * f.d), pointwise_multiply(f, g))]
    if m < 1:
        raise GridError(f"order must be >= 1, got {m}")
    hv = _as_axis_vector(h, f.d, "h")
    cells = {a: snap_step(float(hv[a]), f.dx[a]) for a in axes}
    ext = f.extension
    out = []
    for u_e in itertools.product(range(2 * m + 1), repeat=len(axes)):
        u_full = [0] * f.d
        for a, ui in zip(axes, u_e):
            u_full[a] = ui
        coeff = 1.0
        for ui in u_e:
            coeff *= comb(2 * m, ui)
        left = f.values
        for a, ui in zip(axes, u_e):
            if 2 * m - ui > 0:
                left = _diff_values(left, a, 2 * m - ui, cells[a], ext)
        for a, ui in zip(axes, u_e):
            left = shift_values(left, a, ui * cells[a], ext)
        right = g.values
        for a, ui in zip(axes, u_e):
            if ui > 0:
                right = _diff_values(right, a, ui, cells[a], ext)
        out.append((tuple(u_full), f.with_values(coeff * left * right)))
    return out
