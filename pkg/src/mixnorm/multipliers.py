"""Lattice partitions of unity and pointwise-multiplication experiments.

The base bump is a mollifier of support width two lattice cells, divided by
its own periodized translate sum, so the integer translates sum to 1 by
construction (minimal overlap: two bumps per axis cover every point).  The
d-dimensional bump is the tensor power of the 1-d base.

Besov norms of localized pieces psi_mu * u are evaluated on a cell-aligned
crop of the grid around the translate; with zero extension and a crop pad
covering the full difference reach this is exact, not an approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .grid import Box, GridError, GridFunction, crop, lp_norm
from .differences import besov_norm_diff
from .profiles import smooth_partition_base
from .spaces import SpaceSpec, space_norm, sup_norm


@dataclass(frozen=True)
class PartitionOfUnity:
    """Normalized bump translates on the unit lattice of a box.

    profiles[i] holds the 1-d nodal bump on axis i at cell offsets
    -(width_cells - 1) .. (width_cells - 1) relative to a lattice point;
    centers lists the integer lattice translates whose support meets the box.
    """

    box: Box
    shape: tuple[int, ...]
    base_width: float
    cells_per_unit: tuple[int, ...]
    width_cells: tuple[int, ...]
    profiles: tuple[np.ndarray, ...] = field(repr=False)
    axis_centers: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def d(self) -> int:
        return self.box.d

    def centers(self) -> list[tuple[int, ...]]:
        """All active lattice translates (integer coordinates)."""
        import itertools

        return [tuple(c) for c in itertools.product(*self.axis_centers)]

    def inner_ranges(self) -> tuple[tuple[int, int], ...]:
        """Node index ranges of the inner box, where the translate sum is 1."""
        return tuple(
            (wc, n - wc) for wc, n in zip(self.width_cells, self.shape)
        )


def build_partition(
    base_width: float, box: Box, resolution: Sequence[int] | int
) -> PartitionOfUnity:
    """Partition of unity from a normalized mollifier bump on the unit lattice.

    Requires the grid to resolve the lattice exactly: one unit must be a whole
    number of cells per axis and the box corners must sit on the lattice grid.
    """
    if not base_width > 0:
        raise GridError(f"base width must be positive, got {base_width}")
    if isinstance(resolution, int):
        resolution = (resolution,) * box.d
    resolution = tuple(int(n) for n in resolution)
    dx = [w / n for w, n in zip(box.widths, resolution)]
    cells_per_unit = []
    for axis, d_ in enumerate(dx):
        cpu = 1.0 / d_
        if abs(cpu - round(cpu)) > 1e-9:
            raise GridError(f"axis {axis}: one lattice unit is not a whole number of cells")
        if abs(box.lower[axis] * round(cpu) - round(box.lower[axis] * round(cpu))) > 1e-9:
            raise GridError(f"axis {axis}: box corner does not sit on the cell grid")
        cells_per_unit.append(int(round(cpu)))
    width_cells = []
    for axis, cpu in enumerate(cells_per_unit):
        wc = base_width * cpu
        if abs(wc - round(wc)) > 1e-9:
            raise GridError(f"axis {axis}: base width is not a whole number of cells")
        width_cells.append(int(round(wc)))

    profiles = []
    for axis, (cpu, wc) in enumerate(zip(cells_per_unit, width_cells)):
        offsets = np.arange(-(wc - 1), wc) * dx[axis]
        raw = smooth_partition_base(offsets, base_width)
        # periodized translate sum over one lattice period, indexed by residue
        period = np.zeros(cpu)
        for res in range(cpu):
            x = res * dx[axis]
            mus = range(-int(math.ceil(base_width)) - 1, int(math.ceil(base_width)) + 2)
            period[res] = float(np.sum(smooth_partition_base(
                np.asarray([x - mu for mu in mus]), base_width)))
        if np.any(period <= 0.0):
            raise GridError("translate sum of the base bump vanishes; widen the bump")
        residues = (np.arange(-(wc - 1), wc)) % cpu
        profiles.append(raw / period[residues])

    axis_centers = []
    for axis in range(box.d):
        lo = int(math.floor(box.lower[axis] - base_width)) + 1
        hi = int(math.ceil(box.upper[axis] + base_width)) - 1
        axis_centers.append(tuple(range(lo, hi + 1)))
    return PartitionOfUnity(
        box=box,
        shape=resolution,
        base_width=base_width,
        cells_per_unit=tuple(cells_per_unit),
        width_cells=tuple(width_cells),
        profiles=tuple(profiles),
        axis_centers=tuple(axis_centers),
    )


def _center_index(pou: PartitionOfUnity, mu: Sequence[int]) -> list[int]:
    return [
        int(round((mu[i] - pou.box.lower[i]) * pou.cells_per_unit[i]))
        for i in range(pou.d)
    ]


def _support_slices(pou: PartitionOfUnity, mu: Sequence[int]):
    # per axis: (grid slice, profile slice) of the translate's support
    out = []
    for i in range(pou.d):
        c = _center_index(pou, mu)[i]
        wc = pou.width_cells[i]
        g0, g1 = max(0, c - wc + 1), min(pou.shape[i], c + wc)
        if g0 >= g1:
            return None
        p0 = g0 - (c - wc + 1)
        out.append((slice(g0, g1), slice(p0, p0 + (g1 - g0))))
    return out


def translate_function(pou: PartitionOfUnity, mu: Sequence[int]) -> GridFunction:
    """Materialize the bump translate psi_mu on the full grid."""
    values = np.zeros(pou.shape)
    sl = _support_slices(pou, mu)
    if sl is not None:
        weights = [pou.profiles[i][ps] for i, (_, ps) in enumerate(sl)]
        block = weights[0]
        for w in weights[1:]:
            block = np.multiply.outer(block, w)
        values[tuple(gs for gs, _ in sl)] = block
    return GridFunction(pou.box, values, "zero")


def apply_translate(pou: PartitionOfUnity, u: GridFunction, mu: Sequence[int]) -> GridFunction:
    """psi_mu * u on the full grid."""
    if tuple(u.n) != pou.shape or u.box != pou.box:
        raise GridError("function grid does not match the partition grid")
    values = np.zeros(pou.shape)
    sl = _support_slices(pou, mu)
    if sl is not None:
        weights = [pou.profiles[i][ps] for i, (_, ps) in enumerate(sl)]
        block = weights[0]
        for w in weights[1:]:
            block = np.multiply.outer(block, w)
        grid_sl = tuple(gs for gs, _ in sl)
        values[grid_sl] = u.values[grid_sl] * block
    return GridFunction(pou.box, values, u.extension)


def partition_deviation(pou: PartitionOfUnity) -> float:
    """max |sum_mu psi_mu - 1| over the inner box nodes."""
    total = np.zeros(pou.shape)
    for mu in pou.centers():
        total += translate_function(pou, mu).values
    inner = tuple(slice(a, b) for a, b in pou.inner_ranges())
    return float(np.max(np.abs(total[inner] - 1.0)))


def _cropped_translate_product(
    pou: PartitionOfUnity, u: GridFunction, mu: Sequence[int], pad_units: int
) -> GridFunction | None:
    sl = _support_slices(pou, mu)
    if sl is None:
        return None
    sub = u.values[tuple(gs for gs, _ in sl)]
    if not np.any(sub):
        return None
    prod = apply_translate(pou, u, mu)
    ranges = []
    for i, (gs, _) in enumerate(sl):
        pad = pad_units * pou.cells_per_unit[i]
        ranges.append((max(0, gs.start - pad), min(pou.shape[i], gs.stop + pad)))
    return crop(prod, ranges)


def uniform_norm(u: GridFunction, space: SpaceSpec, pou: PartitionOfUnity) -> float:
    """max over lattice translates of the space norm of psi_mu * u."""
    if u.extension != "zero":
        raise GridError("uniform norms require zero extension")
    best = 0.0
    if space.kind == "besov":
        pad = int(space.m_diff) + 1
        for mu in pou.centers():
            piece = _cropped_translate_product(pou, u, mu, pad)
            if piece is None:
                continue
            best = max(best, besov_norm_diff(piece, space.r, space.p, space.m_diff))
    else:
        for mu in pou.centers():
            sl = _support_slices(pou, mu)
            if sl is None or not np.any(u.values[tuple(gs for gs, _ in sl)]):
                continue
            best = max(best, space_norm(apply_translate(pou, u, mu), space))
    return best


def localization_ratio(
    u: GridFunction, r: float, p: float, m_diff: int, pou: PartitionOfUnity
) -> float:
    """Whole-domain Besov norm over the l_p aggregate of localized norms.

    The input must be compactly supported in the inner box so every localized
    piece keeps its difference reach inside the grid.
    """
    if u.extension != "zero":
        raise GridError("localization requires zero extension")
    numer = besov_norm_diff(u, r, p, m_diff)
    if numer == 0.0:
        raise GridError("localization ratio undefined for the zero function")
    pad = int(m_diff) + 1
    pieces = []
    for mu in pou.centers():
        piece = _cropped_translate_product(pou, u, mu, pad)
        if piece is not None:
            pieces.append(besov_norm_diff(piece, r, p, m_diff))
    if not pieces:
        raise GridError("no translate overlaps the support of u")
    arr = np.asarray(pieces)
    if math.isinf(p):
        denom = float(np.max(arr))
    else:
        denom = float(np.sum(arr**p)) ** (1.0 / p)
    return numer / denom


def algebra_ratio(f: GridFunction, g: GridFunction, space: SpaceSpec) -> float:
    """norm(f * g) / (norm(f) * norm(g)); bounded families exhibit the
    multiplication-algebra property."""
    from .grid import pointwise_multiply

    nf, ng = space_norm(f, space), space_norm(g, space)
    if nf == 0.0 or ng == 0.0:
        raise GridError("algebra ratio undefined for zero-norm inputs")
    return space_norm(pointwise_multiply(f, g), space) / (nf * ng)


def moser_ratio(f: GridFunction, g: GridFunction, space: SpaceSpec) -> float:
    """norm(f * g) / (norm(f) sup|g| + sup|f| norm(g)).

    Unbounded growth along a test family disproves the product inequality
    with mixed L_infinity terms for the given space.
    """
    from .grid import pointwise_multiply

    nf, ng = space_norm(f, space), space_norm(g, space)
    sf, sg = sup_norm(f), sup_norm(g)
    denom = nf * sg + sf * ng
    if denom == 0.0:
        raise GridError("moser ratio undefined: zero denominator")
    return space_norm(pointwise_multiply(f, g), space) / denom
