"""Uniform periodic grids for 1D and 2D spectral propagation.

Cells tile ``[lo, hi)`` with samples at the cell centers
``lo + (i + 1/2) * spacing``; the upper edge is identified with the
lower one (periodic boundary). Centered sampling keeps symmetric
densities exactly balanced under a half-space split. Point counts are
powers of two so the FFT stays in its fast regime.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_CELLS = 2**22


class GridError(ValueError):
    pass


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    dim: int
    extents: tuple[tuple[float, float], ...]
    points: tuple[int, ...]
    spacings: tuple[float, ...] = field(init=False)

    def __post_init__(self):
        spacings = tuple(
            (hi - lo) / n for (lo, hi), n in zip(self.extents, self.points)
        )
        object.__setattr__(self, "spacings", spacings)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.points

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacings))

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.points))

    def coords(self, axis: int = 0) -> np.ndarray:
        """Cell-center coordinates along one axis."""
        lo, _ = self.extents[axis]
        h = self.spacings[axis]
        return lo + h * (np.arange(self.points[axis]) + 0.5)

    def meshgrid(self) -> list[np.ndarray]:
        """Coordinate arrays broadcast to the full grid shape (ij indexing)."""
        return list(np.meshgrid(*[self.coords(a) for a in range(self.dim)],
                                indexing="ij"))

    def wavenumbers(self, axis: int = 0) -> np.ndarray:
        """FFT-ordered angular wavenumbers along one axis."""
        return 2.0 * np.pi * np.fft.fftfreq(self.points[axis],
                                            d=self.spacings[axis])

    def k_squared(self) -> np.ndarray:
        """|k|^2 on the full grid, FFT-ordered."""
        ks = [self.wavenumbers(a) for a in range(self.dim)]
        if self.dim == 1:
            return ks[0] ** 2
        kx, ky = np.meshgrid(*ks, indexing="ij")
        return kx**2 + ky**2


def make_grid(dim: int, extents, points) -> Grid:
    """Build a validated uniform periodic grid.

    ``extents`` is one ``(lo, hi)`` pair per axis (a single pair is
    broadcast); ``points`` likewise a per-axis count or a single count.
    """
    if dim not in (1, 2):
        raise GridError(f"dim must be 1 or 2, got {dim}")
    ext = np.asarray(extents, dtype=float)
    if ext.ndim == 1:
        ext = np.tile(ext, (dim, 1))
    if ext.shape != (dim, 2):
        raise GridError(f"need {dim} (lo, hi) extent pairs, got shape {ext.shape}")
    pts = np.atleast_1d(np.asarray(points, dtype=int))
    if pts.size == 1:
        pts = np.repeat(pts, dim)
    if pts.size != dim:
        raise GridError(f"need {dim} point counts, got {pts.size}")
    for lo, hi in ext:
        if not hi > lo:
            raise GridError(f"degenerate extent [{lo}, {hi}]")
    for n in pts:
        if n < 16 or not _is_power_of_two(int(n)):
            raise GridError(f"points per axis must be a power of two >= 16, got {n}")
    if int(np.prod(pts)) > MAX_CELLS:
        raise GridError(f"cell count {int(np.prod(pts))} exceeds cap {MAX_CELLS}")
    return Grid(dim=dim,
                extents=tuple((float(lo), float(hi)) for lo, hi in ext),
                points=tuple(int(n) for n in pts))
