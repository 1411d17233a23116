"""Textbook measurement: position-window projectors, Born probabilities,
seeded outcome sampling, collapse, and the irreversibility quantifier.

Projectors here are diagonal in position (boolean cell masks); momentum
statistics come from the spectral transform. The random generator is
numpy's PCG64, always constructed from an explicit integer seed; derived
substreams use ``substream_seed``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qcore import (
    Grid,
    Potential,
    WaveFunction,
    density,
    evolve,
    fidelity,
    reverse_evolve,
)


class MeasureError(ValueError):
    pass


def make_rng(seed: int) -> np.random.Generator:
    """The package-wide generator: PCG64 seeded with a 64-bit integer."""
    return np.random.Generator(np.random.PCG64(int(seed)))


def substream_seed(seed: int, index: int) -> int:
    """Stable derived seed for the index-th parallel substream."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass
class GridProjector:
    grid: Grid
    mask: np.ndarray  # boolean, one flag per cell
    label: str = ""

    def __post_init__(self):
        self.mask = np.asarray(self.mask, dtype=bool)
        if self.mask.shape != self.grid.shape:
            raise MeasureError("mask shape does not match grid")
        if not self.mask.any():
            raise MeasureError(f"projector {self.label!r} selects no cells")

    def weight(self, wf: WaveFunction) -> float:
        """Born weight <psi|P|psi>."""
        return float(np.sum(np.abs(wf.psi[self.mask]) ** 2)
                     * self.grid.cell_volume)


def window_projector(grid: Grid, box, label: str = "") -> GridProjector:
    """Projector onto cells whose centers fall inside a coordinate box."""
    b = np.asarray(box, dtype=float)
    if b.ndim == 1:
        b = b[None, :]
    if b.shape != (grid.dim, 2):
        raise MeasureError(f"box needs {grid.dim} (lo, hi) pairs")
    xs = grid.meshgrid()
    mask = np.ones(grid.shape, dtype=bool)
    for a in range(grid.dim):
        mask &= (xs[a] >= b[a, 0]) & (xs[a] <= b[a, 1])
    if not mask.any():
        raise MeasureError("window does not intersect the grid")
    return GridProjector(grid, mask, label or f"box{b.tolist()}")


def sector_projectors(grid: Grid, n_sectors: int,
                      offset: float = np.pi / 8) -> list[GridProjector]:
    """Angular-sector partition of a 2D grid about the origin.

    The default offset tilts sector boundaries off the lattice axes and
    diagonals, so the eight-fold lattice symmetry maps sectors onto each
    other exactly (only the origin cell breaks the tie).
    """
    if grid.dim != 2:
        raise MeasureError("sector projectors need a 2D grid")
    xs, ys = grid.meshgrid()
    theta = np.mod(np.arctan2(ys, xs) - offset, 2.0 * np.pi)
    width = 2.0 * np.pi / n_sectors
    out = []
    for k in range(n_sectors):
        mask = (theta >= k * width) & (theta < (k + 1) * width)
        out.append(GridProjector(grid, mask, label=f"sector{k}"))
    return out


@dataclass
class Partition:
    """Exhaustive, mutually exclusive list of grid projectors."""
    projectors: list[GridProjector]

    def __post_init__(self):
        if not self.projectors:
            raise MeasureError("empty partition")
        grid = self.projectors[0].grid
        cover = np.zeros(grid.shape, dtype=int)
        for p in self.projectors:
            if p.grid != grid:
                raise MeasureError("partition mixes grids")
            cover += p.mask
        if (cover > 1).any():
            raise MeasureError("partition projectors overlap")
        if (cover == 0).any():
            raise MeasureError("partition does not cover the grid")

    @property
    def grid(self) -> Grid:
        return self.projectors[0].grid

    def __len__(self) -> int:
        return len(self.projectors)


def half_space_partition(grid: Grid, axis: int = 0,
                         split: float = 0.0) -> Partition:
    xs = grid.meshgrid()[axis]
    lo = GridProjector(grid, xs < split, label=f"axis{axis}<{split}")
    hi = GridProjector(grid, xs >= split, label=f"axis{axis}>={split}")
    return Partition([lo, hi])


def born_probabilities(wf: WaveFunction, partition: Partition) -> np.ndarray:
    if wf.grid != partition.grid:
        raise MeasureError("state and partition grids differ")
    rho = density(wf) * wf.grid.cell_volume
    return np.array([float(rho[p.mask].sum()) for p in partition.projectors])


def collapse(wf: WaveFunction, projector: GridProjector) -> WaveFunction:
    """P psi / ||P psi||. Fails on outcomes of essentially zero weight."""
    if wf.grid != projector.grid:
        raise MeasureError("state and projector grids differ")
    psi = np.where(projector.mask, wf.psi, 0.0)
    n = np.sqrt(np.sum(np.abs(psi) ** 2) * wf.grid.cell_volume)
    if n <= 1e-9:
        raise MeasureError(
            f"projector {projector.label!r} carries null weight {n**2:.3e}")
    return WaveFunction(wf.grid, psi / n, wf.time)


@dataclass
class MeasurementOutcome:
    index: int
    probability: float
    post_state: WaveFunction
    seed: int

    def to_json(self) -> dict:
        return {"index": self.index, "probability": self.probability,
                "seed": self.seed}


def sample_outcome(wf: WaveFunction, partition: Partition,
                   seed: int) -> MeasurementOutcome:
    """Draw one Born-rule outcome and collapse onto it.

    Cumulative-sum inversion: a uniform draw u selects bin k iff
    cum_{k-1} <= u < cum_k.
    """
    p = born_probabilities(wf, partition)
    u = make_rng(seed).random()
    k = int(np.searchsorted(np.cumsum(p), u, side="right"))
    k = min(k, len(p) - 1)  # guard against roundoff at u ~ 1
    return MeasurementOutcome(index=k, probability=float(p[k]),
                              post_state=collapse(wf, partition.projectors[k]),
                              seed=int(seed))


def position_stats(wf: WaveFunction) -> tuple[np.ndarray, np.ndarray]:
    """Per-axis (mean, std) of the position density."""
    rho = density(wf) * wf.grid.cell_volume
    xs = wf.grid.meshgrid()
    mean = np.empty(wf.grid.dim)
    std = np.empty(wf.grid.dim)
    for a in range(wf.grid.dim):
        mean[a] = np.sum(xs[a] * rho)
        std[a] = np.sqrt(max(np.sum((xs[a] - mean[a]) ** 2 * rho), 0.0))
    return mean, std


def momentum_stats(wf: WaveFunction) -> tuple[np.ndarray, np.ndarray]:
    """Per-axis (mean, std) of the spectral momentum distribution."""
    amp2 = np.abs(np.fft.fftn(wf.psi)) ** 2
    w = amp2 / amp2.sum()
    ks = np.meshgrid(*[wf.grid.wavenumbers(a) for a in range(wf.grid.dim)],
                     indexing="ij")
    mean = np.empty(wf.grid.dim)
    std = np.empty(wf.grid.dim)
    for a in range(wf.grid.dim):
        mean[a] = np.sum(ks[a] * w)
        std[a] = np.sqrt(max(np.sum((ks[a] - mean[a]) ** 2 * w), 0.0))
    return mean, std


def uncertainty_product(wf: WaveFunction, axis: int = 0) -> float:
    _, sx = position_stats(wf)
    _, sp = momentum_stats(wf)
    return float(sx[axis] * sp[axis])


def reconstruction_fidelity(psi0: WaveFunction, V: Potential, T: float,
                            projector: GridProjector, dt: float,
                            mass: float = 1.0) -> float:
    """Evolve, collapse, run the propagator backward; report overlap with
    the true initial state.

    In exact arithmetic the value equals ||P psi(T)||: the discarded
    branch weight is exactly the fidelity deficit, which is the whole
    content of "projectors have no inverse".
    """
    psiT = evolve(psi0, V, T, dt, snapshot_stride=10**9,
                  mass=mass).snapshots[-1]
    collapsed = collapse(psiT, projector)
    back = reverse_evolve(collapsed, V, T, dt, mass=mass)
    return fidelity(psi0, back)
