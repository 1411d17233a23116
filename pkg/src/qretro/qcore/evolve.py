"""Split-step spectral propagation of i d(psi)/dt = H psi, H = p^2/2m + V.

Symmetric (Strang) splitting:

    psi' = exp(-i V dt/2) F^-1 exp(-i k^2 dt / 2m) F exp(-i V dt/2) psi

Every factor is a pointwise unit-modulus multiplier, so each step is
unitary to roundoff and exactly invertible by the same step with -dt.
The convention is psi(t) = exp(-i H t) psi(0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .state import Potential, StateError, WaveFunction


class EvolveError(ValueError):
    pass


class SplitStepper:
    """Precomputed split-step factors for one (potential, dt, mass) triple."""

    def __init__(self, V: Potential, dt: float, mass: float = 1.0):
        if dt == 0.0:
            raise EvolveError("dt must be nonzero")
        self.V = V
        self.dt = float(dt)
        self.mass = float(mass)
        self._half_kick = np.exp(-0.5j * V.values * self.dt)
        self._drift = np.exp(-0.5j * V.grid.k_squared() * self.dt / self.mass)

    def step(self, wf: WaveFunction) -> WaveFunction:
        if wf.grid != self.V.grid:
            raise StateError("wavefunction and potential live on different grids")
        psi = self._half_kick * wf.psi
        psi = np.fft.ifftn(self._drift * np.fft.fftn(psi))
        psi = self._half_kick * psi
        return WaveFunction(wf.grid, psi, wf.time + self.dt)


def step_split(wf: WaveFunction, V: Potential, dt: float,
               mass: float = 1.0) -> WaveFunction:
    """One symmetric split step. Negative dt propagates backward."""
    return SplitStepper(V, dt, mass).step(wf)


@dataclass
class EvolutionRecord:
    """Time-ordered snapshots of one propagation run."""
    snapshots: list[WaveFunction]
    dt: float
    potential: Potential
    mass: float = 1.0
    masked: bool = False  # True if a non-unitary absorber touched the run

    @property
    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.snapshots])


def _step_count(T: float, dt: float) -> int:
    n = T / dt
    if abs(n - round(n)) > 1e-9:
        raise EvolveError(f"T={T} is not an integer number of dt={dt} steps")
    return int(round(n))


def evolve(psi0: WaveFunction, V: Potential, T: float, dt: float,
           snapshot_stride: int = 1, mass: float = 1.0,
           absorber: np.ndarray | None = None) -> EvolutionRecord:
    """Propagate for time T = N dt, keeping every ``snapshot_stride``-th state.

    The first and last states are always kept. An optional absorbing mask
    (real factors <= 1, applied after each step) marks the record as
    masked and forfeits exact reversibility.
    """
    N = _step_count(T, dt)
    stepper = SplitStepper(V, dt, mass) if N else None
    snaps = [psi0.copy()]
    wf = psi0
    for i in range(1, N + 1):
        wf = stepper.step(wf)
        if absorber is not None:
            wf = WaveFunction(wf.grid, wf.psi * absorber, wf.time)
            n = wf.norm()
            if n <= 1e-12:
                raise EvolveError("absorber removed essentially all amplitude")
            wf = WaveFunction(wf.grid, wf.psi / n, wf.time)
        if i % snapshot_stride == 0 or i == N:
            snaps.append(wf.copy())
    return EvolutionRecord(snapshots=snaps, dt=dt, potential=V, mass=mass,
                           masked=absorber is not None)


def reverse_evolve(psiT: WaveFunction, V: Potential, T: float, dt: float,
                   mass: float = 1.0) -> WaveFunction:
    """Undo evolve(psi0, V, T, dt): apply N steps of -dt."""
    N = _step_count(T, dt)
    if N == 0:
        return psiT.copy()
    stepper = SplitStepper(V, -dt, mass)
    wf = psiT
    for _ in range(N):
        wf = stepper.step(wf)
    return wf


def cosine_absorber(grid, width: float) -> np.ndarray:
    """Cosine-ramp damping mask, 1 in the interior, ->0 at the edges."""
    mask = np.ones(grid.shape)
    xs = grid.meshgrid()
    for a in range(grid.dim):
        lo, hi = grid.extents[a]
        d = np.minimum(xs[a] - lo, hi - xs[a])
        ramp = np.where(d < width, np.sin(0.5 * np.pi * d / width) ** 2, 1.0)
        mask = mask * ramp
    return mask


def divergence(J: np.ndarray, grid) -> np.ndarray:
    """Spectral divergence of a current field of shape (dim,) + grid.shape."""
    out = np.zeros(grid.shape)
    for a in range(grid.dim):
        k = grid.wavenumbers(a)
        shape = [1] * grid.dim
        shape[a] = k.size
        out += np.fft.ifftn(1j * k.reshape(shape) * np.fft.fftn(J[a])).real
    return out


def continuity_residual(record: EvolutionRecord) -> float:
    """L2 residual of d(rho)/dt + div J over interior snapshots.

    The time derivative is a centered difference on the snapshot spacing,
    so the residual converges at second order in dt and in spacing.
    """
    from .state import current, density

    if len(record.snapshots) < 3:
        raise EvolveError("continuity residual needs at least 3 snapshots")
    grid = record.snapshots[0].grid
    cv = grid.cell_volume
    times = record.times
    h = times[1] - times[0]
    if not np.allclose(np.diff(times), h, rtol=0, atol=1e-9 * abs(h)):
        raise EvolveError("snapshots are not uniformly spaced")
    norms = []
    for i in range(1, len(record.snapshots) - 1):
        drho = (density(record.snapshots[i + 1])
                - density(record.snapshots[i - 1])) / (2.0 * h)
        divJ = divergence(current(record.snapshots[i], record.mass), grid)
        r = drho + divJ
        norms.append(np.sqrt(np.sum(r**2) * cv))
    return float(np.mean(norms))
