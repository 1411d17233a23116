"""Bohmian trajectories: guidance velocity J/rho, RK4 integration
co-stepped with the wavefunction, ensembles, and backward runs.

The wavefunction advances on half-steps of the trajectory dt, so the
RK4 substep times (t, t + dt/2, t + dt) always coincide with a computed
field; rho and J are interpolated multilinearly to the particle position
and divided last, which keeps node noise out of the velocity away from
actual nodes. Nodes (rho below a relative floor) abort the trajectory
with an explicit flag; nothing is clamped silently.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .measure import make_rng, substream_seed
from .qcore import (
    Grid,
    Potential,
    SplitStepper,
    WaveFunction,
    current,
    density,
)


class NodeEncounter(RuntimeError):
    """The guidance field was sampled where rho is effectively zero."""


class BohmError(ValueError):
    pass


DEFAULT_NODE_FLOOR = 1e-12  # relative to the mean cell density


def _interp(fieldvals: np.ndarray, grid: Grid, X: np.ndarray) -> np.ndarray:
    """Periodic multilinear interpolation of a grid field at points X (m, dim)."""
    m = X.shape[0]
    idx0 = []
    frac = []
    for a in range(grid.dim):
        lo, _ = grid.extents[a]
        h = grid.spacings[a]
        u = (X[:, a] - lo) / h - 0.5  # nodes sit at cell centers
        i0 = np.floor(u).astype(int)
        frac.append(u - i0)
        idx0.append(np.mod(i0, grid.points[a]))
    if grid.dim == 1:
        i0 = idx0[0]
        i1 = (i0 + 1) % grid.points[0]
        f = frac[0]
        return (1.0 - f) * fieldvals[i0] + f * fieldvals[i1]
    i0, j0 = idx0
    i1 = (i0 + 1) % grid.points[0]
    j1 = (j0 + 1) % grid.points[1]
    fx, fy = frac
    return ((1 - fx) * (1 - fy) * fieldvals[i0, j0]
            + fx * (1 - fy) * fieldvals[i1, j0]
            + (1 - fx) * fy * fieldvals[i0, j1]
            + fx * fy * fieldvals[i1, j1])


class GuideField:
    """rho and J of one wavefunction, evaluable at arbitrary points."""

    def __init__(self, wf: WaveFunction, mass: float = 1.0,
                 node_floor: float = DEFAULT_NODE_FLOOR):
        self.grid = wf.grid
        self.rho = density(wf)
        self.J = current(wf, mass)
        self.floor = node_floor * float(self.rho.mean())

    def velocity_at(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(velocities, node_mask) at points X of shape (m, dim)."""
        r = _interp(self.rho, self.grid, X)
        node = r < self.floor
        r = np.where(node, 1.0, r)  # masked entries are discarded by callers
        v = np.empty_like(X)
        for a in range(self.grid.dim):
            v[:, a] = _interp(self.J[a], self.grid, X) / r
        v[node] = 0.0
        return v, node


def velocity(wf: WaveFunction, x, mass: float = 1.0,
             node_floor: float = DEFAULT_NODE_FLOOR) -> np.ndarray:
    """Guidance velocity J(x)/rho(x) at a single point."""
    X = np.atleast_2d(np.asarray(x, dtype=float))
    if X.shape != (1, wf.grid.dim):
        raise BohmError(f"point must have {wf.grid.dim} coordinates")
    v, node = GuideField(wf, mass, node_floor).velocity_at(X)
    if node[0]:
        raise NodeEncounter(f"density below node floor at {x}")
    return v[0] if wf.grid.dim > 1 else float(v[0, 0])


def two_particle_velocity(wf: WaveFunction, x12, mass: float = 1.0,
                          node_floor: float = DEFAULT_NODE_FLOOR) -> np.ndarray:
    """Configuration-space guidance for two 1D particles.

    The 2D grid axes are read as (x1, x2); each particle's current takes
    the gradient along its own axis, so this is the 2D guidance law with
    the axes reinterpreted.
    """
    if wf.grid.dim != 2:
        raise BohmError("two-particle states live on a 2D configuration grid")
    return velocity(wf, x12, mass, node_floor)


@dataclass
class Trajectory:
    times: np.ndarray            # (S,)
    positions: np.ndarray        # (S, dim)
    dt: float
    node_abort_step: int = -1    # -1: ran to completion
    wrapped: bool = False

    @property
    def aborted(self) -> bool:
        return self.node_abort_step >= 0

    @property
    def final_position(self) -> np.ndarray:
        last = self.node_abort_step if self.aborted else -1
        return self.positions[last]


@dataclass
class Ensemble:
    times: np.ndarray            # (S,)
    positions: np.ndarray        # (S, n, dim); NaN after a node abort
    dt: float
    seed: int
    abort_steps: np.ndarray      # (n,) int, -1 if clean
    wrapped: np.ndarray          # (n,) bool
    final_wf: WaveFunction | None = None
    field_snapshots: list[WaveFunction] = field(default_factory=list)

    @property
    def n_trajectories(self) -> int:
        return self.positions.shape[1]

    @property
    def node_abort_fraction(self) -> float:
        return float((self.abort_steps >= 0).mean())

    def clean_mask(self) -> np.ndarray:
        return self.abort_steps < 0

    def final_positions(self) -> np.ndarray:
        """Endpoints of the trajectories that ran to completion, (n_clean, dim)."""
        return self.positions[-1, self.clean_mask()]

    def write_csv(self, path, stride: int = 1) -> None:
        """One row per (trajectory, stored time): id, t, coordinates."""
        dim = self.positions.shape[2]
        rows = range(0, len(self.times), stride)
        last = len(self.times) - 1
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["trajectory", "t"] + [f"x{a}" for a in range(dim)])
            for j in range(self.n_trajectories):
                stop = self.abort_steps[j] if self.abort_steps[j] >= 0 else last
                for i in rows:
                    if i > stop:
                        break
                    w.writerow([j, f"{self.times[i]:.12g}"]
                               + [f"{self.positions[i, j, a]:.12g}"
                                  for a in range(dim)])

    def write_sidecar(self, path) -> None:
        meta = {
            "seed": self.seed,
            "dt": self.dt,
            "n_trajectories": self.n_trajectories,
            "node_aborts": [int(j) for j in np.nonzero(self.abort_steps >= 0)[0]],
            "wrapped": [int(j) for j in np.nonzero(self.wrapped)[0]],
        }
        with open(path, "w") as f:
            json.dump(meta, f, indent=2, sort_keys=True)
            f.write("\n")


def _wrap(X: np.ndarray, grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    out = X.copy()
    touched = np.zeros(X.shape[0], dtype=bool)
    for a in range(grid.dim):
        lo, hi = grid.extents[a]
        w = np.mod(out[:, a] - lo, hi - lo) + lo
        touched |= w != out[:, a]
        out[:, a] = w
    return out, touched


def _integrate_many(psi_t0: WaveFunction, V: Potential, X0: np.ndarray,
                    t1: float, dt: float, mass: float = 1.0,
                    node_floor: float = DEFAULT_NODE_FLOOR,
                    field_stride: int = 0) -> tuple[np.ndarray, np.ndarray,
                                                    np.ndarray, np.ndarray,
                                                    WaveFunction,
                                                    list[WaveFunction]]:
    """RK4-advance many positions in lockstep with the wavefunction."""
    t0 = psi_t0.time
    span = t1 - t0
    if dt <= 0:
        raise BohmError("dt must be positive; direction comes from t1 - t0")
    nf = abs(span) / dt
    if abs(nf - round(nf)) > 1e-9:
        raise BohmError("t1 - t0 must be an integer number of dt steps")
    N = int(round(nf))
    sdt = dt if span >= 0 else -dt
    m, dim = X0.shape
    if dim != psi_t0.grid.dim:
        raise BohmError("positions do not match grid dimension")

    positions = np.empty((N + 1, m, dim))
    positions[0] = X0
    abort = np.full(m, -1, dtype=int)
    wrapped = np.zeros(m, dtype=bool)
    snaps: list[WaveFunction] = []

    stepper = SplitStepper(V, sdt / 2.0, mass) if N else None
    wf = psi_t0
    F0 = GuideField(wf, mass, node_floor)
    if field_stride:
        snaps.append(wf.copy())

    v0, node0 = F0.velocity_at(X0)
    abort[node0] = 0
    positions[0, node0] = np.nan

    for i in range(N):
        wf_h = stepper.step(wf)
        Fh = GuideField(wf_h, mass, node_floor)
        wf = stepper.step(wf_h)
        F1 = GuideField(wf, mass, node_floor)

        alive = abort < 0
        # aborted rows carry NaN; evaluate them at a harmless dummy point
        center = np.array([0.5 * (lo + hi) for lo, hi in psi_t0.grid.extents])
        X = np.where(alive[:, None], positions[i], center)
        k1, b1 = F0.velocity_at(X)
        k2, b2 = Fh.velocity_at(X + 0.5 * sdt * k1)
        k3, b3 = Fh.velocity_at(X + 0.5 * sdt * k2)
        k4, b4 = F1.velocity_at(X + sdt * k3)
        Xn = X + (sdt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        Xn, touched = _wrap(Xn, psi_t0.grid)
        wrapped |= touched & alive

        hit = (b1 | b2 | b3 | b4) & alive
        abort[hit] = i
        positions[i + 1] = np.where((abort < 0)[:, None], Xn, np.nan)
        positions[i + 1, hit] = np.nan
        F0 = F1
        if field_stride and ((i + 1) % field_stride == 0 or i + 1 == N):
            snaps.append(wf.copy())

    times = t0 + sdt * np.arange(N + 1)
    return positions, times, abort, wrapped, wf, snaps


def integrate_trajectory(psi_t0: WaveFunction, V: Potential, X0, t1: float,
                         dt: float, mass: float = 1.0,
                         node_floor: float = DEFAULT_NODE_FLOOR) -> Trajectory:
    """Integrate one trajectory from psi_t0.time to t1 (either direction)."""
    X = np.atleast_2d(np.asarray(X0, dtype=float))
    grid = psi_t0.grid
    for a in range(grid.dim):
        lo, hi = grid.extents[a]
        if not (lo <= X[0, a] < hi):
            raise BohmError(f"start position outside extent on axis {a}")
    pos, times, abort, wrapped, _, _ = _integrate_many(
        psi_t0, V, X, t1, dt, mass, node_floor)
    if abort[0] == 0:
        raise NodeEncounter("density below node floor at the start position")
    return Trajectory(times=times, positions=pos[:, 0, :], dt=dt,
                      node_abort_step=int(abort[0]), wrapped=bool(wrapped[0]))


def sample_initial_positions(wf: WaveFunction, n: int, seed: int) -> np.ndarray:
    """n draws from |psi|^2: inverse-CDF over cells plus in-cell jitter."""
    if n < 1:
        raise BohmError("need at least one sample")
    grid = wf.grid
    w = (density(wf) * grid.cell_volume).reshape(-1)
    cum = np.cumsum(w)
    cum /= cum[-1]
    rng = make_rng(seed)
    cells = np.searchsorted(cum, rng.random(n), side="right")
    cells = np.minimum(cells, w.size - 1)
    idx = np.unravel_index(cells, grid.shape)
    out = np.empty((n, grid.dim))
    jitter = rng.random((n, grid.dim)) - 0.5
    for a in range(grid.dim):
        out[:, a] = grid.coords(a)[idx[a]] + jitter[:, a] * grid.spacings[a]
    return out


def run_ensemble(psi0: WaveFunction, V: Potential, T: float, dt: float,
                 n: int, seed: int, mass: float = 1.0,
                 node_floor: float = DEFAULT_NODE_FLOOR,
                 field_stride: int = 0) -> Ensemble:
    """Sample n starting points from |psi0|^2 and guide them to time T."""
    X0 = sample_initial_positions(psi0, n, substream_seed(seed, 0))
    pos, times, abort, wrapped, wf, snaps = _integrate_many(
        psi0, V, X0, psi0.time + T, dt, mass, node_floor,
        field_stride=field_stride)
    return Ensemble(times=times, positions=pos, dt=dt, seed=int(seed),
                    abort_steps=abort, wrapped=wrapped, final_wf=wf,
                    field_snapshots=snaps)


def ks_distance(samples: np.ndarray, coords: np.ndarray, pdf: np.ndarray,
                spacing: float) -> float:
    """One-sample Kolmogorov-Smirnov distance against a gridded density."""
    cdf = np.cumsum(pdf) * spacing
    cdf = cdf / cdf[-1]
    edges = coords + 0.5 * spacing
    xs = np.sort(np.asarray(samples, dtype=float))
    F = np.interp(xs, edges, cdf, left=0.0, right=1.0)
    n = xs.size
    lo = np.max(F - np.arange(n) / n)
    hi = np.max(np.arange(1, n + 1) / n - F)
    return float(max(lo, hi))


def crossing_count(ensemble: Ensemble, axis: int = 0,
                   split: float = 0.0) -> int:
    """Trajectories whose coordinate ever changes side of a dividing line."""
    x = ensemble.positions[..., axis]
    sign0 = np.sign(x[0] - split)
    with np.errstate(invalid="ignore"):
        crossed = np.nanmin(np.sign(x - split) * sign0, axis=0) < 0
    return int(np.count_nonzero(crossed))
