"""Wavefunctions on a grid, standard initial states, density and current.

Natural units throughout: hbar = 1, and m = 1 unless stated otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid


class StateError(ValueError):
    pass


@dataclass
class WaveFunction:
    grid: Grid
    psi: np.ndarray  # complex, shape == grid.shape
    time: float = 0.0

    def __post_init__(self):
        self.psi = np.asarray(self.psi, dtype=complex)
        if self.psi.shape != self.grid.shape:
            raise StateError(
                f"amplitude shape {self.psi.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(self.psi.view(float))):
            raise StateError("non-finite amplitudes")

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.psi) ** 2) * self.grid.cell_volume))

    def copy(self) -> "WaveFunction":
        return WaveFunction(self.grid, self.psi.copy(), self.time)


def inner(a: WaveFunction, b: WaveFunction) -> complex:
    """<a|b> with the grid quadrature weight."""
    if a.grid != b.grid:
        raise StateError("grid mismatch in inner product")
    return complex(np.vdot(a.psi, b.psi) * a.grid.cell_volume)


def fidelity(a: WaveFunction, b: WaveFunction) -> float:
    return abs(inner(a, b))


def normalize(wf: WaveFunction) -> WaveFunction:
    """Rescale to unit norm; the phase is untouched.

    A near-zero norm is an error: upstream this signals a collapse onto
    an outcome of vanishing probability.
    """
    n = wf.norm()
    if n <= 1e-12:
        raise StateError(f"cannot normalize: norm {n:.3e} below floor")
    return WaveFunction(wf.grid, wf.psi / n, wf.time)


def gaussian_packet(grid: Grid, center, sigma, momentum=0.0) -> WaveFunction:
    """Normalized Gaussian packet exp(-(x-x0)^2/(4 sigma^2) + i p0.x).

    ``sigma`` may be a scalar (isotropic) or per-axis. The packet must be
    resolvable (sigma >= 3 spacings) and sit at least 4 sigma from every
    boundary so the periodic wrap never sees appreciable amplitude.
    """
    x0 = np.atleast_1d(np.asarray(center, dtype=float))
    sig = np.atleast_1d(np.asarray(sigma, dtype=float))
    p0 = np.atleast_1d(np.asarray(momentum, dtype=float))
    if sig.size == 1:
        sig = np.repeat(sig, grid.dim)
    if p0.size == 1 and grid.dim == 2 and np.isscalar(momentum):
        p0 = np.repeat(p0, grid.dim)
    if x0.size != grid.dim or sig.size != grid.dim or p0.size != grid.dim:
        raise StateError("center/sigma/momentum do not match grid dimension")
    for a in range(grid.dim):
        lo, hi = grid.extents[a]
        h = grid.spacings[a]
        if sig[a] < 3.0 * h:
            raise StateError(
                f"sigma {sig[a]} too small for spacing {h} on axis {a}")
        if x0[a] - 4.0 * sig[a] < lo or x0[a] + 4.0 * sig[a] > hi:
            raise StateError(
                f"packet support within 4 sigma of boundary on axis {a}")
    xs = grid.meshgrid()
    arg = np.zeros(grid.shape, dtype=complex)
    for a in range(grid.dim):
        arg = arg - (xs[a] - x0[a]) ** 2 / (4.0 * sig[a] ** 2) \
            + 1j * p0[a] * xs[a]
    return normalize(WaveFunction(grid, np.exp(arg), 0.0))


def plane_wave(grid: Grid, momentum) -> WaveFunction:
    """Normalized lattice plane wave. Momentum is snapped to the k lattice."""
    p0 = np.atleast_1d(np.asarray(momentum, dtype=float))
    if p0.size != grid.dim:
        raise StateError("momentum does not match grid dimension")
    xs = grid.meshgrid()
    arg = np.zeros(grid.shape, dtype=complex)
    for a in range(grid.dim):
        dk = 2.0 * np.pi / (grid.extents[a][1] - grid.extents[a][0])
        k = dk * round(p0[a] / dk)
        arg = arg + 1j * k * xs[a]
    return normalize(WaveFunction(grid, np.exp(arg), 0.0))


def density(wf: WaveFunction) -> np.ndarray:
    """Position density |psi|^2 on the grid."""
    return np.abs(wf.psi) ** 2


def gradient(wf: WaveFunction) -> list[np.ndarray]:
    """Spectral gradient of psi, one complex array per axis."""
    psi_hat = np.fft.fftn(wf.psi)
    out = []
    for a in range(wf.grid.dim):
        k = wf.grid.wavenumbers(a)
        shape = [1] * wf.grid.dim
        shape[a] = k.size
        out.append(np.fft.ifftn(1j * k.reshape(shape) * psi_hat))
    return out


def current(wf: WaveFunction, mass: float = 1.0) -> np.ndarray:
    """Probability current J = Im(psi* grad psi)/m, shape (dim,) + grid.shape."""
    grads = gradient(wf)
    J = np.empty((wf.grid.dim,) + wf.grid.shape)
    for a, g in enumerate(grads):
        J[a] = (np.conj(wf.psi) * g).imag / mass
    return J


class Potential:
    """External potential realized on a grid.

    Kinds: ``free`` (identically zero), ``harmonic`` (0.5 * k * |x - x0|^2),
    ``barrier-mask`` (height inside a box, zero outside), ``tabulated``
    (caller-supplied real values).
    """

    KINDS = ("free", "harmonic", "barrier-mask", "tabulated")

    def __init__(self, grid: Grid, kind: str = "free", **params):
        if kind not in self.KINDS:
            raise StateError(f"unknown potential kind {kind!r}")
        self.grid = grid
        self.kind = kind
        self.params = params
        self.values = self._realize()
        if not np.all(np.isfinite(self.values)):
            raise StateError("potential values must be finite")

    def _realize(self) -> np.ndarray:
        g = self.grid
        if self.kind == "free":
            return np.zeros(g.shape)
        if self.kind == "harmonic":
            k = float(self.params.get("k", 1.0))
            x0 = np.atleast_1d(np.asarray(self.params.get("center", 0.0),
                                          dtype=float))
            if x0.size == 1:
                x0 = np.repeat(x0, g.dim)
            xs = g.meshgrid()
            r2 = sum((xs[a] - x0[a]) ** 2 for a in range(g.dim))
            return 0.5 * k * r2
        if self.kind == "barrier-mask":
            height = float(self.params["height"])
            box = np.asarray(self.params["box"], dtype=float)
            if box.ndim == 1:
                box = box[None, :]
            xs = g.meshgrid()
            mask = np.ones(g.shape, dtype=bool)
            for a in range(g.dim):
                mask &= (xs[a] >= box[a, 0]) & (xs[a] <= box[a, 1])
            V = np.zeros(g.shape)
            V[mask] = height
            return V
        values = np.asarray(self.params["values"], dtype=float)
        if values.shape != g.shape:
            raise StateError("tabulated values do not match grid shape")
        return values

    def describe(self) -> dict:
        out = {"kind": self.kind}
        for k, v in self.params.items():
            if isinstance(v, np.ndarray):
                continue  # tabulated arrays live in the binary snapshots
            out[k] = v
        return out
