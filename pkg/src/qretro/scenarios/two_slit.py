"""Two-slit scenario: Bohmian trajectories through an interference pattern.

Two Gaussian packets launched side by side in y interfere as they drift
in x; an ensemble of trajectories lands on the fringe pattern with Born
statistics while each trajectory's slit of origin stays readable from
the sign of its final y coordinate (1D-in-y no-crossing property).
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ..bohm import crossing_count, ks_distance, run_ensemble
from ..qcore import Potential, WaveFunction, density, gaussian_packet, \
    make_grid, normalize
from .base import DEFAULT_SEED, Param, ScenarioReport, save_svg, scenario


def two_slit_state(grid, x0: float, slit_y: float, sigma: float,
                   p0: float) -> WaveFunction:
    """Symmetric superposition of two packets a slit spacing apart in y."""
    up = gaussian_packet(grid, [x0, slit_y], sigma, [p0, 0.0])
    dn = gaussian_packet(grid, [x0, -slit_y], sigma, [p0, 0.0])
    return normalize(WaveFunction(grid, up.psi + dn.psi))


def fringe_minima_contrast(counts: np.ndarray,
                           model: np.ndarray) -> list[tuple[int, float]]:
    """(bin, contrast) for each interior local minimum of the model marginal.

    Contrast compares the sampled counts at the minimum against the
    larger of the two neighboring model maxima; the outermost fringes
    are much dimmer on their outer flank, so the larger neighbor is the
    meaningful visibility scale.
    """
    n = len(model)
    minima = [j for j in range(1, n - 1)
              if model[j] < model[j - 1] and model[j] < model[j + 1]]
    maxima = [j for j in range(1, n - 1)
              if model[j] >= model[j - 1] and model[j] >= model[j + 1]]
    out = []
    for j in minima:
        left = [k for k in maxima if k < j]
        right = [k for k in maxima if k > j]
        peaks = [counts[left[-1]]] if left else []
        peaks += [counts[right[0]]] if right else []
        if not peaks:
            continue
        out.append((j, float(max(peaks) / max(counts[j], 1.0))))
    return out


@scenario(
    name="two_slit",
    description="Bohmian trajectory ensemble through a two-slit "
                "interference pattern.",
    anchor="Each trajectory's slit of origin is readable from its final "
           "position even though the arrival statistics show fringes.",
    params=[
        Param("points", int, 256, "grid points per axis (power of two)"),
        Param("extent", float, 16.0, "half-width of the square domain"),
        Param("slit_y", float, 1.5, "slit offset from the axis"),
        Param("sigma", float, 0.4, "packet width at each slit"),
        Param("p0", float, 8.0, "forward momentum"),
        Param("x0", float, -8.0, "launch plane"),
        Param("T", float, 3.5, "flight time"),
        Param("dt", float, 0.005, "integration step"),
        Param("n_traj", int, 10000, "ensemble size"),
        Param("seed", int, DEFAULT_SEED, "RNG seed"),
    ],
    check_docs=[
        ("equivariance_ks", "KS(final y, |psi_T|^2 marginal) < 0.03"),
        ("fringe_minima", ">= 3 interference minima with contrast > 5"),
        ("no_crossing", "0 trajectories cross the symmetry axis"),
        ("node_aborts", "abort fraction < 0.005"),
    ],
)
def run(params: dict, outdir: Path) -> ScenarioReport:
    report = ScenarioReport(name="two_slit", params=params)
    grid = make_grid(2, [-params["extent"], params["extent"]],
                     params["points"])
    V = Potential(grid, "free")
    psi0 = two_slit_state(grid, params["x0"], params["slit_y"],
                          params["sigma"], params["p0"])

    ens = run_ensemble(psi0, V, params["T"], params["dt"], params["n_traj"],
                       seed=params["seed"])
    report.add_check("node_aborts", "abort fraction < 0.005",
                     ens.node_abort_fraction,
                     ens.node_abort_fraction < 0.005)

    # slit of origin: the y coordinate never changes sign
    crossings = crossing_count(ens, axis=1)
    report.add_check("no_crossing", "0 trajectories cross y = 0", crossings,
                     crossings == 0,
                     detail="final y sign retrodicts the slit exactly")

    # equivariance of the arrival statistics against the evolved marginal
    final_y = ens.final_positions()[:, 1]
    rho_y = density(ens.final_wf).sum(axis=0) * grid.spacings[0]
    ks = ks_distance(final_y, grid.coords(1), rho_y, grid.spacings[1])
    report.add_check("equivariance_ks", "KS distance < 0.03", ks, ks < 0.03)

    # fringe visibility: sampled counts at the model marginal's minima
    n_bins = 64
    fold = grid.points[1] // n_bins
    model = rho_y.reshape(n_bins, fold).sum(axis=1)
    edges = np.linspace(-params["extent"], params["extent"], n_bins + 1)
    counts, _ = np.histogram(final_y, bins=edges)
    scored = fringe_minima_contrast(counts.astype(float), model)
    deep = [c for _, c in scored if c > 5.0]
    report.add_check("fringe_minima", ">= 3 minima with contrast > 5",
                     len(deep), len(deep) >= 3,
                     detail="contrasts: " +
                            ", ".join(f"{c:.1f}" for _, c in scored))

    ens.write_csv(outdir / "trajectories.csv", stride=20)
    ens.write_sidecar(outdir / "trajectories.json")
    report.files += ["trajectories.csv", "trajectories.json"]

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    centers = 0.5 * (edges[:-1] + edges[1:])
    ax1.bar(centers, counts / counts.sum(), width=edges[1] - edges[0],
            alpha=0.6, label="trajectory arrivals")
    ax1.plot(centers, model / model.sum(), "k-", label=r"$|\psi_T|^2$")
    ax1.set_xlabel("y")
    ax1.legend(fontsize=8)
    stride = max(1, ens.n_trajectories // 200)
    for j in range(0, ens.n_trajectories, stride):
        ax2.plot(ens.times, ens.positions[:, j, 1], lw=0.3, alpha=0.5)
    ax2.set_xlabel("t")
    ax2.set_ylabel("y")
    fig.tight_layout()
    save_svg(fig, outdir, "two_slit.svg", report)
    plt.close(fig)
    return report
