"""Heisenberg's-past scenario: a sharp position record does not license
a sharp retrodicted phase-space past.

A momentum-sharp packet hits a narrow position detector. The realized
post-collapse state obeys the uncertainty floor (its momentum spread
explodes), but the naive retrodiction that combines the sharp detector
window with the sharp pre-measurement momentum would carry a product
far below hbar/2 and is not any quantum state.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ..measure import collapse, momentum_stats, uncertainty_product, \
    window_projector
from ..qcore import Potential, evolve, gaussian_packet, make_grid
from .base import DEFAULT_SEED, Param, ScenarioReport, save_svg, scenario


@scenario(
    name="heisenberg_past",
    description="Sharp position detection of a momentum-sharp packet; "
                "the retrodicted joint past violates the uncertainty floor.",
    anchor="Records constrain the past more tightly than any quantum "
           "state could have been.",
    params=[
        Param("points", int, 1024, "grid points (power of two)"),
        Param("extent", float, 40.0, "half-width of the domain"),
        Param("sigma", float, 5.0, "initial packet width"),
        Param("T", float, 3.0, "drift time before detection"),
        Param("dt", float, 0.01, "integration step"),
        Param("window", float, 0.25, "detector window full width"),
        Param("seed", int, DEFAULT_SEED, "RNG seed (run is deterministic)"),
    ],
    check_docs=[
        ("pre_uncertainty_floor", "dx dp >= 0.5 (1 - 1e-3) before detection"),
        ("post_uncertainty_floor", "dx dp >= 0.5 (1 - 1e-3) after collapse"),
        ("post_momentum_spread", "post-collapse dp >= 2"),
        ("naive_retro_product", "window x pre dp < 0.1 (below the floor)"),
    ],
)
def run(params: dict, outdir: Path) -> ScenarioReport:
    report = ScenarioReport(name="heisenberg_past", params=params)
    grid = make_grid(1, [-params["extent"], params["extent"]],
                     params["points"])
    V = Potential(grid, "free")
    psi0 = gaussian_packet(grid, 0.0, params["sigma"], 0.0)

    floor = 0.5 * (1.0 - 1e-3)
    up0 = uncertainty_product(psi0)
    report.add_check("pre_uncertainty_floor", "dx dp >= 0.5 (1 - 1e-3)",
                     up0, up0 >= floor)
    _, sp0 = momentum_stats(psi0)
    dp_pre = float(sp0[0])
    report.notes.append(f"pre-measurement dp = {dp_pre:.4f}")

    psiT = evolve(psi0, V, params["T"], params["dt"],
                  snapshot_stride=10**9).snapshots[-1]
    w = params["window"]
    detector = window_projector(grid, [-w / 2, w / 2], label="detector")
    post = collapse(psiT, detector)

    up1 = uncertainty_product(post)
    report.add_check("post_uncertainty_floor", "dx dp >= 0.5 (1 - 1e-3)",
                     up1, up1 >= floor)
    _, sp1 = momentum_stats(post)
    dp_post = float(sp1[0])
    report.add_check("post_momentum_spread", "dp >= 2", dp_post,
                     dp_post >= 2.0,
                     detail=f"spread grew {dp_post / dp_pre:.0f}x")

    # the naive past: detector sharpness AND the old momentum sharpness
    retro = w * dp_pre
    report.add_check("naive_retro_product", "window x pre dp < 0.1", retro,
                     retro < 0.1,
                     detail="speculative - no quantum state carries this "
                            "product, so it is not usable as an initial "
                            "condition")

    k = np.fft.fftshift(grid.wavenumbers())
    spec_pre = np.fft.fftshift(np.abs(np.fft.fft(psi0.psi)) ** 2)
    spec_post = np.fft.fftshift(np.abs(np.fft.fft(post.psi)) ** 2)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(k, spec_pre / spec_pre.max(), label="before detection")
    ax.semilogy(k, spec_post / spec_post.max(), label="after collapse")
    ax.set_xlabel("p")
    ax.set_ylabel("relative momentum density")
    ax.set_ylim(1e-8, 2)
    ax.legend()
    fig.tight_layout()
    save_svg(fig, outdir, "heisenberg_past.svg", report)
    plt.close(fig)
    return report
