"""Acceptance suite: the ten package-level criteria, each a function
returning a verdict with its measured values.

Every criterion pins its tolerance here; the CLI ``verify`` subcommand
and the acceptance tests both call into this module so there is exactly
one definition of "the package works".
"""

from __future__ import annotations

import filecmp
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .bohm import velocity
from .histories import (
    FiniteProjector,
    History,
    ProjectorFamily,
    chain_operator,
    decoherence_functional,
    heisenberg_projector,
    history_probability,
)
from .measure import make_rng
from .qcore import (
    Potential,
    evolve,
    continuity_residual,
    fidelity,
    gaussian_packet,
    make_grid,
    plane_wave,
    reverse_evolve,
)
from .scenarios import run_scenario
from .toymodels import two_slit_toy


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] criterion {self.number}: {self.name} - {self.detail}"

    def to_json(self) -> dict:
        return {"number": self.number, "name": self.name,
                "passed": self.passed, "detail": self.detail}


def _scenario_checks(name: str, overrides: dict | None = None) -> dict:
    """Run a scenario into a throwaway directory; return {check: Check}."""
    with tempfile.TemporaryDirectory() as tmp:
        report = run_scenario(name, overrides, outdir=tmp, force=True)
    return {c.name: c for c in report.checks}


def unitarity_reversibility() -> CriterionResult:
    grid = make_grid(1, [-10, 10], 256)
    V = Potential(grid, "harmonic", k=1.0)
    psi0 = gaussian_packet(grid, 1.0, 0.8, 0.5)
    rec = evolve(psi0, V, 10.0, 1e-3, snapshot_stride=10**9)
    norm_dev = abs(rec.snapshots[-1].norm() - 1.0)
    back = reverse_evolve(rec.snapshots[-1], V, 10.0, 1e-3)
    fid = fidelity(psi0, back)
    ok = norm_dev < 1e-10 and fid >= 1.0 - 1e-10
    return CriterionResult(1, "unitarity and reversibility", ok,
                           f"norm drift {norm_dev:.2e} over 1e4 steps, "
                           f"round-trip fidelity {fid:.12f}")


def free_particle_guidance() -> CriterionResult:
    grid = make_grid(1, [-10, 10], 256)
    k0 = 2.0 * np.pi / 20.0
    rng = make_rng(7)
    worst = 0.0
    for _ in range(100):
        k = k0 * int(rng.integers(-20, 21))
        wf = plane_wave(grid, k)
        x = float(rng.uniform(-10, 10))
        worst = max(worst, abs(velocity(wf, [x]) - k))
    ok = worst < 1e-6
    return CriterionResult(2, "plane-wave guidance velocity = p/m", ok,
                           f"max |v - p/m| = {worst:.2e} over 100 points")


def continuity_convergence() -> CriterionResult:
    residuals = []
    for points, dt in ((256, 0.02), (512, 0.01), (1024, 0.005)):
        grid = make_grid(1, [-10, 10], points)
        V = Potential(grid, "free")
        psi0 = gaussian_packet(grid, 0.0, 0.8, 2.0)
        residuals.append(continuity_residual(evolve(psi0, V, 1.0, dt)))
    ratios = [a / b for a, b in zip(residuals, residuals[1:])]
    ok = all(r >= 3.0 for r in ratios)
    return CriterionResult(3, "continuity-equation convergence", ok,
                           "residuals " +
                           " -> ".join(f"{r:.2e}" for r in residuals) +
                           f", drop factors {ratios[0]:.1f}, {ratios[1]:.1f}")


def two_slit_equivariance() -> CriterionResult:
    checks = _scenario_checks("two_slit")
    wanted = ["equivariance_ks", "fringe_minima", "no_crossing"]
    ok = all(checks[w].passed for w in wanted)
    return CriterionResult(4, "two-slit equivariance and fringes", ok,
                           f"KS {checks['equivariance_ks'].value:.4f}, "
                           f"{checks['fringe_minima'].value:.0f} deep minima, "
                           f"{checks['no_crossing'].value:.0f} crossings")


def retrodiction_contrast() -> CriterionResult:
    checks = _scenario_checks("s_wave")
    wanted = ["bohm_backtrack", "fapp_fidelity_identity",
              "fapp_fidelity_cap"]
    ok = all(checks[w].passed for w in wanted)
    return CriterionResult(
        5, "retrodiction contrast (Bohm vs FAPP)", ok,
        f"Bohm round-trip error {checks['bohm_backtrack'].value:.2e}, "
        f"FAPP fidelity {checks['fapp_fidelity_cap'].value:.4f} "
        f"(identity gap {checks['fapp_fidelity_identity'].value:.2e})")


def uncertainty_floor() -> CriterionResult:
    checks = _scenario_checks("heisenberg_past")
    retro = checks["naive_retro_product"].value
    ok = (checks["pre_uncertainty_floor"].passed
          and checks["post_uncertainty_floor"].passed
          and checks["post_momentum_spread"].passed
          and abs(retro - 0.025) <= 0.1 * 0.025)
    return CriterionResult(
        6, "uncertainty floor and sub-Heisenberg retrodiction", ok,
        f"retrodicted product {retro:.4f}, post-collapse dp "
        f"{checks['post_momentum_spread'].value:.2f}")


def _random_family(rng: np.random.Generator, n: int) -> ProjectorFamily:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    U, _ = np.linalg.qr(z)
    return ProjectorFamily([FiniteProjector(np.outer(U[:, j], U[:, j].conj()))
                            for j in range(n)])


def histories_algebra() -> CriterionResult:
    rng = make_rng(29)
    worst = {"idem": 0.0, "diag": 0.0, "single": 0.0, "coarse": 0.0,
             "conj": 0.0}
    for _ in range(100):
        n = int(rng.integers(2, 9))
        z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        H = (z + z.conj().T) / 2.0
        fam = _random_family(rng, n)
        psi = rng.normal(size=n) + 1j * rng.normal(size=n)
        psi /= np.linalg.norm(psi)
        t1, t2 = sorted(rng.uniform(0.1, 2.0, size=2))
        if t2 - t1 < 1e-3:
            t2 = t1 + 0.5

        for j in range(n):
            Q = heisenberg_projector(fam.members[j], H, t1).matrix
            worst["idem"] = max(worst["idem"],
                                float(np.max(np.abs(Q @ Q - Q))))

        hs = [History(((t1, 0, 0), (t2, 0, k))) for k in range(n)]
        D = decoherence_functional(hs, [fam], H, psi)
        for k, h in enumerate(hs):
            p = history_probability(chain_operator(h, [fam], H), psi)
            worst["diag"] = max(worst["diag"], abs(D.diagonal[k] - p))

        single = [History(((t1, 0, k),)) for k in range(n)]
        Ds = decoherence_functional(single, [fam], H, psi)
        worst["single"] = max(worst["single"], Ds.max_off_diagonal())

        # coarse-graining identity over the last slot's first two members
        fine = hs[:2]
        Df = decoherence_functional(fine, [fam], H, psi)
        summed = FiniteProjector(fam.members[0].matrix + fam.members[1].matrix)
        C = heisenberg_projector(summed, H, t2).matrix \
            @ heisenberg_projector(fam.members[0], H, t1).matrix
        p_coarse = history_probability(C, psi)
        p_sum = float(Df.diagonal.sum())
        cross = 2.0 * float(np.real(Df.matrix[0, 1]))
        worst["coarse"] = max(worst["coarse"],
                              abs(p_coarse - p_sum - cross))

        zw = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        W, _ = np.linalg.qr(zw)
        H2 = W @ H @ W.conj().T
        fam2 = ProjectorFamily([FiniteProjector(W @ p.matrix @ W.conj().T)
                                for p in fam.members])
        psi2 = W @ psi
        for h in hs[:2]:
            p_a = history_probability(chain_operator(h, [fam], H), psi)
            p_b = history_probability(chain_operator(h, [fam2], H2), psi2)
            worst["conj"] = max(worst["conj"], abs(p_a - p_b))

    ok = (worst["idem"] < 1e-10 and worst["diag"] < 1e-12
          and worst["single"] < 1e-14 and worst["coarse"] < 1e-12
          and worst["conj"] < 1e-12)
    return CriterionResult(
        7, "histories algebra on random instances", ok,
        "worst: " + ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def two_slit_toy_values() -> CriterionResult:
    m = two_slit_toy(phi=0.0)
    fams, H, psi = m["families"], m["H"], m["psi0"]
    t1, t2 = m["t_slit"], m["t_detector"]
    h_d = History(((t2, 1, 0),))
    p_d = history_probability(chain_operator(h_d, fams, H), psi)
    fine = [History(((t1, 0, s), (t2, 1, 0))) for s in (0, 1)]
    p_fine = sum(history_probability(chain_operator(h, fams, H), psi)
                 for h in fine)
    D = decoherence_functional(fine, fams, H, psi)
    offdiag = D.max_off_diagonal()

    mr = two_slit_toy(phi=0.0, which_path=True)
    finer = [History(((t1, 0, s), (t2, 1, 0))) for s in (0, 1)]
    Dr = decoherence_functional(finer, mr["families"], mr["H"], mr["psi0"])
    p_d_rec = history_probability(
        chain_operator(History(((t2, 1, 0),)), mr["families"], mr["H"]),
        mr["psi0"])
    additivity = abs(p_d_rec - float(Dr.diagonal.sum()))

    ok = (abs(p_d - 1.0) < 1e-12 and abs(p_fine - 0.5) < 1e-12
          and abs(offdiag - 0.25) < 1e-12
          and Dr.max_off_diagonal() < 1e-12 and additivity < 1e-12)
    return CriterionResult(
        8, "two-slit toy interference and which-path record", ok,
        f"p(d) = {p_d:.12f}, fine sum {p_fine:.12f}, |D(A,B)| = "
        f"{offdiag:.12f}; with record: offdiag {Dr.max_off_diagonal():.1e}, "
        f"additivity defect {additivity:.1e}")


def cat_ambiguity() -> CriterionResult:
    checks = _scenario_checks("cat")
    ok = (checks["alive_candidate"].value < 1e-12
          and checks["superposed_candidate"].value < 1e-12
          and checks["past_ambiguous"].passed)
    return CriterionResult(
        9, "cat record admits two pasts", ok,
        f"{checks['past_ambiguous'].value:.0f} admissible candidates, "
        f"probability gaps {checks['alive_candidate'].value:.1e} and "
        f"{checks['superposed_candidate'].value:.1e}")


def reproducibility() -> CriterionResult:
    overrides = {"points": 128, "sigma": 1.0, "T": 0.5, "dt": 0.01,
                 "n_traj": 100}
    names = ["trajectories.csv", "trajectories.json", "report.json"]
    with tempfile.TemporaryDirectory() as tmp:
        a, b = Path(tmp, "a"), Path(tmp, "b")
        run_scenario("two_slit", overrides, outdir=a, force=True)
        run_scenario("two_slit", overrides, outdir=b, force=True)
        same = [filecmp.cmp(a / f, b / f, shallow=False) for f in names]
    ok = all(same)
    return CriterionResult(
        10, "byte-identical reruns at fixed seed", ok,
        ", ".join(f"{f} {'identical' if s else 'DIFFERS'}"
                  for f, s in zip(names, same)))


CRITERIA: list[Callable[[], CriterionResult]] = [
    unitarity_reversibility,
    free_particle_guidance,
    continuity_convergence,
    two_slit_equivariance,
    retrodiction_contrast,
    uncertainty_floor,
    histories_algebra,
    two_slit_toy_values,
    cat_ambiguity,
    reproducibility,
]


def run_acceptance(report: Callable[[str], None] | None = None
                   ) -> list[CriterionResult]:
    """Evaluate every criterion, optionally streaming one line apiece."""
    results = []
    for fn in CRITERIA:
        r = fn()
        results.append(r)
        if report is not None:
            report(r.line())
    return results
