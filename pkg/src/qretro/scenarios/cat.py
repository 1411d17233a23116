"""Cat scenario: one final record, two admissible pasts.

A four-dimensional cat-and-trigger model whose unitary dynamics funnel
two distinct initial states - "cat alive" and an alive/dead
superposition - onto the same "cat alive" final record. Retrodiction
from the record alone cannot pick between them: the past is ambiguous
as a matter of the formalism, not of ignorance.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..histories import cat_retrodiction
from ..toymodels import cat_trigger_model
from .base import DEFAULT_SEED, Param, ScenarioReport, scenario


@scenario(
    name="cat",
    description="Cat-and-trigger retrodiction: two distinct initial "
                "states reproduce one observed record.",
    anchor="A perfect final record still underdetermines the past.",
    params=[
        Param("threshold", float, 0.05, "admissibility probability cut"),
        Param("seed", int, DEFAULT_SEED, "RNG seed (run is deterministic)"),
    ],
    check_docs=[
        ("alive_candidate", "p(record | cat alive) = 1 within 1e-9"),
        ("superposed_candidate",
         "p(record | alive + dead superposition) = 1 within 1e-9"),
        ("past_ambiguous", ">= 2 candidates pass the threshold"),
    ],
)
def run(params: dict, outdir: Path) -> ScenarioReport:
    report = ScenarioReport(name="cat", params=params)
    model = cat_trigger_model()
    verdict = cat_retrodiction(model["family"], model["observed_member"],
                               model["candidates"], model["H"],
                               model["t_obs"],
                               threshold=params["threshold"])

    probs = {row["label"]: row["probability"] for row in verdict.table}
    p_alive = probs["cat alive"]
    report.add_check("alive_candidate", "|p - 1| < 1e-9", abs(p_alive - 1.0),
                     abs(p_alive - 1.0) < 1e-9)
    p_sup = probs["alive + dead superposition"]
    report.add_check("superposed_candidate", "|p - 1| < 1e-9",
                     abs(p_sup - 1.0), abs(p_sup - 1.0) < 1e-9)
    n_ok = sum(row["admissible"] for row in verdict.table)
    report.add_check("past_ambiguous", ">= 2 admissible candidates", n_ok,
                     verdict.ambiguous)
    report.notes.append(verdict.to_text().splitlines()[-1])
    report.notes.append("contrast: the trajectory scenarios (two_slit, "
                        "s_wave, etp_timing) each return a unique past")

    with open(outdir / "retrodiction.json", "w") as f:
        json.dump(verdict.to_json(), f, indent=2, sort_keys=True)
        f.write("\n")
    (outdir / "retrodiction.txt").write_text(verdict.to_text() + "\n")
    report.files += ["retrodiction.json", "retrodiction.txt"]
    return report
