"""Scenario framework: declared parameters, tolerance-tagged checks,
reports, and reproducible output directories.

Each scenario is a registered function taking a resolved parameter dict
and an output directory, and returning a ScenarioReport whose every
check carries its tolerance and verdict. Reports write as JSON (schema
``qretro-report/1``) and as plain text.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

REPORT_SCHEMA = "qretro-report/1"
DEFAULT_SEED = 1905  # fixed, documented; never time-based


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Param:
    name: str
    type: type
    default: object
    help: str = ""


@dataclass
class Check:
    name: str
    tolerance: str               # human-readable statement of the cut
    value: float
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "tolerance": self.tolerance,
                "value": self.value, "passed": self.passed,
                "detail": self.detail}


@dataclass
class ScenarioReport:
    name: str
    params: dict
    checks: list[Check] = field(default_factory=list)
    files: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add_check(self, name: str, tolerance: str, value: float,
                  passed: bool, detail: str = "") -> None:
        self.checks.append(Check(name, tolerance, float(value), bool(passed),
                                 detail))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "scenario": self.name,
            "params": self.params,
            "checks": [c.to_json() for c in self.checks],
            "files": sorted(self.files),
            "notes": self.notes,
            "passed": self.passed,
        }

    def to_text(self) -> str:
        lines = [f"scenario: {self.name}", "parameters:"]
        for k in sorted(self.params):
            lines.append(f"  {k} = {self.params[k]}")
        lines.append("checks:")
        for c in self.checks:
            mark = "PASS" if c.passed else "FAIL"
            lines.append(f"  [{mark}] {c.name}: value {c.value:.6g}"
                         f" (tolerance: {c.tolerance})")
            if c.detail:
                lines.append(f"         {c.detail}")
        for n in self.notes:
            lines.append(f"note: {n}")
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)

    def write(self, outdir: Path) -> None:
        with open(outdir / "report.json", "w") as f:
            json.dump(self.to_json(), f, indent=2, sort_keys=True)
            f.write("\n")
        (outdir / "report.txt").write_text(self.to_text() + "\n")


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    description: str
    anchor: str                  # one-line statement of what the run probes
    params: tuple[Param, ...]
    check_docs: tuple[tuple[str, str], ...]   # (check name, tolerance)
    fn: Callable[[dict, Path], ScenarioReport]

    def defaults(self) -> dict:
        return {p.name: p.default for p in self.params}

    def resolve(self, overrides: dict | None = None) -> dict:
        out = self.defaults()
        for key, raw in (overrides or {}).items():
            spec = next((p for p in self.params if p.name == key), None)
            if spec is None:
                raise ScenarioError(
                    f"scenario {self.name!r} has no parameter {key!r}")
            try:
                out[key] = spec.type(raw)
            except (TypeError, ValueError):
                raise ScenarioError(
                    f"parameter {key!r} expects {spec.type.__name__},"
                    f" got {raw!r}")
        return out


registry: dict[str, ScenarioSpec] = {}


def scenario(name: str, description: str, anchor: str, params: list[Param],
             check_docs: list[tuple[str, str]]):
    def wrap(fn):
        registry[name] = ScenarioSpec(name=name, description=description,
                                      anchor=anchor, params=tuple(params),
                                      check_docs=tuple(check_docs), fn=fn)
        return fn
    return wrap


def get_scenario(name: str) -> ScenarioSpec:
    try:
        return registry[name]
    except KeyError:
        raise ScenarioError(f"unknown scenario {name!r};"
                            f" available: {', '.join(sorted(registry))}")


def prepare_outdir(path, force: bool = False) -> Path:
    out = Path(path)
    if out.exists() and any(out.iterdir()) and not force:
        raise ScenarioError(
            f"output directory {out} is not empty; pass --force to reuse")
    out.mkdir(parents=True, exist_ok=True)
    return out


def run_scenario(name: str, overrides: dict | None = None,
                 outdir="out", force: bool = False) -> ScenarioReport:
    spec = get_scenario(name)
    params = spec.resolve(overrides)
    out = prepare_outdir(outdir, force)
    report = spec.fn(params, out)
    report.write(out)
    return report


def save_svg(fig, outdir: Path, name: str, report: ScenarioReport) -> None:
    """Write a matplotlib figure as SVG and record it in the manifest."""
    path = outdir / name
    fig.savefig(path, format="svg")
    report.files.append(name)
