"""Command-line front end: scenario discovery, execution, and the
acceptance suite.

Exit codes: 0 success / all checks pass, 1 check failure, 2 usage error,
3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .acceptance import run_acceptance
from .scenarios import DEFAULT_SEED, ScenarioError, get_scenario, registry, \
    run_scenario

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("QP_THREADS", "")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ScenarioError(f"QP_THREADS must be an integer, got {env!r}")
    return 1


def _parse_overrides(pairs: list[str]) -> dict:
    out = {}
    for item in pairs:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ScenarioError(f"--set expects key=value, got {item!r}")
        out[key] = value
    return out


def _load_spec_file(path: str) -> dict:
    try:
        with open(path) as f:
            raw = json.load(f)
    except OSError as e:
        raise ScenarioError(f"cannot read spec file: {e}")
    except json.JSONDecodeError as e:
        raise ScenarioError(f"malformed spec file {path}: {e}")
    if not isinstance(raw, dict):
        raise ScenarioError("spec file must hold a JSON object of parameters")
    return raw


def cmd_list(args) -> int:
    for name in sorted(registry):
        spec = registry[name]
        print(f"{name}: {spec.description}")
        for p in spec.params:
            print(f"    {p.name} ({p.type.__name__}, default {p.default})"
                  f" - {p.help}")
    return EXIT_OK


def cmd_describe(args) -> int:
    spec = get_scenario(args.scenario)
    print(f"scenario: {spec.name}")
    print(f"  {spec.description}")
    print(f"anchor: {spec.anchor}")
    print("parameters:")
    for p in spec.params:
        print(f"  {p.name} ({p.type.__name__}, default {p.default})"
              f" - {p.help}")
    print("checks:")
    for name, tol in spec.check_docs:
        print(f"  {name}: {tol}")
    return EXIT_OK


def cmd_run(args) -> int:
    overrides = {}
    if args.spec:
        overrides.update(_load_spec_file(args.spec))
    overrides.update(_parse_overrides(args.set or []))
    if args.seed is not None:
        overrides["seed"] = args.seed
    outdir = args.out or os.path.join("out", args.scenario)
    threads = _threads(args)
    report = run_scenario(args.scenario, overrides, outdir=outdir,
                          force=args.force)
    report.notes.append(f"threads = {threads}")
    report.write(Path(outdir))
    print(report.to_text())
    print(f"outputs written to {outdir}")
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_verify(args) -> int:
    results = run_acceptance(report=print)
    summary = {
        "criteria": [r.to_json() for r in results],
        "passed": all(r.passed for r in results),
    }
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w") as f:
            json.dump(summary, f, indent=2, sort_keys=True)
            f.write("\n")
        print(f"summary written to {out}")
    n_fail = sum(not r.passed for r in results)
    print(f"acceptance: {len(results) - n_fail}/{len(results)} criteria pass")
    return EXIT_OK if n_fail == 0 else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qretro",
        description="Numerical laboratory contrasting textbook collapse, "
                    "Bohmian trajectories, and decoherent histories on "
                    "retrodiction.")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="enumerate scenarios with their parameters")

    d = sub.add_parser("describe",
                       help="show one scenario's checks and tolerances")
    d.add_argument("scenario")

    r = sub.add_parser("run", help="execute a scenario and write its outputs")
    r.add_argument("scenario")
    r.add_argument("--seed", type=int, default=None,
                   help=f"RNG seed (scenario default {DEFAULT_SEED})")
    r.add_argument("--out", default=None,
                   help="output directory (default out/<scenario>)")
    r.add_argument("--spec", default=None,
                   help="JSON file of parameter overrides")
    r.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override one parameter (repeatable; wins over --spec)")
    r.add_argument("--threads", type=int, default=None,
                   help="worker thread cap (env QP_THREADS as fallback)")
    r.add_argument("--force", action="store_true",
                   help="reuse a non-empty output directory")

    v = sub.add_parser("verify", help="run the full acceptance suite")
    v.add_argument("--out", default=None,
                   help="write a machine-readable JSON summary here")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    handlers = {"list": cmd_list, "describe": cmd_describe, "run": cmd_run,
                "verify": cmd_verify}
    try:
        return handlers[args.command](args)
    except ScenarioError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
