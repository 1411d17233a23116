"""On-disk layout for evolution records.

A record serializes to a directory:

    metadata.json            grid, dt, mass, potential kind/params, times,
                             sign convention note, schema version
    snapshot_000000.bin ...  one file per snapshot: little-endian float64,
                             interleaved (re, im) pairs, row-major for 2D

The snapshot index matches the order of the ``times`` list in the metadata.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .evolve import EvolutionRecord
from .grid import make_grid
from .state import Potential, WaveFunction

SCHEMA = "qretro-record/1"
CONVENTION = "psi(t) = exp(-i H t) psi(0), hbar = 1"


def _snapshot_bytes(psi: np.ndarray) -> bytes:
    flat = np.ascontiguousarray(psi).reshape(-1)
    inter = np.empty(2 * flat.size, dtype="<f8")
    inter[0::2] = flat.real
    inter[1::2] = flat.imag
    return inter.tobytes()


def save_record(record: EvolutionRecord, path) -> None:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    grid = record.snapshots[0].grid
    meta = {
        "schema": SCHEMA,
        "convention": CONVENTION,
        "grid": {
            "dim": grid.dim,
            "extents": [list(e) for e in grid.extents],
            "points": list(grid.points),
        },
        "dt": record.dt,
        "mass": record.mass,
        "masked": record.masked,
        "potential": record.potential.describe(),
        "times": [s.time for s in record.snapshots],
    }
    with open(out / "metadata.json", "w") as f:
        json.dump(meta, f, indent=2, sort_keys=True)
        f.write("\n")
    for i, snap in enumerate(record.snapshots):
        (out / f"snapshot_{i:06d}.bin").write_bytes(_snapshot_bytes(snap.psi))


def load_record(path) -> EvolutionRecord:
    src = Path(path)
    with open(src / "metadata.json") as f:
        meta = json.load(f)
    if meta.get("schema") != SCHEMA:
        raise ValueError(f"unrecognized record schema {meta.get('schema')!r}")
    g = meta["grid"]
    grid = make_grid(g["dim"], g["extents"], g["points"])
    pot = meta["potential"]
    kind = pot.pop("kind")
    if kind == "tabulated":
        raise ValueError("tabulated potentials are not round-tripped")
    potential = Potential(grid, kind, **pot)
    snaps = []
    for i, t in enumerate(meta["times"]):
        raw = np.frombuffer((src / f"snapshot_{i:06d}.bin").read_bytes(),
                            dtype="<f8")
        psi = (raw[0::2] + 1j * raw[1::2]).reshape(grid.shape)
        snaps.append(WaveFunction(grid, psi, float(t)))
    return EvolutionRecord(snapshots=snaps, dt=float(meta["dt"]),
                           potential=potential, mass=float(meta["mass"]),
                           masked=bool(meta["masked"]))
