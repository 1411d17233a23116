"""Decoherent-histories calculus on a finite-dimensional space.

A history is a time-ordered list of projective yes/no answers; its chain
operator is the product of Heisenberg-picture projectors (latest factor
leftmost). Probabilities are squared chain norms, and the decoherence
functional's off-diagonals measure how far a history set is from
supporting classical probability talk.

Everything is dense numpy linear algebra; dimensions are capped at 64.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

MAX_DIM = 64
HERM_TOL = 1e-12


class HistoryError(ValueError):
    pass


def _as_matrix(M, name: str = "matrix") -> np.ndarray:
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise HistoryError(f"{name} must be square, got shape {A.shape}")
    if A.shape[0] > MAX_DIM:
        raise HistoryError(f"{name} dimension {A.shape[0]} exceeds cap {MAX_DIM}")
    return A


def check_hermitian(H, tol: float = HERM_TOL) -> np.ndarray:
    A = _as_matrix(H, "Hamiltonian")
    if np.max(np.abs(A - A.conj().T)) > tol:
        raise HistoryError("matrix is not Hermitian")
    return A


def check_projector(P, tol: float = HERM_TOL) -> np.ndarray:
    A = check_hermitian(P, tol)
    if np.max(np.abs(A @ A - A)) > tol:
        raise HistoryError("matrix is not idempotent")
    return A


@dataclass
class FiniteProjector:
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.matrix = check_projector(self.matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass
class ProjectorFamily:
    """Exhaustive, mutually orthogonal projectors at one logical time."""
    members: list[FiniteProjector]
    label: str = ""

    def __post_init__(self):
        if not self.members:
            raise HistoryError("empty projector family")
        n = self.members[0].dim
        total = np.zeros((n, n), dtype=complex)
        for i, p in enumerate(self.members):
            if p.dim != n:
                raise HistoryError("family mixes dimensions")
            for q in self.members[i + 1:]:
                if np.max(np.abs(p.matrix @ q.matrix)) > HERM_TOL:
                    raise HistoryError("family members are not orthogonal")
            total += p.matrix
        if np.max(np.abs(total - np.eye(n))) > HERM_TOL:
            raise HistoryError("family does not resolve the identity")

    @property
    def dim(self) -> int:
        return self.members[0].dim

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class History:
    """Ordered (time, family index, member index) events."""
    events: tuple[tuple[float, int, int], ...]

    def __post_init__(self):
        times = [t for t, _, _ in self.events]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise HistoryError("history times must strictly increase")


def _propagator(H: np.ndarray, t: float) -> np.ndarray:
    """exp(+iHt) by Hermitian eigendecomposition (exact for this class)."""
    w, V = np.linalg.eigh(H)
    return (V * np.exp(1j * w * t)) @ V.conj().T


def heisenberg_projector(P: FiniteProjector, H, t: float) -> FiniteProjector:
    """P(t) = exp(iHt) P exp(-iHt); remains a projector to roundoff."""
    Hm = check_hermitian(H)
    U = _propagator(Hm, t)
    return FiniteProjector(U @ P.matrix @ U.conj().T, label=f"{P.label}@t={t}")


def chain_operator(history: History, families: list[ProjectorFamily],
                   H) -> np.ndarray:
    """C = P_k(t_k) ... P_1(t_1), latest factor leftmost."""
    Hm = check_hermitian(H)
    n = families[0].dim if families else Hm.shape[0]
    C = np.eye(n, dtype=complex)
    for t, fam_idx, member_idx in history.events:
        try:
            fam = families[fam_idx]
        except IndexError:
            raise HistoryError(f"history references unregistered family {fam_idx}")
        P = heisenberg_projector(fam.members[member_idx], Hm, t)
        C = P.matrix @ C
    return C


def history_probability(C: np.ndarray, psi: np.ndarray) -> float:
    """p = ||C psi||^2 for a normalized state."""
    v = np.asarray(psi, dtype=complex)
    if abs(np.vdot(v, v) - 1.0) > 1e-9:
        raise HistoryError("state is not normalized")
    amp = C @ v
    return float(np.real(np.vdot(amp, amp)))


@dataclass
class DecoherenceMatrix:
    matrix: np.ndarray           # D(beta, alpha) = <C_beta psi | C_alpha psi>
    histories: list[History]

    @property
    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.matrix))

    def max_off_diagonal(self) -> float:
        D = self.matrix
        off = np.abs(D - np.diag(np.diag(D)))
        return float(off.max()) if D.shape[0] > 1 else 0.0


def decoherence_functional(histories: list[History],
                           families: list[ProjectorFamily], H,
                           psi: np.ndarray) -> DecoherenceMatrix:
    schedules = {tuple((t, f) for t, f, _ in h.events) for h in histories}
    if len(schedules) > 1:
        raise HistoryError("histories do not share one family schedule")
    v = np.asarray(psi, dtype=complex)
    branches = [chain_operator(h, families, H) @ v for h in histories]
    m = len(branches)
    D = np.empty((m, m), dtype=complex)
    for b in range(m):
        for a in range(m):
            D[b, a] = np.vdot(branches[b], branches[a])
    return DecoherenceMatrix(matrix=D, histories=list(histories))


def is_decoherent(D: DecoherenceMatrix, eps: float = 1e-8
                  ) -> tuple[bool, float]:
    """Off-diagonals small relative to the largest diagonal entry.

    The cut is policy, not physics: the formalism only asks for
    "approximately zero". Returns the witness magnitude either way.
    """
    witness = D.max_off_diagonal()
    scale = float(D.diagonal.max())
    return witness < eps * scale, witness


def additivity_defect(fine: list[History], families: list[ProjectorFamily],
                      H, psi: np.ndarray, slot: int | None = None) -> float:
    """|p(coarse) - sum p(fine)| for histories differing in one slot.

    The coarse history replaces the varying slot's projector by the sum
    of the fine members there; the defect equals 2 Re of the summed
    off-diagonal decoherence terms.
    """
    if len(fine) < 2:
        raise HistoryError("need at least two fine-grained histories")
    length = len(fine[0].events)
    if any(len(h.events) != length for h in fine):
        raise HistoryError("fine histories have different lengths")
    differing = [i for i in range(length)
                 if len({h.events[i] for h in fine}) > 1]
    if slot is None:
        if len(differing) != 1:
            raise HistoryError("histories must differ in exactly one slot")
        slot = differing[0]
    elif differing != [slot]:
        raise HistoryError(f"histories differ outside slot {slot}")
    t, fam_idx, _ = fine[0].events[slot]
    members = sorted({h.events[slot][2] for h in fine})
    if len(members) != len(fine):
        raise HistoryError("fine histories repeat a member in the varying slot")

    Hm = check_hermitian(H)
    summed = sum(families[fam_idx].members[k].matrix for k in members)
    P_sum = heisenberg_projector(FiniteProjector(summed), Hm, t)

    v = np.asarray(psi, dtype=complex)
    n = v.size
    C = np.eye(n, dtype=complex)
    for i, (ti, fi, mi) in enumerate(fine[0].events):
        if i == slot:
            C = P_sum.matrix @ C
        else:
            C = heisenberg_projector(families[fi].members[mi], Hm, ti).matrix @ C
    p_coarse = history_probability(C, v)
    p_fine = sum(history_probability(chain_operator(h, families, Hm), v)
                 for h in fine)
    return float(abs(p_coarse - p_fine))


@dataclass
class RetrodictionReport:
    """Which candidate pasts are compatible with one observed record."""
    observed_label: str
    table: list[dict]            # per candidate: label, probability, admissible
    threshold: float
    ambiguous: bool

    def to_json(self) -> dict:
        return {
            "observed": self.observed_label,
            "threshold": self.threshold,
            "candidates": self.table,
            "verdict": "past ambiguous" if self.ambiguous else "past unambiguous",
        }

    def to_text(self) -> str:
        lines = [f"observed record: {self.observed_label}",
                 f"admissibility threshold: {self.threshold}"]
        for row in self.table:
            tag = "admissible" if row["admissible"] else "excluded"
            lines.append(f"  {row['label']}: p(record) = {row['probability']:.6f}"
                         f"  [{tag}]")
        lines.append("verdict: past " +
                     ("AMBIGUOUS - multiple initial states reproduce the record"
                      if self.ambiguous else "unambiguous"))
        return "\n".join(lines)


def cat_retrodiction(final_family: ProjectorFamily, observed_member: int,
                     candidates: dict[str, np.ndarray], H, t_obs: float,
                     threshold: float = 0.05) -> RetrodictionReport:
    """Score candidate initial states against one observed final record."""
    if len(candidates) < 1:
        raise HistoryError("need at least one candidate initial state")
    Hm = check_hermitian(H)
    P = heisenberg_projector(final_family.members[observed_member], Hm, t_obs)
    table = []
    admissible = 0
    any_possible = False
    for label, state in candidates.items():
        v = np.asarray(state, dtype=complex)
        v = v / np.linalg.norm(v)
        p = history_probability(P.matrix, v)
        ok = p >= threshold
        admissible += ok
        any_possible |= p > 1e-12
        table.append({"label": label, "probability": p, "admissible": bool(ok)})
    if not any_possible:
        raise HistoryError("observed record is impossible under every candidate")
    obs_label = final_family.members[observed_member].label or \
        f"member {observed_member}"
    return RetrodictionReport(observed_label=obs_label, table=table,
                              threshold=threshold,
                              ambiguous=admissible >= 2)


# -- model file loading -------------------------------------------------------

def _complex_array(entries) -> np.ndarray:
    """Nested lists with [re, im] leaves -> complex ndarray."""
    a = np.asarray(entries, dtype=float)
    if a.shape[-1] != 2:
        raise HistoryError("complex entries must be [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def load_model(path) -> dict:
    """Load a histories model: Hamiltonian, families, schedule, states.

    Schema (JSON): {"dimension": n, "hamiltonian": [[[re,im],...],...],
    "families": [{"label": ..., "projectors": [matrix, ...]}, ...],
    "schedule": [{"time": t, "family": i}, ...],
    "states": {"name": [[re,im], ...], ...}}
    """
    with open(path) as f:
        raw = json.load(f)
    n = int(raw["dimension"])
    H = check_hermitian(_complex_array(raw["hamiltonian"]))
    if H.shape[0] != n:
        raise HistoryError("hamiltonian does not match declared dimension")
    families = []
    for fam in raw["families"]:
        members = [FiniteProjector(_complex_array(p),
                                   label=f"{fam.get('label', '')}[{i}]")
                   for i, p in enumerate(fam["projectors"])]
        families.append(ProjectorFamily(members, label=fam.get("label", "")))
    schedule = [(float(ev["time"]), int(ev["family"]))
                for ev in raw.get("schedule", [])]
    states = {name: _complex_array(v) for name, v in
              raw.get("states", {}).items()}
    return {"dimension": n, "hamiltonian": H, "families": families,
            "schedule": schedule, "states": states}
