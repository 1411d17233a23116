"""Small canned finite-dimensional models used by tests and scenarios."""

from __future__ import annotations

import numpy as np

from .histories import FiniteProjector, ProjectorFamily


def _proj(vec: np.ndarray, label: str) -> FiniteProjector:
    v = np.asarray(vec, dtype=complex)
    v = v / np.linalg.norm(v)
    return FiniteProjector(np.outer(v, v.conj()), label=label)


def two_slit_toy(phi: float = 0.0, which_path: bool = False) -> dict:
    """Path-basis two-slit model: slits {A, B}, detector state
    (|A> + e^{i phi}|B>)/sqrt(2), frozen dynamics.

    With ``which_path`` a two-dimensional record factor is appended and
    the initial state entangles each path with an orthogonal record.
    """
    if not which_path:
        A = np.array([1.0, 0.0], dtype=complex)
        B = np.array([0.0, 1.0], dtype=complex)
        d = (A + np.exp(1j * phi) * B) / np.sqrt(2.0)
        slit = ProjectorFamily([_proj(A, "slit A"), _proj(B, "slit B")],
                               label="slit")
        Pd = _proj(d, "detector d")
        det = ProjectorFamily(
            [Pd, FiniteProjector(np.eye(2) - Pd.matrix, "detector miss")],
            label="detector")
        psi0 = (A + B) / np.sqrt(2.0)
        H = np.zeros((2, 2), dtype=complex)
        return {"families": [slit, det], "H": H, "psi0": psi0,
                "t_slit": 1.0, "t_detector": 2.0}

    # path (x) record, ordered A r_A, A r_B, B r_A, B r_B
    eye2 = np.eye(2, dtype=complex)
    A = np.array([1.0, 0.0], dtype=complex)
    B = np.array([0.0, 1.0], dtype=complex)
    d = (A + np.exp(1j * phi) * B) / np.sqrt(2.0)
    PA = np.kron(np.outer(A, A.conj()), eye2)
    PB = np.kron(np.outer(B, B.conj()), eye2)
    Pd = np.kron(np.outer(d, d.conj()), eye2)
    slit = ProjectorFamily([FiniteProjector(PA, "slit A"),
                            FiniteProjector(PB, "slit B")], label="slit")
    det = ProjectorFamily([FiniteProjector(Pd, "detector d"),
                           FiniteProjector(np.eye(4) - Pd, "detector miss")],
                          label="detector")
    rA = np.array([1.0, 0.0], dtype=complex)
    rB = np.array([0.0, 1.0], dtype=complex)
    psi0 = (np.kron(A, rA) + np.kron(B, rB)) / np.sqrt(2.0)
    H = np.zeros((4, 4), dtype=complex)
    return {"families": [slit, det], "H": H, "psi0": psi0,
            "t_slit": 1.0, "t_detector": 2.0}


def cat_trigger_model() -> dict:
    """4-dim cat (x) trigger model whose dynamics funnel two distinct
    initial states onto the same "cat alive" final record.

    Basis: |alive,0>, |alive,1>, |dead,0>, |dead,1>. The Hamiltonian is
    built from the swap of |alive,1> and |dead,0> (a Hermitian unitary
    U), H = (pi/2)(I - U), so exp(-iHt) at t = 1 equals U up to a global
    phase. U maps |dead,0> into the alive subspace, so both |alive,0>
    and (|alive,0> + |dead,0>)/sqrt(2) end fully alive.
    """
    U = np.eye(4, dtype=complex)
    U[1, 1] = U[2, 2] = 0.0
    U[1, 2] = U[2, 1] = 1.0
    H = (np.pi / 2.0) * (np.eye(4) - U)
    P_alive = np.diag([1.0, 1.0, 0.0, 0.0]).astype(complex)
    P_dead = np.diag([0.0, 0.0, 1.0, 1.0]).astype(complex)
    family = ProjectorFamily([FiniteProjector(P_alive, "cat alive"),
                              FiniteProjector(P_dead, "cat dead")],
                             label="cat record")
    e0 = np.array([1.0, 0, 0, 0], dtype=complex)
    e2 = np.array([0, 0, 1.0, 0], dtype=complex)
    candidates = {
        "cat alive": e0,
        "alive + dead superposition": (e0 + e2) / np.sqrt(2.0),
    }
    return {"H": H, "family": family, "observed_member": 0,
            "candidates": candidates, "t_obs": 1.0}
