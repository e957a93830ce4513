"""Bell-state algebra: Bell/Pauli correspondence, Bell-state comparison,
entanglement-swapping decomposition and Alice's deduction of the (h, t)
state from public announcements."""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .errors import NoDefiniteBasis, SameLabel
from .qcore import (
    STATE_TOL,
    BellKind,
    LocalOpKind,
    MeasBasis,
    PauliKind,
    StateVector,
    apply_gate,
    basis_vector,
    conditional_state,
    equal_up_to_phase,
    project_bell,
    reorder,
    tensor,
)

__all__ = [
    "BellKind",
    "PauliKind",
    "LocalOpKind",
    "SwapBranch",
    "SwapTable",
    "bell_state",
    "pauli_of_bell",
    "bell_of_pauli",
    "compare_bell",
    "apply_pauli_to_bell",
    "classify_bell",
    "swap_decompose",
    "deduce_state",
    "conjugate_pauli",
    "pauli_of_matrix",
    "conditional_state",
    "correct_basis",
    "classify_single",
]

_PAULI_OF_BELL = {
    BellKind.PHI_PLUS: PauliKind.I,
    BellKind.PSI_PLUS: PauliKind.SX,
    BellKind.PSI_MINUS: PauliKind.SY,
    BellKind.PHI_MINUS: PauliKind.SZ,
}
_BELL_OF_PAULI = {p: k for k, p in _PAULI_OF_BELL.items()}


def bell_state(kind: BellKind, q1: str, q2: str) -> StateVector:
    if q1 == q2:
        raise SameLabel(q1)
    return StateVector((q1, q2), kind.vector)


def pauli_of_bell(kind: BellKind) -> PauliKind:
    """P such that (P x I)|phi+> is proportional to |kind>."""
    return _PAULI_OF_BELL[kind]


def bell_of_pauli(p: PauliKind) -> BellKind:
    return _BELL_OF_PAULI[p]


def compare_bell(measured: BellKind, reference: BellKind) -> PauliKind:
    """Pauli that turns ``reference`` into ``measured`` when applied to the
    first qubit (phase ignored)."""
    return pauli_of_bell(measured) * pauli_of_bell(reference)


def apply_pauli_to_bell(p: PauliKind, kind: BellKind) -> BellKind:
    """Bell kind of (p x I)|kind>."""
    return bell_of_pauli(p * pauli_of_bell(kind))


def classify_bell(s: StateVector) -> BellKind | None:
    """Which Bell state a 2-qubit vector is, up to phase; ``None`` if none."""
    if s.n != 2:
        return None
    for kind in BellKind:
        if equal_up_to_phase(s, bell_state(kind, *s.labels)):
            return kind
    return None


@dataclass(frozen=True)
class SwapBranch:
    probability: float
    bt_state: StateVector | None  # None only for zero-probability branches


@dataclass(frozen=True)
class SwapTable:
    """Bell-basis decomposition on (a, h) of a four-photon state."""

    joint: StateVector
    entries: dict[BellKind, SwapBranch]

    def reassemble(self) -> StateVector:
        """sum_k sqrt(p_k) |k>_ah |branch_k>_bt, reordered to ``joint``'s labels."""
        amps = np.zeros(16, dtype=complex)
        for kind, br in self.entries.items():
            if br.bt_state is None:
                continue
            piece = tensor(bell_state(kind, "a", "h"), br.bt_state)
            amps += sqrt(br.probability) * piece.amps
        return reorder(StateVector(("a", "h", "b", "t"), amps), self.joint.labels)

    def coefficient_vector(self, kind: BellKind) -> np.ndarray:
        """Unnormalised (b, t) amplitudes multiplying |kind>_ah."""
        br = self.entries[kind]
        if br.bt_state is None:
            return np.zeros(4, dtype=complex)
        return sqrt(br.probability) * br.bt_state.amps


def swap_decompose(ab_kind: BellKind, ht_kind: BellKind, charlie_op: LocalOpKind) -> SwapTable:
    """Decompose |ab_kind>_ab (I x op)|ht_kind>_ht in the (a, h) Bell basis.

    Each branch is obtained by projection, so the (b, t) states carry their
    true relative signs.
    """
    ht = apply_gate(bell_state(ht_kind, "h", "t"), charlie_op, "t")
    joint = tensor(bell_state(ab_kind, "a", "b"), ht)
    entries = {}
    for kind in BellKind:
        prob, post = project_bell(joint, "a", "h", kind)
        entries[kind] = SwapBranch(prob, post)
    return SwapTable(joint, entries)


def deduce_state(announced: BellKind, charlie_op: LocalOpKind) -> StateVector:
    """(I x op)|announced> on (h, t): what Alice expects Bob and her to share."""
    return apply_gate(bell_state(announced, "h", "t"), charlie_op, "t")


def pauli_of_matrix(m: np.ndarray, tol: float = STATE_TOL) -> PauliKind | None:
    """The PauliKind proportional to a 2x2 matrix, or ``None``."""
    for p in PauliKind:
        ref = p.matrix
        k = int(np.argmax(np.abs(ref)))
        c = m.flat[k] / ref.flat[k]
        if abs(abs(c) - 1) < tol and np.allclose(m, c * ref, rtol=0, atol=tol):
            return p
    return None


def conjugate_pauli(op: LocalOpKind, p: PauliKind) -> PauliKind:
    """op . p . op^dagger, phase discarded (always a Pauli for Charlie's ops)."""
    u = op.matrix
    result = pauli_of_matrix(u @ p.matrix @ u.conj().T)
    assert result is not None
    return result


def classify_single(s: StateVector, tol: float = STATE_TOL) -> tuple[MeasBasis, int]:
    """Basis and outcome of a one-qubit eigenstate of Z or X."""
    if s.n != 1:
        raise NoDefiniteBasis(f"expected one qubit, got {s.labels}")
    for basis in (MeasBasis.Z, MeasBasis.X):
        for outcome in (0, 1):
            if equal_up_to_phase(s, basis_vector(basis, outcome, s.labels[0]), tol):
                return basis, outcome
    raise NoDefiniteBasis(repr(s))


def correct_basis(s: StateVector) -> MeasBasis:
    return classify_single(s)[0]
