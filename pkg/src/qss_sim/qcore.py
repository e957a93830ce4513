"""Small exact state-vector engine over labelled qubits.

Conventions used throughout the package:

* The first label of a register is the most significant bit of the
  amplitude index, so ``amps[0b01]`` on labels ``("a", "b")`` is the
  coefficient of ``|0>_a |1>_b``.
* ``SigmaY`` is the real matrix ``|0><1| - |1><0|``. It equals the textbook
  Pauli-Y times ``-i``.
* Measurement outcome 0 means ``|0>`` (Z basis) or ``|+>`` (X basis);
  outcome 1 means ``|1>`` or ``|->``.
* Measured qubits are removed from the register.

All randomness comes from an injected :class:`numpy.random.Generator`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import sqrt
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateLabel,
    LabelMismatch,
    SameLabel,
    UnknownLabel,
    ZeroProbabilityBranch,
)

STATE_TOL = 1e-9
UNITARY_TOL = 1e-12

_R = 1 / sqrt(2)


def aux(i: int) -> str:
    """Label of the i-th auxiliary (decoy or checking) photon."""
    return f"aux{i}"


class LocalOpKind(enum.Enum):
    """Charlie's five local operations."""

    I = "I"
    SX = "sigma_x"
    SY = "sigma_y"
    SZ = "sigma_z"
    H = "H"

    @property
    def matrix(self) -> np.ndarray:
        return _GATES[self]

    @property
    def is_pauli(self) -> bool:
        return self is not LocalOpKind.H


class PauliKind(enum.Enum):
    """The four encoding operations, labelled by (x, z) bits.

    Up to sign each matrix is ``Z^z X^x``; with the real SigmaY this makes
    the product of two kinds an XOR of their bits.
    """

    I = (0, 0)
    SX = (1, 0)
    SY = (1, 1)
    SZ = (0, 1)

    @property
    def x(self) -> int:
        return self.value[0]

    @property
    def z(self) -> int:
        return self.value[1]

    @property
    def matrix(self) -> np.ndarray:
        return _GATES[self.as_local_op()]

    def as_local_op(self) -> LocalOpKind:
        return LocalOpKind[self.name]

    def __mul__(self, other: "PauliKind") -> "PauliKind":
        """Product with the phase discarded."""
        if not isinstance(other, PauliKind):
            return NotImplemented
        return PauliKind((self.x ^ other.x, self.z ^ other.z))

    @classmethod
    def from_bits(cls, bits: tuple[int, int]) -> "PauliKind":
        """Two secret bits to a Pauli with the codebook I=00, X=01, Y=10, Z=11."""
        return _CODEBOOK[tuple(bits)]

    def to_bits(self) -> tuple[int, int]:
        return _CODEBOOK_INV[self]


_GATES: dict[LocalOpKind, np.ndarray] = {
    LocalOpKind.I: np.array([[1, 0], [0, 1]], dtype=complex),
    LocalOpKind.SX: np.array([[0, 1], [1, 0]], dtype=complex),
    LocalOpKind.SY: np.array([[0, 1], [-1, 0]], dtype=complex),
    LocalOpKind.SZ: np.array([[1, 0], [0, -1]], dtype=complex),
    LocalOpKind.H: np.array([[1, 1], [1, -1]], dtype=complex) * _R,
}
for _m in _GATES.values():
    _m.setflags(write=False)

_CODEBOOK = {
    (0, 0): PauliKind.I,
    (0, 1): PauliKind.SX,
    (1, 0): PauliKind.SY,
    (1, 1): PauliKind.SZ,
}
_CODEBOOK_INV = {v: k for k, v in _CODEBOOK.items()}


class BellKind(enum.Enum):
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"

    @property
    def vector(self) -> np.ndarray:
        return _BELL[self]


_BELL: dict[BellKind, np.ndarray] = {
    BellKind.PHI_PLUS: np.array([1, 0, 0, 1], dtype=complex) * _R,
    BellKind.PHI_MINUS: np.array([1, 0, 0, -1], dtype=complex) * _R,
    BellKind.PSI_PLUS: np.array([0, 1, 1, 0], dtype=complex) * _R,
    BellKind.PSI_MINUS: np.array([0, 1, -1, 0], dtype=complex) * _R,
}
for _v in _BELL.values():
    _v.setflags(write=False)


class MeasBasis(enum.Enum):
    Z = "Z"
    X = "X"

    @property
    def vectors(self) -> tuple[np.ndarray, np.ndarray]:
        return _BASIS[self]


_BASIS = {
    MeasBasis.Z: (np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)),
    MeasBasis.X: (np.array([1, 1], dtype=complex) * _R, np.array([1, -1], dtype=complex) * _R),
}


@dataclass(frozen=True, eq=False)
class StateVector:
    """Immutable pure state of a register of labelled qubits."""

    labels: tuple[str, ...]
    amps: np.ndarray

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(set(labels)) != len(labels):
            raise DuplicateLabel(f"labels not unique: {labels}")
        amps = np.array(self.amps, dtype=complex).reshape(-1)
        if amps.shape[0] != 1 << len(labels):
            raise ValueError(f"{len(labels)} labels need {1 << len(labels)} amplitudes, got {amps.shape[0]}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        amps.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "amps", amps)

    @property
    def n(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownLabel(label) from None

    def norm_squared(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def tensor_view(self) -> np.ndarray:
        return self.amps.reshape((2,) * self.n)

    def relabel(self, mapping: dict[str, str]) -> "StateVector":
        """Rename qubits without touching amplitudes."""
        return StateVector(tuple(mapping.get(l, l) for l in self.labels), self.amps)

    def __repr__(self) -> str:
        terms = []
        for i, a in enumerate(self.amps):
            if abs(a) > STATE_TOL:
                terms.append(f"({a.real:+.4f}{a.imag:+.4f}j)|{i:0{self.n}b}>")
        return f"StateVector({','.join(self.labels)}: {' '.join(terms) or '0'})"


def basis_state(bits: str | Sequence[int], labels: Sequence[str]) -> StateVector:
    """Computational basis state, e.g. ``basis_state("01", ["a", "b"])``."""
    bits = [int(b) for b in bits]
    if len(bits) != len(labels):
        raise ValueError("one bit per label required")
    amps = np.zeros(1 << len(bits), dtype=complex)
    amps[int("".join(map(str, bits)) or "0", 2)] = 1
    return StateVector(tuple(labels), amps)


def single(vector: Iterable[complex], label: str) -> StateVector:
    return StateVector((label,), np.asarray(list(vector), dtype=complex))


def basis_vector(basis: MeasBasis, outcome: int, label: str) -> StateVector:
    """``|0>``, ``|1>``, ``|+>`` or ``|->`` on one qubit."""
    return StateVector((label,), basis.vectors[outcome])


def tensor(s1: StateVector, s2: StateVector) -> StateVector:
    common = set(s1.labels) & set(s2.labels)
    if common:
        raise DuplicateLabel(f"labels in both registers: {sorted(common)}")
    return StateVector(s1.labels + s2.labels, np.kron(s1.amps, s2.amps))


def apply_matrix(s: StateVector, matrix: np.ndarray, q: str) -> StateVector:
    i = s.index(q)
    psi = np.tensordot(matrix, s.tensor_view(), axes=([1], [i]))
    psi = np.moveaxis(psi, 0, i)
    return StateVector(s.labels, psi.reshape(-1))


def apply_gate(s: StateVector, gate: LocalOpKind | PauliKind, q: str) -> StateVector:
    return apply_matrix(s, gate.matrix, q)


def apply_two_qubit(s: StateVector, matrix: np.ndarray, q1: str, q2: str) -> StateVector:
    """Apply a 4x4 matrix (q1 most significant) to qubits q1, q2."""
    i, j = s.index(q1), s.index(q2)
    if i == j:
        raise SameLabel(q1)
    m = matrix.reshape(2, 2, 2, 2)
    psi = np.tensordot(m, s.tensor_view(), axes=([2, 3], [i, j]))
    psi = np.moveaxis(psi, [0, 1], [i, j])
    return StateVector(s.labels, psi.reshape(-1))


def project_single(s: StateVector, q: str, basis: MeasBasis, outcome: int) -> tuple[float, StateVector | None]:
    """Born probability of ``outcome`` and the renormalised post-measurement
    state on the remaining qubits (``None`` when the probability is zero)."""
    i = s.index(q)
    vec = basis.vectors[outcome]
    psi = np.tensordot(vec.conj(), s.tensor_view(), axes=([0], [i]))
    rest = s.labels[:i] + s.labels[i + 1:]
    return _finish_projection(psi, rest)


def project_bell(s: StateVector, q1: str, q2: str, kind: BellKind) -> tuple[float, StateVector | None]:
    i, j = s.index(q1), s.index(q2)
    if i == j:
        raise SameLabel(q1)
    bra = kind.vector.conj().reshape(2, 2)
    psi = np.tensordot(bra, s.tensor_view(), axes=([0, 1], [i, j]))
    rest = tuple(l for l in s.labels if l not in (q1, q2))
    return _finish_projection(psi, rest)


def _finish_projection(psi: np.ndarray, rest: tuple[str, ...]):
    flat = np.asarray(psi, dtype=complex).reshape(-1)
    prob = float(np.vdot(flat, flat).real)
    if prob <= 1e-15:
        return 0.0, None
    return prob, StateVector(rest, flat / sqrt(prob))


def single_probabilities(s: StateVector, q: str, basis: MeasBasis) -> tuple[float, float]:
    return tuple(project_single(s, q, basis, k)[0] for k in (0, 1))  # type: ignore[return-value]


def bell_probabilities(s: StateVector, q1: str, q2: str) -> dict[BellKind, float]:
    return {k: project_bell(s, q1, q2, k)[0] for k in BellKind}


def measure_single(s: StateVector, q: str, basis: MeasBasis, rng: np.random.Generator) -> tuple[int, StateVector]:
    p0, post0 = project_single(s, q, basis, 0)
    p1, post1 = project_single(s, q, basis, 1)
    if rng.random() * (p0 + p1) < p0:
        return 0, post0
    return 1, post1


def measure_bell(s: StateVector, q1: str, q2: str, rng: np.random.Generator) -> tuple[BellKind, StateVector]:
    branches = [(k, *project_bell(s, q1, q2, k)) for k in BellKind]
    total = sum(p for _, p, _ in branches)
    r = rng.random() * total
    acc = 0.0
    for kind, p, post in branches:
        acc += p
        if r < acc and post is not None:
            return kind, post
    kind, p, post = max(branches, key=lambda b: b[1])
    return kind, post


def reorder(s: StateVector, new_order: Sequence[str]) -> StateVector:
    new_order = tuple(new_order)
    if sorted(new_order) != sorted(s.labels) or len(set(new_order)) != len(new_order):
        raise LabelMismatch(f"{new_order} is not a permutation of {s.labels}")
    if new_order == s.labels:
        return s
    axes = [s.labels.index(l) for l in new_order]
    return StateVector(new_order, np.transpose(s.tensor_view(), axes).reshape(-1))


def global_phase(s1: StateVector, s2: StateVector, tol: float = STATE_TOL) -> complex | None:
    """The unit factor ``c`` with ``s1 == c * s2``, or ``None`` if there is none."""
    if set(s1.labels) != set(s2.labels) or len(s1.labels) != len(s2.labels):
        raise LabelMismatch(f"{s1.labels} vs {s2.labels}")
    a = s1.amps
    b = reorder(s2, s1.labels).amps
    k = int(np.argmax(np.abs(a)))
    if abs(b[k]) < tol:
        return None
    phase = a[k] / b[k]
    if abs(abs(phase) - 1) > tol:
        return None
    if not np.allclose(a, phase * b, rtol=0, atol=tol):
        return None
    return complex(phase)


def equal_up_to_phase(s1: StateVector, s2: StateVector, tol: float = STATE_TOL) -> bool:
    return global_phase(s1, s2, tol) is not None


def conditional_state(
    joint: StateVector, measured_label: str, basis: MeasBasis, outcome: int
) -> StateVector:
    """State of the remaining qubits after ``measured_label`` gave ``outcome``."""
    prob, post = project_single(joint, measured_label, basis, outcome)
    if post is None:
        raise ZeroProbabilityBranch(f"{measured_label}={outcome} in basis {basis.value} has probability 0")
    return post
