"""Exact control-round failure probabilities of Bob's replacing attack.

Walks every discrete branch of a control round (Bob's initial pair,
Charlie's operation, Bob's (a, h) Bell outcome, the requested basis, the
announcement order and Bob's reported bit) with Born weights taken from
:func:`~qss_sim.bellalg.swap_decompose`. No sampling, and none of the
protocol state machine: this is the oracle the Monte Carlo is checked
against.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..bellalg import (
    apply_pauli_to_bell,
    classify_single,
    compare_bell,
    conditional_state,
    deduce_state,
    swap_decompose,
)
from ..protocol import DEFAULT_CHARLIE_DIST, OP_ORDER, ControlOrder, validate_distribution
from ..qcore import BellKind, LocalOpKind, MeasBasis, project_single


@dataclass(frozen=True)
class DetectionBranch:
    initial: BellKind
    charlie_op: LocalOpKind
    bell_outcome: BellKind
    basis: MeasBasis
    control_order: ControlOrder
    announced: BellKind
    probability: float  # of this branch, given the initial state and Charlie's op
    fail_probability: float  # given this branch


@dataclass
class ExactDetection:
    ancilla: BellKind
    distribution: tuple[float, ...]
    branches: list[DetectionBranch] = field(default_factory=list)

    def by_op(self) -> dict[LocalOpKind, float]:
        """Fail probability of a control round conditioned on Charlie's op
        (initial Bell state uniform)."""
        out = {}
        for op in OP_ORDER:
            rows = [b for b in self.branches if b.charlie_op is op]
            out[op] = sum(b.probability * b.fail_probability for b in rows) / 4
        return out

    def by_op_outcome(self) -> dict[tuple[LocalOpKind, BellKind], float]:
        """Fail probability conditioned on op and Bob's (a, h) outcome."""
        out = {}
        for op in OP_ORDER:
            for k in BellKind:
                rows = [b for b in self.branches if b.charlie_op is op and b.bell_outcome is k]
                w = sum(b.probability for b in rows)
                out[(op, k)] = sum(b.probability * b.fail_probability for b in rows) / w if w else 0.0
        return out

    @property
    def aggregate(self) -> float:
        """Fail probability of a control round under ``distribution``."""
        per_op = self.by_op()
        return sum(p * per_op[op] for op, p in zip(OP_ORDER, self.distribution))

    @property
    def epsilon_h(self) -> float:
        return self.by_op()[LocalOpKind.H]


def branch_fail_probability(
    bt_state, announced: BellKind, op: LocalOpKind, basis: MeasBasis
) -> float:
    """Chance Alice's check fails given the (b, t) state Bob left behind.

    Bob measures t in ``basis`` and reports it as h's outcome; Alice holds b.
    """
    deduced = deduce_state(announced, op)
    fail = 0.0
    for bit in (0, 1):
        p_bit, b_state = project_single(bt_state, "t", basis, bit)
        if b_state is None:
            continue
        expected = conditional_state(deduced, "h", basis, bit)
        alice_basis, expected_bit = classify_single(expected)
        p_match, _ = project_single(b_state, "b", alice_basis, expected_bit)
        fail += p_bit * (1 - p_match)
    return fail


def enumerate_detection(
    distribution: Sequence[float] = DEFAULT_CHARLIE_DIST,
    ancilla: BellKind = BellKind.PSI_MINUS,
) -> ExactDetection:
    dist = validate_distribution(distribution)
    result = ExactDetection(ancilla, dist)
    for initial in BellKind:
        for op in OP_ORDER:
            table = swap_decompose(ancilla, initial, op)
            for outcome, branch in table.entries.items():
                if branch.bt_state is None:
                    continue
                announced = apply_pauli_to_bell(compare_bell(outcome, ancilla), initial)
                for basis in MeasBasis:
                    fail = branch_fail_probability(branch.bt_state, announced, op, basis)
                    for order in ControlOrder:
                        result.branches.append(
                            DetectionBranch(
                                initial, op, outcome, basis, order, announced,
                                branch.probability * 0.25, fail,
                            )
                        )
    return result
