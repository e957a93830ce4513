"""Adversary strategies interposed on the quantum channels.

Each strategy exposes the same hooks, called by :mod:`qss_sim.protocol`:

``charlie_to_alice(seq, rng)`` / ``alice_to_bob(seq, rng)``
    act in place on photons in transit (rounds and aux photons alike).
``control_response(rs, basis)``
    Bob's reply when Alice asks him to measure photon h.
``bob_message_decode(rs)``
    the Pauli Bob ends up holding for a message round.
``leaked(rs)``
    what the adversary learned on its own, or ``None``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bellalg import apply_pauli_to_bell, bell_state, compare_bell
from .protocol import InTransit, RoundState, decode_message, honest_bob_response
from .qcore import BellKind, MeasBasis, PauliKind, StateVector, basis_vector, measure_bell, measure_single, tensor


class AdversaryKind(enum.Enum):
    HONEST = "honest"
    BOB_REPLACE = "bob-replace"
    EVE_INTERCEPT_RESEND = "eve-intercept-resend"


class Channel(enum.Enum):
    CHARLIE_TO_ALICE = "charlie-to-alice"
    ALICE_TO_BOB = "alice-to-bob"


class Honest:
    """Pass-through channels, truthful Bob."""

    kind = AdversaryKind.HONEST

    def charlie_to_alice(self, seq: Sequence[InTransit], rng: np.random.Generator) -> None:
        pass

    def alice_to_bob(self, seq: Sequence[InTransit], rng: np.random.Generator) -> None:
        pass

    def multi_photon_flag(self, seq) -> bool:
        # None of the modelled adversaries emits multi-photon signals.
        return False

    def control_response(self, rs: RoundState, basis: MeasBasis) -> tuple[int, BellKind]:
        return honest_bob_response(rs, basis)

    def bob_message_decode(self, rs: RoundState) -> PauliKind:
        rec = rs.record
        return decode_message(rec.initial_bell, rec.charlie_op, rs.state, rs.rng)

    def leaked(self, rs: RoundState) -> PauliKind | None:
        return None

    def describe(self) -> dict:
        return {"kind": self.kind.value}


# -- Bob's intercept-replace attack ------------------------------------------


@dataclass
class BobAttackState:
    ancilla: BellKind
    true_initial: BellKind
    stored_label: str  # label of the intercepted photon inside the joint register
    measured_ah: BellKind | None = None
    comparison: PauliKind | None = None
    lie_initial: BellKind | None = None
    decoded: PauliKind | None = None


def bob_intercept(item: InTransit, ancilla: BellKind = BellKind.PSI_MINUS) -> BobAttackState | None:
    """Keep the photon in transit, send photon b of a fresh ancilla pair instead.

    The kept photon stays in the joint register under its old label; the
    register grows by (a, b).
    """
    stored = item.label
    item.state = tensor(bell_state(ancilla, "a", "b"), item.state)
    item.label = "b"
    if isinstance(item, RoundState):
        item.attack = BobAttackState(ancilla, item.record.initial_bell, stored)
        return item.attack
    return None


def bob_control_response(rs: RoundState, requested_basis: MeasBasis) -> tuple[int, BellKind]:
    """Entanglement swap on (a, h), Bell comparison with the ancilla, then
    report the stored photon's outcome and a doctored initial state."""
    st: BobAttackState = rs.attack
    st.measured_ah, rs.state = measure_bell(rs.state, "a", "h", rs.rng)
    st.comparison = compare_bell(st.measured_ah, st.ancilla)
    st.lie_initial = apply_pauli_to_bell(st.comparison, st.true_initial)
    bit, rs.state = measure_single(rs.state, st.stored_label, requested_basis, rs.rng)
    rs.record.adversary_notes.update(
        measured_ah=st.measured_ah, comparison=st.comparison, lie_initial=st.lie_initial
    )
    return bit, st.lie_initial


def bob_message_decode(rs: RoundState) -> PauliKind:
    """Bell-measure (a, b) after Alice returned b; no help from Charlie."""
    st: BobAttackState = rs.attack
    measured, rs.state = measure_bell(rs.state, "a", "b", rs.rng)
    st.decoded = compare_bell(measured, st.ancilla)
    return st.decoded


class BobReplace(Honest):
    """Dishonest Bob: intercepts Charlie->Alice, lies in control rounds,
    reads Alice's message from his ancilla pair."""

    kind = AdversaryKind.BOB_REPLACE

    def __init__(self, ancilla: BellKind = BellKind.PSI_MINUS):
        self.ancilla = ancilla

    def charlie_to_alice(self, seq, rng):
        # Aux photons are indistinguishable from t photons, so every photon is swapped.
        for item in seq:
            bob_intercept(item, self.ancilla)

    def control_response(self, rs, basis):
        if rs.attack is None:
            return honest_bob_response(rs, basis)
        return bob_control_response(rs, basis)

    def bob_message_decode(self, rs):
        if rs.attack is None:
            return super().bob_message_decode(rs)
        return bob_message_decode(rs)

    def leaked(self, rs):
        return rs.attack.decoded if rs.attack is not None else None

    def describe(self):
        return {"kind": self.kind.value, "ancilla": self.ancilla.value}


# -- outside intercept-resend eavesdropper -------------------------------------


def eve_intercept_resend(state: StateVector, label: str, rng: np.random.Generator) -> tuple[StateVector, MeasBasis, int]:
    """Measure ``label`` in a random basis and resend a fresh photon in the
    observed state under the same label."""
    basis = MeasBasis.Z if rng.random() < 0.5 else MeasBasis.X
    bit, rest = measure_single(state, label, basis, rng)
    return tensor(rest, basis_vector(basis, bit, label)), basis, bit


class EveInterceptResend(Honest):
    kind = AdversaryKind.EVE_INTERCEPT_RESEND

    def __init__(self, channel: Channel = Channel.CHARLIE_TO_ALICE):
        self.channel = channel

    def _attack(self, seq, rng):
        for item in seq:
            r = item.rng if isinstance(item, RoundState) else rng
            item.state, basis, bit = eve_intercept_resend(item.state, item.label, r)
            if isinstance(item, RoundState):
                item.record.adversary_notes.update(eve_basis=basis, eve_outcome=bit)

    def charlie_to_alice(self, seq, rng):
        if self.channel is Channel.CHARLIE_TO_ALICE:
            self._attack(seq, rng)

    def alice_to_bob(self, seq, rng):
        if self.channel is Channel.ALICE_TO_BOB:
            self._attack(seq, rng)

    def describe(self):
        return {"kind": self.kind.value, "channel": self.channel.value}


def make_adversary(
    kind: AdversaryKind | str,
    *,
    channel: Channel | str = Channel.CHARLIE_TO_ALICE,
    ancilla: BellKind | str = BellKind.PSI_MINUS,
) -> Honest:
    kind = AdversaryKind(kind)
    if kind is AdversaryKind.HONEST:
        return Honest()
    if kind is AdversaryKind.BOB_REPLACE:
        return BobReplace(BellKind(ancilla))
    return EveInterceptResend(Channel(channel))
