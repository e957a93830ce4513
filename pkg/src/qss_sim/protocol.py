"""The three honest parties and both protocol variants.

A *round* is one Bell pair prepared by Bob. Rounds travel in
*transmissions*: Bob's t-sequence goes to Charlie, Charlie forwards it
(with decoy photons in the further-improved variant) to Alice, Alice
handles each round in control or message mode and returns the message
photons, interleaved with checking photons, to Bob.

Adversaries are duck-typed strategy objects (see :mod:`qss_sim.adversary`)
that get to act on every quantum channel and may replace Bob's replies.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Sequence, Union

import numpy as np

from . import rng as rngmod
from .bellalg import (
    classify_single,
    compare_bell,
    conditional_state,
    conjugate_pauli,
    deduce_state,
)
from .errors import ConfigError, EmptySample, InvalidDistribution, PositionOutOfRange, ProtocolAbort
from .qcore import (
    BellKind,
    LocalOpKind,
    MeasBasis,
    PauliKind,
    StateVector,
    apply_gate,
    apply_matrix,
    aux,
    basis_vector,
    measure_bell,
    measure_single,
)

OP_ORDER: tuple[LocalOpKind, ...] = (
    LocalOpKind.I,
    LocalOpKind.SX,
    LocalOpKind.SY,
    LocalOpKind.SZ,
    LocalOpKind.H,
)
DEFAULT_CHARLIE_DIST = (1 / 8, 1 / 8, 1 / 8, 1 / 8, 1 / 2)
PAULI_ONLY_DIST = (1 / 4, 1 / 4, 1 / 4, 1 / 4, 0.0)


class Mode(enum.Enum):
    CONTROL = "control"
    MESSAGE = "message"


class ProtocolVariant(enum.Enum):
    LIN_IMPROVED = "lin-improved"
    FURTHER_IMPROVED = "further-improved"


class ControlOrder(enum.Enum):
    BOB_FIRST = "bob-first"
    CHARLIE_FIRST = "charlie-first"


class Verdict(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    NOT_CHECKED = "not-checked"


class AuxPurpose(enum.Enum):
    CHECKING = "checking"  # Alice -> Bob
    DECOY = "decoy"  # Charlie -> Alice


class AuxState(enum.Enum):
    ZERO = (MeasBasis.Z, 0)
    ONE = (MeasBasis.Z, 1)
    PLUS = (MeasBasis.X, 0)
    MINUS = (MeasBasis.X, 1)

    @property
    def basis(self) -> MeasBasis:
        return self.value[0]

    @property
    def outcome(self) -> int:
        return self.value[1]


class AbortReason(enum.Enum):
    CONTROL_MISMATCH = "control-mismatch"
    DECOY_MISMATCH = "decoy-mismatch"
    CHECKING_MISMATCH = "checking-mismatch"
    MULTI_PHOTON = "multi-photon"
    AUTHENTICATION = "authentication"


def validate_distribution(dist: Sequence[float], size: int = 5) -> tuple[float, ...]:
    dist = tuple(float(p) for p in dist)
    if len(dist) != size:
        raise InvalidDistribution(f"expected {size} probabilities, got {len(dist)}")
    if any(not math.isfinite(p) or p < 0 for p in dist):
        raise InvalidDistribution(f"probabilities must be finite and non-negative: {dist}")
    if abs(sum(dist) - 1) > 1e-12:
        raise InvalidDistribution(f"probabilities sum to {sum(dist)!r}, not 1")
    return dist


@dataclass
class ProtocolConfig:
    variant: ProtocolVariant = ProtocolVariant.LIN_IMPROVED
    rounds: int = 1000
    control_probability: float = 0.5
    charlie_op_distribution: tuple[float, ...] = DEFAULT_CHARLIE_DIST
    checking_photon_count: int = 10
    decoy_count: int = 10
    authentication_fraction: float = 0.05
    batch_size: int = 50
    seed: int = 0

    def __post_init__(self):
        problems = {}
        if not isinstance(self.variant, ProtocolVariant):
            problems["variant"] = f"not a protocol variant: {self.variant!r}"
        for name in ("rounds", "batch_size"):
            if int(getattr(self, name)) < 1:
                problems[name] = "must be >= 1"
        for name in ("checking_photon_count", "decoy_count"):
            if int(getattr(self, name)) < 0:
                problems[name] = "must be >= 0"
        if not 0 <= self.control_probability <= 1:
            problems["control_probability"] = "must lie in [0, 1]"
        if not 0 < self.authentication_fraction <= 1:
            problems["authentication_fraction"] = "must lie in (0, 1]"
        try:
            self.charlie_op_distribution = validate_distribution(self.charlie_op_distribution)
        except InvalidDistribution as exc:
            problems["charlie_op_distribution"] = str(exc)
        if problems:
            raise ConfigError(problems)


@dataclass
class RoundRecord:
    """Transcript of one round. Fields stay ``None`` when they do not apply."""

    round_id: int
    initial_bell: BellKind
    charlie_op: LocalOpKind
    mode: Mode | None = None
    control_order: ControlOrder | None = None
    bob_basis_request: MeasBasis | None = None
    bob_reported_outcome: int | None = None
    bob_announced_initial: BellKind | None = None
    alice_basis: MeasBasis | None = None
    alice_expected: int | None = None
    alice_outcome: int | None = None
    verdict: Verdict = Verdict.NOT_CHECKED
    alice_pauli: PauliKind | None = None
    decoded_pauli: PauliKind | None = None
    adversary_notes: dict[str, Any] = field(default_factory=dict)


@dataclass
class RoundState:
    """A round while it is in flight.

    ``label`` names the photon travelling in the t-sequence: ``"t"`` unless an
    adversary swapped in a photon of its own. ``state`` is the joint register
    of every photon that was ever entangled with this round.
    """

    record: RoundRecord
    state: StateVector
    rng: np.random.Generator
    label: str = "t"
    attack: Any = None


@dataclass(frozen=True)
class AuxPhotonSpec:
    position: int
    state: AuxState
    purpose: AuxPurpose


@dataclass
class AuxPhoton:
    spec: AuxPhotonSpec
    state: StateVector
    label: str


InTransit = Union[RoundState, AuxPhoton]


@dataclass
class TransmissionRecord:
    transmission_id: int
    rounds: list[RoundRecord]
    decoy_count: int = 0
    decoy_errors: int = 0
    checking_count: int = 0
    checking_errors: int = 0
    abort_reasons: list[AbortReason] = field(default_factory=list)

    @property
    def aborted(self) -> bool:
        return bool(self.abort_reasons)

    def released(self) -> list[RoundRecord]:
        """Message rounds whose bits survive the transmission's checks."""
        if self.aborted:
            return []
        return [r for r in self.rounds if r.mode is Mode.MESSAGE]


@dataclass
class SessionResult:
    transmissions: list[TransmissionRecord]
    authentication: bool | None  # None when no bits were released

    @property
    def rounds(self) -> list[RoundRecord]:
        return [r for t in self.transmissions for r in t.rounds]


# -- Charlie ---------------------------------------------------------------


def charlie_sample_op(dist: Sequence[float], rng: np.random.Generator) -> LocalOpKind:
    dist = validate_distribution(dist)
    r = rng.random()
    acc = 0.0
    for op, p in zip(OP_ORDER, dist):
        acc += p
        if r < acc:
            return op
    return next(op for op, p in zip(reversed(OP_ORDER), reversed(dist)) if p > 0)


def prepare_round(
    round_id: int,
    config: ProtocolConfig,
    rng: np.random.Generator,
    *,
    initial: BellKind | None = None,
    charlie_op: LocalOpKind | None = None,
) -> RoundState:
    """Bob's Bell pair on (h, t) followed by Charlie's local operation on t."""
    kinds = list(BellKind)
    init = kinds[int(rng.integers(4))]
    op = charlie_sample_op(config.charlie_op_distribution, rng)
    init = initial if initial is not None else init
    op = charlie_op if charlie_op is not None else op
    state = apply_gate(StateVector(("h", "t"), init.vector), op, "t")
    return RoundState(RoundRecord(round_id, init, op), state, rng)


# -- checking and decoy photons ---------------------------------------------


def insert_aux_photons(
    seq: Sequence[InTransit], count: int, purpose: AuxPurpose, rng: np.random.Generator
) -> tuple[list[InTransit], list[AuxPhotonSpec]]:
    """Interleave ``count`` fresh photons at uniformly random positions."""
    if count < 0:
        raise ValueError("count must be >= 0")
    total = len(seq) + count
    positions = sorted(int(p) for p in rng.choice(total, size=count, replace=False)) if count else []
    states = list(AuxState)
    specs = [AuxPhotonSpec(pos, states[int(rng.integers(4))], purpose) for pos in positions]
    out: list[InTransit] = []
    rest = iter(seq)
    by_pos = {s.position: s for s in specs}
    for i in range(total):
        spec = by_pos.get(i)
        if spec is None:
            out.append(next(rest))
        else:
            label = aux(i)
            out.append(AuxPhoton(spec, basis_vector(spec.state.basis, spec.state.outcome, label), label))
    return out, specs


def verify_aux_photons(
    received: Sequence[InTransit], specs: Sequence[AuxPhotonSpec], rng: np.random.Generator
) -> tuple[int, bool]:
    """Measure each announced photon in the basis of its announced state."""
    errors = 0
    for spec in specs:
        if not 0 <= spec.position < len(received):
            raise PositionOutOfRange(f"position {spec.position} outside sequence of {len(received)}")
        photon = received[spec.position]
        bit, photon.state = measure_single(photon.state, photon.label, spec.state.basis, rng)
        if bit != spec.state.outcome:
            errors += 1
    return errors, errors == 0


def strip_aux(seq: Sequence[InTransit]) -> list[RoundState]:
    return [p for p in seq if isinstance(p, RoundState)]


# -- control mode -----------------------------------------------------------


def honest_bob_response(rs: RoundState, basis: MeasBasis) -> tuple[int, BellKind]:
    """Bob measures h as asked and tells the truth about the initial state."""
    bit, rs.state = measure_single(rs.state, "h", basis, rs.rng)
    return bit, rs.record.initial_bell


def control_check(rs: RoundState, deduced: StateVector) -> Verdict:
    """Alice's comparison of her own measurement with the deduced outcome."""
    rec = rs.record
    expected = conditional_state(deduced, "h", rec.bob_basis_request, rec.bob_reported_outcome)
    basis, expected_bit = classify_single(expected)
    outcome, rs.state = measure_single(rs.state, rs.label, basis, rs.rng)
    rec.alice_basis, rec.alice_expected, rec.alice_outcome = basis, expected_bit, outcome
    return Verdict.PASS if outcome == expected_bit else Verdict.FAIL


# -- message mode -----------------------------------------------------------


def encode_message(p: PauliKind, s: StateVector, q: str) -> StateVector:
    return apply_gate(s, p, q)


def decode_message(
    initial: BellKind, charlie_op: LocalOpKind, returned_joint: StateVector, rng: np.random.Generator
) -> PauliKind:
    """Bob's decoding once Charlie has told him which operation he applied."""
    undone = apply_matrix(returned_joint, charlie_op.matrix.conj().T, "t")
    measured, _ = measure_bell(undone, "h", "t", rng)
    return conjugate_pauli(charlie_op, compare_bell(measured, initial))


def sample_positions(n: int, fraction: float, rng: np.random.Generator) -> list[int]:
    k = int(round(n * fraction))
    if k == 0:
        raise EmptySample(f"fraction {fraction} of {n} bits selects nothing")
    return sorted(int(i) for i in rng.choice(n, size=k, replace=False))


def authenticate(
    secret_bits: Sequence[int],
    revealed_fraction: float,
    decoded_bits: Sequence[int],
    rng: np.random.Generator | None = None,
    positions: Sequence[int] | None = None,
) -> bool:
    """Alice reveals a random sample of her bits; pass iff Bob's agree there."""
    if not 0 < revealed_fraction <= 1:
        raise ValueError("revealed_fraction must lie in (0, 1]")
    if len(secret_bits) != len(decoded_bits):
        raise ValueError("bit streams differ in length")
    if positions is None:
        positions = sample_positions(len(secret_bits), revealed_fraction, rng or np.random.default_rng(0))
    return all(secret_bits[i] == decoded_bits[i] for i in positions)


# -- round and transmission drivers -----------------------------------------


def alice_round(
    rs: RoundState,
    config: ProtocolConfig,
    adversary,
    *,
    mode: Mode | None = None,
    alice_pauli: PauliKind | None = None,
    basis: MeasBasis | None = None,
    order: ControlOrder | None = None,
) -> None:
    """Alice's side of one round: pick a mode and act on it."""
    rec = rs.record
    drawn = Mode.CONTROL if rs.rng.random() < config.control_probability else Mode.MESSAGE
    rec.mode = mode or drawn
    if rec.mode is Mode.CONTROL:
        drawn_order = ControlOrder.BOB_FIRST if rs.rng.random() < 0.5 else ControlOrder.CHARLIE_FIRST
        drawn_basis = MeasBasis.Z if rs.rng.random() < 0.5 else MeasBasis.X
        rec.control_order = order or drawn_order
        rec.bob_basis_request = basis or drawn_basis
        # Announcement order is recorded; neither party's reply depends on it.
        bit, announced = adversary.control_response(rs, rec.bob_basis_request)
        rec.bob_reported_outcome, rec.bob_announced_initial = bit, announced
        rec.verdict = control_check(rs, deduce_state(announced, rec.charlie_op))
    else:
        drawn_pauli = list(PauliKind)[int(rs.rng.integers(4))]
        rec.alice_pauli = alice_pauli or drawn_pauli
        rs.state = encode_message(rec.alice_pauli, rs.state, rs.label)


def bob_receive(rs: RoundState, adversary) -> None:
    rs.record.decoded_pauli = adversary.bob_message_decode(rs)
    leaked = adversary.leaked(rs)
    if leaked is not None:
        rs.record.adversary_notes["leaked_pauli"] = leaked


def run_round(
    config: ProtocolConfig,
    adversary,
    rng: np.random.Generator,
    *,
    round_id: int = 0,
    initial: BellKind | None = None,
    charlie_op: LocalOpKind | None = None,
    mode: Mode | None = None,
    alice_pauli: PauliKind | None = None,
    basis: MeasBasis | None = None,
    order: ControlOrder | None = None,
    raise_on_fail: bool = False,
) -> RoundRecord:
    """One round on its own, without aux photons. Keyword overrides fix
    choices that would otherwise be drawn from ``rng``."""
    rs = prepare_round(round_id, config, rng, initial=initial, charlie_op=charlie_op)
    if adversary.multi_photon_flag([rs]):
        raise ProtocolAbort(AbortReason.MULTI_PHOTON, f"round {round_id}")
    adversary.charlie_to_alice([rs], rng)
    alice_round(rs, config, adversary, mode=mode, alice_pauli=alice_pauli, basis=basis, order=order)
    if rs.record.mode is Mode.MESSAGE:
        adversary.alice_to_bob([rs], rng)
        bob_receive(rs, adversary)
    elif raise_on_fail and rs.record.verdict is Verdict.FAIL:
        raise ProtocolAbort(AbortReason.CONTROL_MISMATCH, f"round {round_id}")
    return rs.record


def run_transmission(
    config: ProtocolConfig,
    adversary,
    round_ids: Sequence[int],
    *,
    transmission_id: int = 0,
    trial: int = 0,
) -> TransmissionRecord:
    """One batch of rounds through the whole protocol.

    Every round is carried to completion even when a check fails, so that
    per-round statistics stay unbiased; the failure is recorded in
    ``abort_reasons`` and the batch releases no message bits.
    """
    seed = config.seed
    trng = rngmod.substream(seed, trial, rngmod.TRANSMISSION, transmission_id)
    rounds = [prepare_round(rid, config, rngmod.substream(seed, trial, rngmod.ROUND, rid)) for rid in round_ids]
    out = TransmissionRecord(transmission_id, [rs.record for rs in rounds])

    if adversary.multi_photon_flag(rounds):
        out.abort_reasons.append(AbortReason.MULTI_PHOTON)

    seq: list[InTransit] = list(rounds)
    decoys: list[AuxPhotonSpec] = []
    if config.variant is ProtocolVariant.FURTHER_IMPROVED:
        seq, decoys = insert_aux_photons(seq, config.decoy_count, AuxPurpose.DECOY, trng)
    adversary.charlie_to_alice(seq, trng)
    if decoys:
        out.decoy_count = len(decoys)
        out.decoy_errors, ok = verify_aux_photons(seq, decoys, trng)
        if not ok:
            out.abort_reasons.append(AbortReason.DECOY_MISMATCH)
    rounds = strip_aux(seq)

    for rs in rounds:
        alice_round(rs, config, adversary)
    if any(rs.record.verdict is Verdict.FAIL for rs in rounds):
        out.abort_reasons.append(AbortReason.CONTROL_MISMATCH)

    message = [rs for rs in rounds if rs.record.mode is Mode.MESSAGE]
    if message:
        back, checks = insert_aux_photons(message, config.checking_photon_count, AuxPurpose.CHECKING, trng)
        adversary.alice_to_bob(back, trng)
        out.checking_count = len(checks)
        out.checking_errors, ok = verify_aux_photons(back, checks, trng)
        if not ok:
            out.abort_reasons.append(AbortReason.CHECKING_MISMATCH)
        for rs in strip_aux(back):
            bob_receive(rs, adversary)
    return out


def run_session(config: ProtocolConfig, adversary, *, trial: int = 0, raise_on_abort: bool = False) -> SessionResult:
    """All ``config.rounds`` rounds in batches of ``config.batch_size``,
    followed by authentication over the released bits."""
    transmissions = []
    for tid, start in enumerate(range(0, config.rounds, config.batch_size)):
        ids = range(start, min(start + config.batch_size, config.rounds))
        tr = run_transmission(config, adversary, ids, transmission_id=tid, trial=trial)
        if raise_on_abort and tr.aborted:
            raise ProtocolAbort(tr.abort_reasons[0], f"transmission {tid}")
        transmissions.append(tr)

    secret, decoded = [], []
    for tr in transmissions:
        for rec in tr.released():
            secret.extend(rec.alice_pauli.to_bits())
            decoded.extend(rec.decoded_pauli.to_bits())
    auth = None
    if secret:
        arng = rngmod.substream(config.seed, trial, rngmod.SESSION)
        try:
            auth = authenticate(secret, config.authentication_fraction, decoded, arng)
        except EmptySample:
            auth = None
        if raise_on_abort and auth is False:
            raise ProtocolAbort(AbortReason.AUTHENTICATION, "revealed sample disagrees")
    return SessionResult(transmissions, auth)
