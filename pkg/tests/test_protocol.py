import itertools
from collections import Counter
from math import sqrt

import numpy as np
import pytest

from qss_sim.adversary import BobReplace, Honest
from qss_sim.bellalg import bell_state, classify_bell, classify_single, conditional_state, deduce_state
from qss_sim.errors import ConfigError, EmptySample, InvalidDistribution, PositionOutOfRange, ProtocolAbort
from qss_sim.protocol import (
    DEFAULT_CHARLIE_DIST,
    OP_ORDER,
    AbortReason,
    AuxPhoton,
    AuxPurpose,
    AuxState,
    ControlOrder,
    Mode,
    ProtocolConfig,
    ProtocolVariant,
    RoundRecord,
    RoundState,
    Verdict,
    authenticate,
    charlie_sample_op,
    control_check,
    decode_message,
    encode_message,
    insert_aux_photons,
    run_round,
    run_session,
    run_transmission,
    sample_positions,
    verify_aux_photons,
)
from qss_sim.qcore import (
    BellKind,
    LocalOpKind,
    MeasBasis,
    PauliKind,
    StateVector,
    apply_gate,
    basis_vector,
    equal_up_to_phase,
    measure_single,
    project_single,
    tensor,
)

B = BellKind


def three_sigma(p, n):
    return 3 * sqrt(p * (1 - p) / n)


class TestConfig:
    def test_defaults(self):
        cfg = ProtocolConfig()
        assert cfg.charlie_op_distribution == pytest.approx((1 / 8,) * 4 + (1 / 2,))
        assert cfg.control_probability == 0.5
        assert cfg.decoy_count == 10 and cfg.checking_photon_count == 10 and cfg.batch_size == 50

    def test_bad_distribution(self):
        with pytest.raises(ConfigError) as exc:
            ProtocolConfig(charlie_op_distribution=(0.5, 0.5, 0, 0, 0.1))
        assert "charlie_op_distribution" in exc.value.problems

    def test_several_problems_reported(self):
        with pytest.raises(ConfigError) as exc:
            ProtocolConfig(rounds=0, control_probability=2.0)
        assert {"rounds", "control_probability"} <= exc.value.problems.keys()


class TestCharlieSample:
    def test_degenerate(self, rng):
        assert all(charlie_sample_op((0, 0, 0, 0, 1), rng) is LocalOpKind.H for _ in range(200))

    def test_default_frequencies(self, rng):
        n = 80_000
        counts = Counter(charlie_sample_op(DEFAULT_CHARLIE_DIST, rng) for _ in range(n))
        assert abs(counts[LocalOpKind.H] / n - 0.5) <= 0.01
        for op in OP_ORDER[:4]:
            assert abs(counts[op] / n - 0.125) <= three_sigma(0.125, n)

    def test_invalid(self, rng):
        with pytest.raises(InvalidDistribution):
            charlie_sample_op((0.5, 0.5, 0, 0, 0.1), rng)


def honest_round(initial, op):
    state = apply_gate(bell_state(initial, "h", "t"), op, "t")
    return RoundState(RoundRecord(0, initial, op), state, np.random.default_rng(0))


class TestControlCheck:
    @pytest.mark.parametrize(
        "initial,op,basis,order",
        list(itertools.product(BellKind, LocalOpKind, MeasBasis, ControlOrder)),
    )
    def test_honest_completeness_exhaustive(self, initial, op, basis, order):
        # every Bob outcome branch, exact Born weights, no sampling
        rs = honest_round(initial, op)
        deduced = deduce_state(initial, op)
        total = 0.0
        for bit in (0, 1):
            p_bit, post = project_single(rs.state, "h", basis, bit)
            if post is None:
                continue
            expected = conditional_state(deduced, "h", basis, bit)
            alice_basis, expected_bit = classify_single(expected)
            p_match, _ = project_single(post, "t", alice_basis, expected_bit)
            assert p_match == pytest.approx(1, abs=1e-9)
            total += p_bit
        assert total == pytest.approx(1, abs=1e-9)

    def test_phi_plus_identity_z(self):
        rs = honest_round(B.PHI_PLUS, LocalOpKind.I)
        rs.record.bob_basis_request = MeasBasis.Z
        rs.record.bob_reported_outcome = 0
        _, rs.state = project_single(rs.state, "h", MeasBasis.Z, 0)
        assert control_check(rs, deduce_state(B.PHI_PLUS, LocalOpKind.I)) is Verdict.PASS
        assert rs.record.alice_basis is MeasBasis.Z and rs.record.alice_expected == 0

    def test_phi_minus_h_z(self):
        rs = honest_round(B.PHI_MINUS, LocalOpKind.H)
        rs.record.bob_basis_request = MeasBasis.Z
        rs.record.bob_reported_outcome = 0
        _, rs.state = project_single(rs.state, "h", MeasBasis.Z, 0)
        assert control_check(rs, deduce_state(B.PHI_MINUS, LocalOpKind.H)) is Verdict.PASS
        # deduced t state is |+>, so Alice measures in X
        assert rs.record.alice_basis is MeasBasis.X and rs.record.alice_expected == 0


class TestEncodeDecode:
    def test_sigma_z_on_t(self):
        s = encode_message(PauliKind.SZ, bell_state(B.PHI_PLUS, "h", "t"), "t")
        assert classify_bell(s) is B.PHI_MINUS

    def test_identity(self):
        s = bell_state(B.PSI_PLUS, "h", "t")
        assert np.array_equal(encode_message(PauliKind.I, s, "t").amps, s.amps)

    def test_sigma_y_on_t(self):
        s = encode_message(PauliKind.SY, bell_state(B.PHI_PLUS, "h", "t"), "t")
        # (I x sigma_y)(|00>+|11>)/sqrt2 = (-|01> + |10>)/sqrt2
        assert np.allclose(s.amps, np.array([0, -1, 1, 0]) / sqrt(2))
        assert classify_bell(s) is B.PSI_MINUS

    def test_codebook(self):
        assert PauliKind.from_bits((0, 0)) is PauliKind.I
        assert PauliKind.from_bits((0, 1)) is PauliKind.SX
        assert PauliKind.from_bits((1, 0)) is PauliKind.SY
        assert PauliKind.from_bits((1, 1)) is PauliKind.SZ
        for p in PauliKind:
            assert PauliKind.from_bits(p.to_bits()) is p

    @pytest.mark.parametrize(
        "initial,op,p", list(itertools.product(BellKind, LocalOpKind, PauliKind))
    )
    def test_honest_decoding_exhaustive(self, initial, op, p):
        state = encode_message(p, apply_gate(bell_state(initial, "h", "t"), op, "t"), "t")
        for seed in range(3):
            assert decode_message(initial, op, state, np.random.default_rng(seed)) is p

    def test_h_sigma_z_case(self, rng):
        state = encode_message(PauliKind.SZ, apply_gate(bell_state(B.PHI_PLUS, "h", "t"), LocalOpKind.H, "t"), "t")
        assert decode_message(B.PHI_PLUS, LocalOpKind.H, state, rng) is PauliKind.SZ


class TestAuxPhotons:
    def test_zero_count(self, rng):
        seq = ["r0", "r1"]
        out, specs = insert_aux_photons(seq, 0, AuxPurpose.DECOY, rng)
        assert out == seq and specs == []

    def test_structure(self, rng):
        seq = [f"r{i}" for i in range(5)]
        out, specs = insert_aux_photons(seq, 3, AuxPurpose.CHECKING, rng)
        assert len(out) == 8
        assert len({s.position for s in specs}) == 3
        assert [x for x in out if isinstance(x, str)] == seq
        for s in specs:
            assert isinstance(out[s.position], AuxPhoton)
            assert out[s.position].spec is s

    def test_uniform_states(self, rng):
        n = 40_000
        counts = Counter()
        for _ in range(n // 4):
            _, specs = insert_aux_photons([], 4, AuxPurpose.DECOY, rng)
            counts.update(s.state for s in specs)
        for st in AuxState:
            assert abs(counts[st] / n - 0.25) <= 0.01

    def test_untouched_no_errors(self, rng):
        for _ in range(50):
            out, specs = insert_aux_photons(["x"] * 3, 6, AuxPurpose.CHECKING, rng)
            assert verify_aux_photons(out, specs, rng) == (0, True)

    def test_maximally_mixed_substitute(self, rng):
        n = 10_000
        errors = 0
        for _ in range(n):
            out, specs = insert_aux_photons([], 1, AuxPurpose.DECOY, rng)
            ph = out[0]
            ph.state, ph.label = bell_state(B.PSI_MINUS, "a", "b"), "b"
            errors += verify_aux_photons(out, specs, rng)[0]
        assert abs(errors / n - 0.5) <= three_sigma(0.5, n)

    def test_intercept_resend(self, rng):
        n = 10_000
        errors = 0
        for _ in range(n):
            out, specs = insert_aux_photons([], 1, AuxPurpose.DECOY, rng)
            ph = out[0]
            basis = MeasBasis.Z if rng.random() < 0.5 else MeasBasis.X
            bit, _ = measure_single(ph.state, ph.label, basis, rng)
            ph.state = basis_vector(basis, bit, ph.label)
            errors += verify_aux_photons(out, specs, rng)[0]
        assert abs(errors / n - 0.25) <= three_sigma(0.25, n)

    def test_position_out_of_range(self, rng):
        out, specs = insert_aux_photons([], 2, AuxPurpose.DECOY, rng)
        with pytest.raises(PositionOutOfRange):
            verify_aux_photons(out[:1], specs, rng)


class TestAuthenticate:
    def test_identical(self, rng):
        bits = list(rng.integers(0, 2, 200))
        assert authenticate(bits, 0.1, list(bits), rng)

    def test_flip_in_revealed_region(self, rng):
        bits = [int(b) for b in rng.integers(0, 2, 200)]
        pos = sample_positions(200, 0.1, rng)
        bad = list(bits)
        bad[pos[3]] ^= 1
        assert not authenticate(bits, 0.1, bad, positions=pos)

    def test_empty_sample(self, rng):
        with pytest.raises(EmptySample):
            authenticate([0, 1, 1], 0.05, [0, 1, 1], rng)

    def test_honest_end_to_end(self):
        cfg = ProtocolConfig(rounds=4000, control_probability=0.5, authentication_fraction=0.05, seed=3)
        res = run_session(cfg, Honest())
        released = sum(len(t.released()) for t in res.transmissions)
        assert released >= 1900
        assert res.authentication is True


class TestRunRound:
    def test_honest_control_passes(self):
        cfg = ProtocolConfig()
        for seed in range(200):
            rec = run_round(cfg, Honest(), np.random.default_rng(seed), mode=Mode.CONTROL)
            assert rec.verdict is Verdict.PASS

    def test_honest_message(self, rng):
        rec = run_round(
            ProtocolConfig(), Honest(), rng,
            mode=Mode.MESSAGE, initial=B.PHI_PLUS, charlie_op=LocalOpKind.I, alice_pauli=PauliKind.SX,
        )
        assert rec.decoded_pauli is PauliKind.SX and rec.verdict is Verdict.NOT_CHECKED

    def test_bob_replace_identity_passes(self):
        for seed in range(200):
            rec = run_round(
                ProtocolConfig(), BobReplace(), np.random.default_rng(seed),
                mode=Mode.CONTROL, charlie_op=LocalOpKind.I,
            )
            assert rec.verdict is Verdict.PASS

    def test_bob_replace_h_fails_sometimes(self):
        verdicts = Counter(
            run_round(ProtocolConfig(), BobReplace(), np.random.default_rng(seed),
                      mode=Mode.CONTROL, charlie_op=LocalOpKind.H).verdict
            for seed in range(400)
        )
        assert verdicts[Verdict.FAIL] > 0 and verdicts[Verdict.PASS] > 0

    def test_raise_on_fail(self):
        with pytest.raises(ProtocolAbort) as exc:
            for seed in range(400):
                run_round(ProtocolConfig(), BobReplace(), np.random.default_rng(seed),
                          mode=Mode.CONTROL, charlie_op=LocalOpKind.H, raise_on_fail=True)
        assert exc.value.reason is AbortReason.CONTROL_MISMATCH

    def test_record_fields(self, rng):
        rec = run_round(ProtocolConfig(), Honest(), rng, mode=Mode.CONTROL)
        assert rec.control_order in ControlOrder and rec.bob_basis_request in MeasBasis
        assert rec.bob_announced_initial is rec.initial_bell
        assert rec.alice_pauli is None


class TestSession:
    def test_mode_frequencies(self):
        cfg = ProtocolConfig(rounds=4000, control_probability=0.3, seed=11)
        recs = run_session(cfg, Honest()).rounds
        frac = sum(r.mode is Mode.CONTROL for r in recs) / len(recs)
        assert abs(frac - 0.3) <= three_sigma(0.3, len(recs))

    def test_batches(self):
        cfg = ProtocolConfig(rounds=105, batch_size=50)
        res = run_session(cfg, Honest())
        assert [len(t.rounds) for t in res.transmissions] == [50, 50, 5]
        assert [r.round_id for r in res.rounds] == list(range(105))

    def test_honest_further_improved_clean(self):
        cfg = ProtocolConfig(rounds=500, variant=ProtocolVariant.FURTHER_IMPROVED, batch_size=25)
        res = run_session(cfg, Honest(), raise_on_abort=True)
        assert all(t.decoy_count == 10 and t.decoy_errors == 0 for t in res.transmissions)
        assert res.authentication is True

    def test_abort_propagation(self):
        cfg = ProtocolConfig(rounds=200, charlie_op_distribution=(0, 0, 0, 0, 1), seed=5)
        res = run_session(cfg, BobReplace())
        failing = [t for t in res.transmissions if any(r.verdict is Verdict.FAIL for r in t.rounds)]
        assert failing
        for t in failing:
            assert AbortReason.CONTROL_MISMATCH in t.abort_reasons
            assert t.released() == []
        with pytest.raises(ProtocolAbort):
            run_session(cfg, BobReplace(), raise_on_abort=True)

    def test_round_results_independent_of_batching(self):
        a = run_session(ProtocolConfig(rounds=60, batch_size=60, seed=9), Honest()).rounds
        b = run_session(ProtocolConfig(rounds=60, batch_size=7, seed=9), Honest()).rounds
        assert [(r.mode, r.verdict, r.alice_pauli, r.decoded_pauli) for r in a] == \
               [(r.mode, r.verdict, r.alice_pauli, r.decoded_pauli) for r in b]
