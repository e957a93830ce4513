from math import sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qss_sim.errors import DuplicateLabel, LabelMismatch, SameLabel, UnknownLabel
from qss_sim.qcore import (
    BellKind,
    LocalOpKind,
    MeasBasis,
    PauliKind,
    StateVector,
    apply_gate,
    basis_state,
    bell_probabilities,
    equal_up_to_phase,
    measure_bell,
    measure_single,
    project_bell,
    reorder,
    single,
    single_probabilities,
    tensor,
)

from .conftest import states

R = 1 / sqrt(2)


def bell(kind, q1, q2):
    return StateVector((q1, q2), kind.vector)


def by_bits(s: StateVector) -> dict[str, complex]:
    return {f"{i:0{s.n}b}": a for i, a in enumerate(s.amps) if abs(a) > 1e-12}


class TestTensor:
    def test_basis_product(self):
        s = tensor(basis_state("0", ["a"]), basis_state("1", ["b"]))
        assert s.labels == ("a", "b")
        assert by_bits(s) == {"01": 1}

    def test_psi_minus_times_phi_plus(self):
        # (|01> - |10>)(|00> + |11>)/2 expanded by hand on (a, b, h, t)
        s = tensor(bell(BellKind.PSI_MINUS, "a", "b"), bell(BellKind.PHI_PLUS, "h", "t"))
        expected = {"0100": 0.5, "0111": 0.5, "1000": -0.5, "1011": -0.5}
        assert s.labels == ("a", "b", "h", "t")
        got = by_bits(s)
        assert got.keys() == expected.keys()
        for k, v in expected.items():
            assert got[k] == pytest.approx(v, abs=1e-12)

    def test_duplicate_labels(self):
        s = basis_state("0", ["a"])
        with pytest.raises(DuplicateLabel):
            tensor(s, s)

    @given(states(max_qubits=2, labels=["a", "b"]), states(max_qubits=2, labels=["h", "t"]))
    def test_norm_preserved(self, s1, s2):
        assert tensor(s1, s2).norm_squared() == pytest.approx(1, abs=1e-9)


class TestGates:
    def test_h_on_zero(self):
        s = apply_gate(basis_state("0", ["t"]), LocalOpKind.H, "t")
        assert np.allclose(s.amps, [R, R])

    def test_real_sigma_y_on_zero(self):
        s = apply_gate(basis_state("0", ["t"]), LocalOpKind.SY, "t")
        assert np.allclose(s.amps, [0, -1])

    def test_sigma_y_is_real(self):
        assert np.array_equal(LocalOpKind.SY.matrix, np.array([[0, 1], [-1, 0]]))

    def test_identity(self):
        s = bell(BellKind.PSI_PLUS, "h", "t")
        assert np.array_equal(apply_gate(s, LocalOpKind.I, "h").amps, s.amps)

    def test_unknown_label(self):
        with pytest.raises(UnknownLabel):
            apply_gate(basis_state("0", ["t"]), LocalOpKind.H, "h")

    def test_acts_on_named_qubit_only(self):
        s = apply_gate(basis_state("00", ["h", "t"]), LocalOpKind.SX, "t")
        assert by_bits(s) == {"01": 1}

    @pytest.mark.parametrize("op", list(LocalOpKind))
    def test_unitary(self, op):
        m = op.matrix
        assert np.allclose(m @ m.conj().T, np.eye(2), atol=1e-12, rtol=0)

    def test_squares(self):
        assert np.allclose(LocalOpKind.H.matrix @ LocalOpKind.H.matrix, np.eye(2))
        assert np.allclose(PauliKind.SY.matrix @ PauliKind.SY.matrix, -np.eye(2))
        for p in (PauliKind.I, PauliKind.SX, PauliKind.SZ):
            assert np.allclose(p.matrix @ p.matrix, np.eye(2))

    @given(states(), st.sampled_from(list(LocalOpKind)), st.data())
    def test_norm_preservation(self, s, op, data):
        q = data.draw(st.sampled_from(s.labels))
        assert abs(apply_gate(s, op, q).norm_squared() - 1) < 1e-9


class TestSingleMeasurement:
    def test_z_eigenstate(self, rng):
        for _ in range(20):
            bit, rest = measure_single(basis_state("0", ["t"]), "t", MeasBasis.Z, rng)
            assert bit == 0 and rest.labels == ()

    def test_x_on_zero_is_half(self):
        assert single_probabilities(basis_state("0", ["t"]), "t", MeasBasis.X) == pytest.approx((0.5, 0.5))

    def test_x_on_zero_sampled(self, rng):
        n = 20000
        ones = sum(measure_single(basis_state("0", ["t"]), "t", MeasBasis.X, rng)[0] for _ in range(n))
        assert abs(ones / n - 0.5) < 3 * sqrt(0.25 / n)

    def test_collapse_phi_plus(self, rng):
        s = bell(BellKind.PHI_PLUS, "h", "t")
        while True:
            bit, rest = measure_single(s, "h", MeasBasis.Z, rng)
            if bit == 0:
                break
        assert rest.labels == ("t",)
        assert equal_up_to_phase(rest, basis_state("0", ["t"]))

    @given(states(), st.sampled_from(list(MeasBasis)), st.data())
    def test_completeness(self, s, basis, data):
        q = data.draw(st.sampled_from(s.labels))
        assert sum(single_probabilities(s, q, basis)) == pytest.approx(1, abs=1e-9)


class TestBellMeasurement:
    def test_eigenstate(self, rng):
        s = bell(BellKind.PSI_MINUS, "a", "b")
        for _ in range(10):
            kind, rest = measure_bell(s, "a", "b", rng)
            assert kind is BellKind.PSI_MINUS
            assert rest.labels == ()

    def test_swap_quarter_probabilities(self):
        s = tensor(bell(BellKind.PSI_MINUS, "a", "b"), bell(BellKind.PHI_PLUS, "h", "t"))
        probs = bell_probabilities(s, "a", "h")
        assert all(p == pytest.approx(0.25, abs=1e-12) for p in probs.values())

    def test_swap_phi_minus_leaves_psi_plus(self):
        s = tensor(bell(BellKind.PSI_MINUS, "a", "b"), bell(BellKind.PHI_PLUS, "h", "t"))
        _, rest = project_bell(s, "a", "h", BellKind.PHI_MINUS)
        assert rest.labels == ("b", "t")
        assert equal_up_to_phase(rest, bell(BellKind.PSI_PLUS, "b", "t"))

    def test_swap_with_h_psi_plus_branch(self):
        ht = apply_gate(bell(BellKind.PHI_PLUS, "h", "t"), LocalOpKind.H, "t")
        s = tensor(bell(BellKind.PSI_MINUS, "a", "b"), ht)
        _, rest = project_bell(s, "a", "h", BellKind.PSI_PLUS)
        target = StateVector(("b", "t"), (BellKind.PHI_PLUS.vector + BellKind.PSI_MINUS.vector) * R)
        assert equal_up_to_phase(rest, target)

    def test_same_label(self, rng):
        with pytest.raises(SameLabel):
            measure_bell(bell(BellKind.PSI_MINUS, "a", "b"), "a", "a", rng)

    def test_unknown_label(self, rng):
        with pytest.raises(UnknownLabel):
            measure_bell(bell(BellKind.PSI_MINUS, "a", "b"), "a", "h", rng)

    @given(states(min_qubits=2), st.data())
    def test_completeness(self, s, data):
        q1, q2 = data.draw(st.permutations(s.labels))[:2]
        assert sum(bell_probabilities(s, q1, q2).values()) == pytest.approx(1, abs=1e-9)

    @settings(max_examples=50)
    @given(states(min_qubits=2, max_qubits=3), st.data())
    def test_collapse_idempotence(self, s, data):
        q1, q2 = data.draw(st.permutations(s.labels))[:2]
        for kind, p in bell_probabilities(s, q1, q2).items():
            if p < 1e-6:
                continue
            _, rest = project_bell(s, q1, q2, kind)
            # re-prepare the measured pair in the observed Bell state next to the remainder
            again = tensor(bell(kind, q1, q2), rest)
            assert bell_probabilities(again, q1, q2)[kind] == pytest.approx(1, abs=1e-9)


class TestPhaseAndReorder:
    def test_global_minus(self):
        s = bell(BellKind.PHI_PLUS, "h", "t")
        assert equal_up_to_phase(s, StateVector(s.labels, -s.amps))

    def test_psi_minus_swapped(self):
        assert equal_up_to_phase(bell(BellKind.PSI_MINUS, "b", "t"), bell(BellKind.PSI_MINUS, "t", "b"))

    def test_note_state_not_swap_symmetric(self):
        amps = (BellKind.PHI_PLUS.vector + BellKind.PSI_MINUS.vector) * R
        assert not equal_up_to_phase(StateVector(("b", "t"), amps), StateVector(("t", "b"), amps))

    def test_label_mismatch(self):
        with pytest.raises(LabelMismatch):
            equal_up_to_phase(basis_state("0", ["a"]), basis_state("0", ["b"]))

    def test_reorder_basis(self):
        s = reorder(basis_state("01", ["b", "t"]), ["t", "b"])
        assert s.labels == ("t", "b") and by_bits(s) == {"10": 1}

    def test_reorder_note_identity(self):
        plus, minus = np.array([R, R]), np.array([R, -R])
        zero, one = np.array([1, 0]), np.array([0, 1])
        bt = (np.kron(zero, minus) + np.kron(one, plus)) * R
        tb = (np.kron(zero, plus) - np.kron(one, minus)) * R
        got = reorder(StateVector(("b", "t"), bt), ("t", "b"))
        assert np.allclose(got.amps, tb, atol=1e-12)

    def test_reorder_identity(self):
        s = bell(BellKind.PSI_PLUS, "h", "t")
        assert reorder(s, ("h", "t")) is s

    def test_reorder_bad_permutation(self):
        with pytest.raises(LabelMismatch):
            reorder(bell(BellKind.PSI_PLUS, "h", "t"), ("h", "a"))

    @given(states(min_qubits=2), st.data())
    def test_reorder_roundtrip(self, s, data):
        order = data.draw(st.permutations(s.labels))
        back = reorder(reorder(s, order), s.labels)
        assert np.allclose(back.amps, s.amps, atol=1e-12)

    @given(states(max_qubits=3), st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi))
    def test_equivalence_relation(self, s, th1, th2):
        s2 = StateVector(s.labels, np.exp(1j * th1) * s.amps)
        s3 = StateVector(s.labels, np.exp(1j * th2) * s2.amps)
        assert equal_up_to_phase(s, s)
        assert equal_up_to_phase(s, s2) and equal_up_to_phase(s2, s)
        assert equal_up_to_phase(s2, s3) and equal_up_to_phase(s, s3)


def test_rejects_non_finite():
    with pytest.raises(ValueError):
        StateVector(("a",), [np.nan, 1])


def test_single_helper():
    assert np.allclose(single([R, -R], "t").amps, [R, -R])
