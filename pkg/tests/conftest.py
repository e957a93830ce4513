import numpy as np
import pytest
from hypothesis import strategies as st

from qss_sim.qcore import StateVector

LABEL_POOL = ["a", "b", "h", "t", "aux0"]


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@st.composite
def states(draw, min_qubits=1, max_qubits=4, labels=None):
    """Random normalised state on distinct labels."""
    if labels is None:
        n = draw(st.integers(min_qubits, max_qubits))
        labels = draw(st.permutations(LABEL_POOL))[:n]
    n = len(labels)
    floats = st.floats(-1, 1, allow_nan=False, allow_infinity=False)
    re = draw(st.lists(floats, min_size=2**n, max_size=2**n))
    im = draw(st.lists(floats, min_size=2**n, max_size=2**n))
    amps = np.array(re) + 1j * np.array(im)
    norm = np.linalg.norm(amps)
    if norm < 1e-3:
        amps = np.zeros(2**n, complex)
        amps[0] = 1
        norm = 1.0
    return StateVector(tuple(labels), amps / norm)
