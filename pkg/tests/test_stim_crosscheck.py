import numpy as np
import pytest

from ion_cnot_sim.pauli import PauliString, nontrivial_paulis
from ion_cnot_sim.tableau import StabilizerState, ms2, rx, ry, rz

stim = pytest.importorskip("stim")

# Our quarter turns exp(-i pi/4 P) are stim's square-root gates up to a global phase
STIM_NAMES = {
    ("RX", 1): "SQRT_X",
    ("RX", -1): "SQRT_X_DAG",
    ("RY", 1): "SQRT_Y",
    ("RY", -1): "SQRT_Y_DAG",
    ("RZ", 1): "SQRT_Z",
    ("RZ", -1): "SQRT_Z_DAG",
    ("MS2", 1): "SQRT_XX",
    ("MS2", -1): "SQRT_XX_DAG",
}


def random_gates(rng, n_qubits, count):
    gates = []
    for _ in range(count):
        angle = int(rng.choice((1, -1)))
        if rng.random() < 0.4:
            i, j = (int(q) for q in rng.choice(n_qubits, size=2, replace=False))
            gates.append(ms2(i, j, angle))
        else:
            build = (rx, ry, rz)[int(rng.integers(3))]
            gates.append(build(int(rng.integers(n_qubits)), angle))
    return gates


@pytest.mark.parametrize("seed", range(5))
def test_tableau_matches_stim_expectations(seed):
    rng = np.random.default_rng(seed)
    n_qubits = 3
    gates = random_gates(rng, n_qubits, 30)

    state = StabilizerState(n_qubits)
    simulator = stim.TableauSimulator()
    simulator.set_num_qubits(n_qubits)
    for gate in gates:
        state.apply_gate(gate)
        name = STIM_NAMES[(gate.kind.value, gate.angle)]
        simulator.do(stim.Circuit(f"{name} {' '.join(map(str, gate.targets))}"))

    for label in nontrivial_paulis(n_qubits):
        expected = simulator.peek_observable_expectation(stim.PauliString(label))
        assert state.expectation(PauliString.from_label(label)) == expected, label
