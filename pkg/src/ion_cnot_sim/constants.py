import os
from typing import Dict, Tuple


CSV_SCHEMA_VERSION = "1"
DEFAULT_CONFIG_PATH = os.path.join(".", "ion-cnot-sim.config.json")
DEFAULT_OUT_DIR = "results"

PROTOCOL_FLAG_QEC = "flag-qec"
PROTOCOL_TRANSVERSAL = "transversal-cnot"
PROTOCOL_LATTICE_SURGERY = "lattice-surgery-cnot"
PROTOCOLS = (PROTOCOL_FLAG_QEC, PROTOCOL_TRANSVERSAL, PROTOCOL_LATTICE_SURGERY)
PROTOCOL_DEFAULT = PROTOCOL_LATTICE_SURGERY

# d=3 color code on seven data qubits, zero-indexed
PLAQUETTES = ((0, 1, 2, 3), (1, 2, 4, 5), (2, 3, 5, 6))
# Weight-3 logical representatives, one per side of the triangle
LOGICAL_EDGES = ((0, 1, 4), (4, 5, 6), (0, 3, 6))
# Readout order of the six stabilizers within one cycle
STABILIZER_ORDER = (("X", 0), ("Z", 0), ("X", 1), ("Z", 1), ("X", 2), ("Z", 2))

# Boundary supports for the two joint measurements. M_XX joins ancilla and
# target along edge 1, M_ZZ joins control and ancilla along edge 0.
MERGE_XX_EDGE = 1
MERGE_XX_WEIGHT2 = (6,)
MERGE_XX_WEIGHT4 = (4, 5)
MERGE_XX_COLLAPSED = 2
MERGE_ZZ_EDGE = 0
MERGE_ZZ_WEIGHT2 = (4,)
MERGE_ZZ_WEIGHT4 = (0, 1)
MERGE_ZZ_COLLAPSED = 1

# Seconds
T2_DEFAULT = 2.2

PRESET_ANTICIPATED = "anticipated"
PRESET_CURRENT = "current"
PRESETS = (PRESET_ANTICIPATED, PRESET_CURRENT)

DURATION_KINDS = (
    "ms2",
    "ms5",
    "one_qubit",
    "measure",
    "reset",
    "cool",
    "shuttle",
    "split_merge",
    "rotate",
    "junction",
)

# Operation durations in seconds, keyed by preset
DURATIONS: Dict[str, Dict[str, float]] = {
    PRESET_ANTICIPATED: {
        "ms2": 15e-6,
        "ms5": 15e-6,
        "one_qubit": 1e-6,
        "measure": 30e-6,
        "reset": 10e-6,
        "cool": 100e-6,
        "shuttle": 5e-6,
        "split_merge": 30e-6,
        "rotate": 20e-6,
        "junction": 200e-6,
    },
    PRESET_CURRENT: {
        "ms2": 40e-6,
        "ms5": 60e-6,
        "one_qubit": 5e-6,
        "measure": 400e-6,
        "reset": 50e-6,
        "cool": 400e-6,
        "shuttle": 5e-6,
        "split_merge": 80e-6,
        "rotate": 42e-6,
        "junction": 100e-6,
    },
}

# Infidelities keyed by preset. Reset infidelity is metadata, p_m models both
# preparation and measurement with the measurement value.
INFIDELITIES: Dict[str, Dict[str, float]] = {
    PRESET_ANTICIPATED: {
        "p_m": 1e-4,
        "p_1q": 1e-5,
        "p_2q": 2e-4,
        "p_5q": 1e-3,
        "reset": 5e-3,
    },
    PRESET_CURRENT: {
        "p_m": 1e-3,
        "p_1q": 5e-5,
        "p_2q": 1e-2,
        "p_5q": 5e-2,
        "reset": 5e-3,
    },
}

# Final mean phonon numbers, carried as metadata only
MOTIONAL_QUANTA: Dict[str, Dict[str, float]] = {
    PRESET_ANTICIPATED: {
        "cool": 0.1,
        "shuttle": 0.1,
        "split_merge": 1.0,
        "rotate": 0.2,
    },
    PRESET_CURRENT: {
        "cool": 0.1,
        "shuttle": 0.1,
        "split_merge": 6.0,
        "rotate": 0.3,
        "junction": 3.0,
    },
}

P_CROSS_LOW = 1e-5
P_CROSS_HIGH = 1e-3
P_CROSS_DEFAULT = P_CROSS_LOW
# During p_2q sweeps the five-qubit gate error follows the two-qubit one
P5Q_OVER_P2Q = 5.0

CROSSING_PER_ION = "per-ion"
CROSSING_PER_EVENT = "per-event"
CROSSING_ACCOUNTING = (CROSSING_PER_ION, CROSSING_PER_EVENT)

SWEEP_AXES = ("p_m", "p_1q", "p_2q", "p_5q", "p_idle", "p_cross")

WEIGHT_CAPS: Dict[str, int] = {
    PROTOCOL_FLAG_QEC: 5,
    PROTOCOL_TRANSVERSAL: 7,
    PROTOCOL_LATTICE_SURGERY: 5,
}
DELTA_DEFAULT = 1e-3
SHOTS_PER_WEIGHT_DEFAULT = 2000
SEED_DEFAULT = 20240101
WORKERS_DEFAULT = 1
# Random Pauli subsample per five-qubit location during exhaustive checks
FIVE_QUBIT_SUBSAMPLE = 200

# Reference values for the error-free path of each protocol
REFERENCE_RESOURCES: Dict[str, Dict[str, float]] = {
    PROTOCOL_TRANSVERSAL: {
        "one_qubit_gates": 28,
        "ms2_gates": 7,
        "ms5_gates": 0,
        "junction_crossings": 32,
    },
    PROTOCOL_LATTICE_SURGERY: {
        "one_qubit_gates": 223,
        "ms2_gates": 120,
        "ms5_gates": 0,
        "junction_crossings": 12,
    },
}
# Seconds, (low p_cross, high p_cross)
REFERENCE_DURATIONS: Dict[str, Tuple[Tuple[float, float], ...]] = {
    PROTOCOL_TRANSVERSAL: ((2.68e-3, 2.68e-3), (129e-3, 129e-3)),
    PROTOCOL_LATTICE_SURGERY: ((28.5e-3, 31.5e-3), (76.3e-3, 78.4e-3)),
}
