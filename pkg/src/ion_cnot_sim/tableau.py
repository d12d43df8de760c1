import enum
import itertools
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import CircuitContractError
from .pauli import PAULI_BITS, PauliString, phase_exponent

HALF_TURN = 2


class GateKind(str, enum.Enum):
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    MS2 = "MS2"
    MS5 = "MS5"
    CNOT = "CNOT"
    H = "H"
    S = "S"


ROTATION_AXES = {GateKind.RX: "X", GateKind.RY: "Y", GateKind.RZ: "Z"}
ARITY = {
    GateKind.RX: 1,
    GateKind.RY: 1,
    GateKind.RZ: 1,
    GateKind.MS2: 2,
    GateKind.MS5: 5,
    GateKind.CNOT: 2,
    GateKind.H: 1,
    GateKind.S: 1,
}


@dataclass(frozen=True)
class GateOp:
    """
    One Clifford gate of the trapped-ion gate set

    ``angle`` is +1 or -1 for a +-pi/2 rotation and 2 for a pi rotation.
    Rotations follow R(theta) = exp(-i theta sigma / 2) and the MS gates
    follow exp(-i theta sum X_i X_j / 2) over every pair of targets, so
    MS2 with angle +1 is (I - i X_i X_j) / sqrt(2).
    """

    kind: GateKind
    targets: Tuple[int, ...]
    angle: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if len(self.targets) != ARITY[self.kind]:
            raise CircuitContractError(
                f"{self.kind.value} acts on {ARITY[self.kind]} qubits, got {self.targets}"
            )
        if len(set(self.targets)) != len(self.targets):
            raise CircuitContractError(f"Duplicate targets in {self.kind.value}: {self.targets}")
        if self.kind in ROTATION_AXES:
            allowed = (1, -1, HALF_TURN)
        elif self.kind in (GateKind.MS2, GateKind.MS5):
            allowed = (1, -1)
        else:
            allowed = (1,)
        if self.angle not in allowed:
            raise CircuitContractError(
                f"{self.kind.value} does not support angle code {self.angle}"
            )

    @classmethod
    def from_radians(cls, kind, targets, theta: float) -> "GateOp":
        """Builds a gate from an angle in radians, accepting Clifford angles only"""
        quarter_turns = theta / (math.pi / 2)
        nearest = round(quarter_turns)
        if not math.isclose(quarter_turns, nearest, abs_tol=1e-9) or nearest % 4 == 0:
            raise CircuitContractError(f"Angle {theta} is not a Clifford rotation angle")
        angle = {1: 1, 2: HALF_TURN, 3: -1}[nearest % 4]
        return cls(kind, tuple(targets), angle)

    @property
    def is_entangling(self) -> bool:
        return self.kind in (GateKind.MS2, GateKind.MS5, GateKind.CNOT)

    def inverse(self) -> "GateOp":
        if self.kind in (GateKind.CNOT, GateKind.H):
            return self
        if self.kind == GateKind.S:
            raise CircuitContractError("S inverse is not part of the gate set, use RZ(-pi/2)")
        if self.angle == HALF_TURN:
            return self
        return GateOp(self.kind, self.targets, -self.angle)

    def __str__(self):
        angle = {1: "+pi/2", -1: "-pi/2", HALF_TURN: "pi"}[self.angle]
        targets = ",".join(str(t) for t in self.targets)
        if self.kind in (GateKind.CNOT, GateKind.H, GateKind.S):
            return f"{self.kind.value} {targets}"
        return f"{self.kind.value}({angle}) {targets}"


def rx(q: int, angle: int = 1) -> GateOp:
    return GateOp(GateKind.RX, (q,), angle)


def ry(q: int, angle: int = 1) -> GateOp:
    return GateOp(GateKind.RY, (q,), angle)


def rz(q: int, angle: int = 1) -> GateOp:
    return GateOp(GateKind.RZ, (q,), angle)


def ms2(i: int, j: int, angle: int = 1) -> GateOp:
    return GateOp(GateKind.MS2, (i, j), angle)


def ms5(qubits: Sequence[int], angle: int = 1) -> GateOp:
    return GateOp(GateKind.MS5, tuple(qubits), angle)


class StabilizerState:
    """
    Stabilizer tableau with destabilizers

    Rows 0..n-1 hold destabilizers and rows n..2n-1 hold the stabilizer
    generators. ``r`` holds the sign bit of every row.
    """

    def __init__(self, n_qubits: int):
        if n_qubits < 1:
            raise CircuitContractError(f"Number of qubits must be positive, got {n_qubits}")
        n = n_qubits
        self.n_qubits = n
        self.x = np.zeros((2 * n, n), dtype=np.uint8)
        self.z = np.zeros((2 * n, n), dtype=np.uint8)
        self.r = np.zeros(2 * n, dtype=np.uint8)
        self.x[np.arange(n), np.arange(n)] = 1
        self.z[n + np.arange(n), np.arange(n)] = 1
        self.record: List[int] = []

    def copy(self) -> "StabilizerState":
        other = StabilizerState.__new__(StabilizerState)
        other.n_qubits = self.n_qubits
        other.x = self.x.copy()
        other.z = self.z.copy()
        other.r = self.r.copy()
        other.record = list(self.record)
        return other

    def _check_targets(self, targets: Sequence[int]):
        for t in targets:
            if not 0 <= t < self.n_qubits:
                raise CircuitContractError(
                    f"Target {t} out of range for {self.n_qubits} qubits"
                )

    def _check_pauli(self, pauli: PauliString):
        if pauli.n_qubits != self.n_qubits:
            raise CircuitContractError(
                f"Pauli acts on {pauli.n_qubits} qubits, state has {self.n_qubits}"
            )

    def _anticommuting_rows(self, pauli: PauliString) -> np.ndarray:
        form = self.x.astype(np.int64) @ pauli.z + self.z.astype(np.int64) @ pauli.x
        return (form % 2).astype(bool)

    def rotate(self, pauli: PauliString, angle: int) -> "StabilizerState":
        """
        Conjugates every row by exp(-i angle pi/4 Q) for the Pauli Q

        Rows commuting with Q are untouched. For a quarter turn an
        anticommuting row P becomes i * angle * P * Q, for a half turn it
        becomes -P.
        """
        self._check_pauli(pauli)
        rows = self._anticommuting_rows(pauli)
        if not rows.any():
            return self
        if angle == HALF_TURN:
            self.r[rows] ^= 1
            return self
        support = np.array(pauli.support)
        exponent = phase_exponent(
            self.x[np.ix_(rows, support)],
            self.z[np.ix_(rows, support)],
            pauli.x[support],
            pauli.z[support],
        ).sum(axis=1)
        exponent = exponent + 2 * self.r[rows].astype(np.int64)
        exponent += 0 if pauli.sign == 1 else 2
        exponent += 1 if angle == 1 else 3
        self.r[rows] = ((exponent % 4) // 2).astype(np.uint8)
        self.x[rows] ^= pauli.x
        self.z[rows] ^= pauli.z
        return self

    def apply_pauli(self, pauli: PauliString) -> "StabilizerState":
        """Applies the Pauli operator itself, which flips anticommuting rows"""
        self._check_pauli(pauli)
        self.r[self._anticommuting_rows(pauli)] ^= 1
        return self

    def apply_gate(self, gate: GateOp) -> "StabilizerState":
        self._check_targets(gate.targets)
        n = self.n_qubits
        kind = gate.kind
        if kind in ROTATION_AXES:
            (q,) = gate.targets
            axis = PauliString.from_sparse(n, {q: ROTATION_AXES[kind]})
            return self.rotate(axis, gate.angle)
        if kind == GateKind.MS2:
            return self.rotate(PauliString.on_qubits(n, gate.targets, "X"), gate.angle)
        if kind == GateKind.MS5:
            for i, j in itertools.combinations(gate.targets, 2):
                self.rotate(PauliString.on_qubits(n, (i, j), "X"), gate.angle)
            return self
        if kind == GateKind.CNOT:
            a, b = gate.targets
            self.r ^= self.x[:, a] & self.z[:, b] & (self.x[:, b] ^ self.z[:, a] ^ 1)
            self.x[:, b] ^= self.x[:, a]
            self.z[:, a] ^= self.z[:, b]
            return self
        if kind == GateKind.H:
            (q,) = gate.targets
            self.r ^= self.x[:, q] & self.z[:, q]
            self.x[:, q], self.z[:, q] = self.z[:, q].copy(), self.x[:, q].copy()
            return self
        if kind == GateKind.S:
            (q,) = gate.targets
            self.r ^= self.x[:, q] & self.z[:, q]
            self.z[:, q] ^= self.x[:, q]
            return self
        raise CircuitContractError(f"Unsupported gate {gate}")

    def _row_product(self, h: int, i: int):
        """row h := row i * row h"""
        exponent = phase_exponent(self.x[i], self.z[i], self.x[h], self.z[h]).sum()
        exponent += 2 * int(self.r[h]) + 2 * int(self.r[i])
        self.r[h] = (int(exponent) % 4) // 2
        self.x[h] ^= self.x[i]
        self.z[h] ^= self.z[i]

    def _deterministic_value(self, pauli: PauliString) -> int:
        """Sign of +-P within the stabilizer group, P known to commute with it"""
        n = self.n_qubits
        x = np.zeros(n, np.uint8)
        z = np.zeros(n, np.uint8)
        r = 0
        for i in np.flatnonzero(self._anticommuting_rows(pauli)[:n]):
            row = n + i
            exponent = int(phase_exponent(self.x[row], self.z[row], x, z).sum())
            r = ((exponent + 2 * r + 2 * int(self.r[row])) % 4) // 2
            x ^= self.x[row]
            z ^= self.z[row]
        value = -1 if r else 1
        return value * pauli.sign

    def expectation(self, pauli: PauliString) -> int:
        """+1 or -1 if the Pauli is (minus) a stabilizer, 0 if its value is random"""
        self._check_pauli(pauli)
        if self._anticommuting_rows(pauli)[self.n_qubits:].any():
            return 0
        return self._deterministic_value(pauli)

    def measure(
        self,
        pauli: PauliString,
        rng: Optional[np.random.Generator] = None,
        forced: Optional[int] = None,
        record: bool = True,
    ) -> int:
        """
        Projective measurement of a Pauli observable, returning +1 or -1

        A random outcome is drawn from ``rng``, or taken from ``forced`` when
        given. Deterministic outcomes ignore both.
        """
        self._check_pauli(pauli)
        if pauli.is_identity():
            raise CircuitContractError("Cannot measure the identity")
        n = self.n_qubits
        rows = self._anticommuting_rows(pauli)
        stabilizer_hits = np.flatnonzero(rows[n:])
        if len(stabilizer_hits) == 0:
            outcome = self._deterministic_value(pauli)
        else:
            p = n + int(stabilizer_hits[0])
            for i in np.flatnonzero(rows):
                if i != p:
                    self._row_product(int(i), p)
            self.x[p - n] = self.x[p]
            self.z[p - n] = self.z[p]
            self.r[p - n] = self.r[p]
            if forced is not None:
                outcome = int(forced)
            else:
                if rng is None:
                    raise CircuitContractError("Random measurement outcome needs an rng")
                outcome = 1 if rng.random() < 0.5 else -1
            self.x[p] = pauli.x
            self.z[p] = pauli.z
            self.r[p] = 0 if outcome * pauli.sign == 1 else 1
        if record:
            self.record.append(outcome)
        return outcome

    def reset(self, q: int, rng: Optional[np.random.Generator] = None) -> "StabilizerState":
        self._check_targets((q,))
        z_q = PauliString.from_sparse(self.n_qubits, {q: "Z"})
        if self.measure(z_q, rng, record=False) == -1:
            self.apply_pauli(PauliString.from_sparse(self.n_qubits, {q: "X"}))
        return self

    def generators(self) -> List[PauliString]:
        n = self.n_qubits
        return [
            PauliString(self.x[i], self.z[i], -1 if self.r[i] else 1)
            for i in range(n, 2 * n)
        ]

    def is_valid(self) -> bool:
        """Checks the symplectic structure: commuting stabilizers paired with destabilizers"""
        n = self.n_qubits
        x = self.x.astype(np.int64)
        z = self.z.astype(np.int64)
        form = (x @ z.T + z @ x.T) % 2
        expected = np.zeros((2 * n, 2 * n), dtype=np.int64)
        expected[np.arange(n), n + np.arange(n)] = 1
        expected[n + np.arange(n), np.arange(n)] = 1
        return bool(np.array_equal(form, expected))

    def __str__(self):
        return "\n".join(str(g) for g in self.generators())


def new_state(n: int) -> StabilizerState:
    return StabilizerState(n)


def apply_gate(state: StabilizerState, g: GateOp) -> StabilizerState:
    return state.apply_gate(g)


def apply_ms_n(state: StabilizerState, qubits: Sequence[int], sign: int) -> StabilizerState:
    return state.apply_gate(ms5(qubits, sign))


def measure_pauli(
    state: StabilizerState, p: PauliString, rng: np.random.Generator
) -> int:
    return state.measure(p, rng)


def reset_qubit(
    state: StabilizerState, q: int, rng: Optional[np.random.Generator] = None
) -> StabilizerState:
    return state.reset(q, rng)


def single_qubit_pauli(n: int, q: int, label: str) -> PauliString:
    if label not in PAULI_BITS:
        raise CircuitContractError(f"Invalid Pauli {label!r}")
    return PauliString.from_sparse(n, {q: label})
