from dataclasses import dataclass, field
from typing import Dict, Iterable, Tuple

import numpy as np

from .exceptions import CircuitContractError

PAULI_LABELS = "IXYZ"
# label -> (x bit, z bit)
PAULI_BITS: Dict[str, Tuple[int, int]] = {
    "I": (0, 0),
    "X": (1, 0),
    "Y": (1, 1),
    "Z": (0, 1),
}


def phase_exponent(x1, z1, x2, z2):
    """
    Exponent of i picked up per qubit when multiplying P1 * P2 (vectorized)

    Uses the g function of the tableau algorithm: the product of the single
    qubit Paulis (x1, z1) and (x2, z2) equals i^g times the Pauli with bits
    (x1 ^ x2, z1 ^ z2).
    """
    x1 = np.asarray(x1, dtype=np.int8)
    z1 = np.asarray(z1, dtype=np.int8)
    x2 = np.asarray(x2, dtype=np.int8)
    z2 = np.asarray(z2, dtype=np.int8)
    return np.where(
        (x1 == 1) & (z1 == 1),
        z2 - x2,
        np.where(
            x1 == 1,
            z2 * (2 * x2 - 1),
            np.where(z1 == 1, x2 * (1 - 2 * z2), 0),
        ),
    )


@dataclass(frozen=True, eq=False)
class PauliString:
    """Sign-tracked Pauli operator on n qubits"""

    x: np.ndarray
    z: np.ndarray
    sign: int = 1
    n_qubits: int = field(init=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.uint8) & 1
        z = np.asarray(self.z, dtype=np.uint8) & 1
        if x.shape != z.shape or x.ndim != 1:
            raise CircuitContractError(
                f"x and z bits must be 1-d and of equal length, got {x.shape} and {z.shape}"
            )
        if self.sign not in (1, -1):
            raise CircuitContractError(f"Pauli sign must be +1 or -1, got {self.sign}")
        x.setflags(write=False)
        z.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "n_qubits", len(x))

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(np.zeros(n_qubits, np.uint8), np.zeros(n_qubits, np.uint8))

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parses strings such as "+XIZ", "-YY" or "ZZI" """
        sign = 1
        if label[:1] in "+-":
            sign = -1 if label[0] == "-" else 1
            label = label[1:]
        try:
            bits = [PAULI_BITS[c] for c in label.upper()]
        except KeyError:
            raise CircuitContractError(f"Invalid Pauli label {label!r}")
        x = np.array([b[0] for b in bits], dtype=np.uint8)
        z = np.array([b[1] for b in bits], dtype=np.uint8)
        return cls(x, z, sign)

    @classmethod
    def from_sparse(
        cls, n_qubits: int, terms: Dict[int, str], sign: int = 1
    ) -> "PauliString":
        """Builds a Pauli from a {qubit: "X" | "Y" | "Z"} mapping"""
        x = np.zeros(n_qubits, np.uint8)
        z = np.zeros(n_qubits, np.uint8)
        for q, p in terms.items():
            if not 0 <= q < n_qubits:
                raise CircuitContractError(f"Qubit {q} out of range for {n_qubits} qubits")
            try:
                x[q], z[q] = PAULI_BITS[p.upper()]
            except KeyError:
                raise CircuitContractError(f"Invalid Pauli {p!r} on qubit {q}")
        return cls(x, z, sign)

    @classmethod
    def on_qubits(
        cls, n_qubits: int, qubits: Iterable[int], pauli: str, sign: int = 1
    ) -> "PauliString":
        return cls.from_sparse(n_qubits, {q: pauli for q in qubits}, sign)

    def label(self, q: int) -> str:
        x, z = int(self.x[q]), int(self.z[q])
        return PAULI_LABELS[x + z * (3 - 2 * x)]

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(int(q) for q in np.flatnonzero(self.x | self.z))

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    def is_identity(self) -> bool:
        return self.weight == 0

    def commutes(self, other: "PauliString") -> bool:
        self._check_size(other)
        form = np.dot(self.x.astype(np.int64), other.z) + np.dot(
            self.z.astype(np.int64), other.x
        )
        return int(form) % 2 == 0

    def __mul__(self, other: "PauliString") -> "PauliString":
        """
        Operator product self * other

        Commuting factors give a real phase. For anticommuting factors the
        leftover +-i is dropped and only its sign is kept.
        """
        self._check_size(other)
        exponent = int(np.sum(phase_exponent(self.x, self.z, other.x, other.z)))
        exponent += (0 if self.sign == 1 else 2) + (0 if other.sign == 1 else 2)
        sign = -1 if exponent % 4 in (2, 3) else 1
        return PauliString(self.x ^ other.x, self.z ^ other.z, sign)

    def __neg__(self) -> "PauliString":
        return PauliString(self.x, self.z, -self.sign)

    def unsigned(self) -> "PauliString":
        return PauliString(self.x, self.z, 1)

    def restricted(self, qubits: Iterable[int]) -> "PauliString":
        qubits = list(qubits)
        return PauliString(self.x[qubits], self.z[qubits], 1)

    def embedded(self, n_qubits: int, qubits: Iterable[int]) -> "PauliString":
        """Places this Pauli on the given qubits of a larger register"""
        qubits = list(qubits)
        if len(qubits) != self.n_qubits:
            raise CircuitContractError(
                f"Need {self.n_qubits} target qubits, got {len(qubits)}"
            )
        x = np.zeros(n_qubits, np.uint8)
        z = np.zeros(n_qubits, np.uint8)
        x[qubits] = self.x
        z[qubits] = self.z
        return PauliString(x, z, self.sign)

    def x_part(self) -> "PauliString":
        return PauliString(self.x, np.zeros_like(self.z))

    def z_part(self) -> "PauliString":
        return PauliString(np.zeros_like(self.x), self.z)

    def _check_size(self, other: "PauliString"):
        if other.n_qubits != self.n_qubits:
            raise CircuitContractError(
                f"Pauli sizes differ: {self.n_qubits} and {other.n_qubits}"
            )

    def __eq__(self, other):
        if not isinstance(other, PauliString):
            return NotImplemented
        return (
            self.sign == other.sign
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
        )

    def __hash__(self):
        return hash((self.sign, self.x.tobytes(), self.z.tobytes()))

    def __str__(self):
        body = "".join(self.label(q) for q in range(self.n_qubits))
        return ("+" if self.sign == 1 else "-") + body

    def __repr__(self):
        return f"PauliString({self})"


def nontrivial_paulis(n_qubits: int):
    """All 4^n - 1 non-identity Pauli labels on n qubits, in a fixed order"""
    labels = [""]
    for _ in range(n_qubits):
        labels = [prefix + p for prefix in labels for p in PAULI_LABELS]
    return tuple(label for label in labels if set(label) != {"I"})
