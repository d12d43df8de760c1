import enum
import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .constants import LOGICAL_EDGES, PLAQUETTES
from .exceptions import CircuitContractError
from .pauli import PauliString
from .tableau import StabilizerState

BASES = ("X", "Z")
TRIVIAL_SYNDROME = (1, 1, 1)


def conjugate_basis(basis: str) -> str:
    if basis not in BASES:
        raise CircuitContractError(f"Basis must be X or Z, got {basis!r}")
    return "Z" if basis == "X" else "X"


@dataclass(frozen=True)
class CodeLayout:
    """
    The d=3 triangular color code

    Plaquettes list their data qubits in ascending order, which is also the
    order in which a flagged readout couples to them.
    """

    plaquettes: Tuple[Tuple[int, ...], ...] = PLAQUETTES
    logical_edges: Tuple[Tuple[int, ...], ...] = LOGICAL_EDGES
    distance: int = 3
    t: int = 1
    k: int = 1

    @property
    def n_data(self) -> int:
        d = self.distance
        return (d * d + 2 * d - 1) // 2

    @property
    def n_generators(self) -> int:
        return 2 * len(self.plaquettes)

    def plaquettes_of(self, q: int) -> Tuple[int, ...]:
        return tuple(p for p, support in enumerate(self.plaquettes) if q in support)

    def syndrome_of(self, qubits: Iterable[int]) -> Tuple[int, ...]:
        """Plaquette outcomes caused by a conjugate-type error on the given qubits"""
        qubits = set(qubits)
        return tuple(
            -1 if len(qubits & set(support)) % 2 else 1 for support in self.plaquettes
        )


def steane_layout() -> CodeLayout:
    layout = CodeLayout()
    if layout.n_data != 7 or layout.n_data - layout.n_generators != layout.k:
        raise CircuitContractError("Inconsistent d=3 color code parameters")
    return layout


def _on_block(pauli: PauliString, qubits: Optional[Sequence[int]], n_qubits: Optional[int]):
    if qubits is None:
        return pauli
    return pauli.embedded(n_qubits, qubits)


def stabilizer_pauli(
    layout: CodeLayout,
    basis: str,
    p: int,
    qubits: Optional[Sequence[int]] = None,
    n_qubits: Optional[int] = None,
) -> PauliString:
    """
    Weight-4 plaquette operator of the given basis

    With ``qubits`` and ``n_qubits`` the operator is placed on that block of
    a larger register.
    """
    conjugate_basis(basis)
    if not 0 <= p < len(layout.plaquettes):
        raise CircuitContractError(f"Invalid plaquette id {p}")
    pauli = PauliString.on_qubits(layout.n_data, layout.plaquettes[p], basis)
    return _on_block(pauli, qubits, n_qubits)


def logical_operator(
    layout: CodeLayout,
    basis: str,
    edge: int = 0,
    qubits: Optional[Sequence[int]] = None,
    n_qubits: Optional[int] = None,
) -> PauliString:
    conjugate_basis(basis)
    if not 0 <= edge < len(layout.logical_edges):
        raise CircuitContractError(f"Invalid edge {edge}")
    pauli = PauliString.on_qubits(layout.n_data, layout.logical_edges[edge], basis)
    return _on_block(pauli, qubits, n_qubits)


class Classification(str, enum.Enum):
    NO_ERROR = "no-error"
    MEASUREMENT_ERROR = "measurement-error"
    WEIGHT_1 = "weight-1"
    HOOK = "weight-2-hook"
    FLAG_PLUS_DATA = "flag-plus-data"


@dataclass(frozen=True)
class Syndrome:
    """
    Plaquette outcomes of one basis, plus the flag of a flagged readout

    ``r`` holds the outcomes of the stabilizers of ``basis``. For a flagged
    decode these are the conjugate-type stabilizers measured after the flag
    triggered on ``flagged_plaquette``.
    """

    basis: str
    r: Tuple[int, ...]
    flag: Optional[int] = None
    flagged_plaquette: Optional[int] = None

    def __post_init__(self):
        conjugate_basis(self.basis)
        object.__setattr__(self, "r", tuple(int(v) for v in self.r))
        if len(self.r) != len(PLAQUETTES) or any(v not in (1, -1) for v in self.r):
            raise CircuitContractError(f"Malformed syndrome {self.r}")
        if (self.flag is None) != (self.flagged_plaquette is None):
            raise CircuitContractError("Flag and flagged plaquette must be given together")
        if self.flag is not None and self.flag not in (1, -1):
            raise CircuitContractError(f"Flag must be +1 or -1, got {self.flag}")

    @property
    def is_trivial(self) -> bool:
        return self.r == TRIVIAL_SYNDROME and self.flag in (None, 1)


@dataclass(frozen=True)
class DecoderVerdict:
    correction: PauliString
    classified_as: Classification
    qubits: FrozenSet[int] = field(default_factory=frozenset)


def _unflagged_table(layout: CodeLayout) -> Dict[Tuple[int, ...], int]:
    return {layout.syndrome_of([q]): q for q in range(layout.n_data)}


def _flagged_table(layout: CodeLayout, p: int) -> Dict[Tuple[int, ...], Tuple[Classification, Tuple[int, ...]]]:
    """
    Grey cells for a flag on plaquette p

    A fault on the syndrome ion inside the flag window leaves an error on the
    data qubits coupled after it: three, two or one of them.
    """
    a, _, c, d = layout.plaquettes[p]
    return {
        TRIVIAL_SYNDROME: (Classification.MEASUREMENT_ERROR, ()),
        layout.syndrome_of([a]): (Classification.WEIGHT_1, (a,)),
        layout.syndrome_of([c, d]): (Classification.HOOK, (c, d)),
        layout.syndrome_of([d]): (Classification.WEIGHT_1, (d,)),
    }


def decoding_table(layout: CodeLayout, flagged_plaquette: Optional[int] = None):
    """The look-up table of one column, keyed by syndrome"""
    if flagged_plaquette is None:
        return {r: (q,) for r, q in _unflagged_table(layout).items()}
    return {r: qubits for r, (_, qubits) in _flagged_table(layout, flagged_plaquette).items()}


def _verdict(layout: CodeLayout, basis: str, qubits: Sequence[int], kind: Classification):
    correction = PauliString.on_qubits(layout.n_data, qubits, conjugate_basis(basis))
    return DecoderVerdict(correction, kind, frozenset(qubits))


def decode_unflagged(syndrome: Syndrome, layout: Optional[CodeLayout] = None) -> DecoderVerdict:
    layout = layout or steane_layout()
    if syndrome.flag is not None:
        raise CircuitContractError("Unflagged decoding got a flagged syndrome")
    if syndrome.r == TRIVIAL_SYNDROME:
        return _verdict(layout, syndrome.basis, (), Classification.NO_ERROR)
    q = _unflagged_table(layout)[syndrome.r]
    return _verdict(layout, syndrome.basis, (q,), Classification.WEIGHT_1)


def decode_flagged(syndrome: Syndrome, layout: Optional[CodeLayout] = None) -> DecoderVerdict:
    """
    Decodes the outcomes that follow a flagged readout

    Without a triggered flag this is the unflagged table. With a triggered
    flag the grey cells of the flagged plaquette apply and any other outcome
    is read as the flag plus an independent data error.
    """
    layout = layout or steane_layout()
    if syndrome.flag is None:
        raise CircuitContractError("Flagged decoding needs a flag outcome")
    if not 0 <= syndrome.flagged_plaquette < len(layout.plaquettes):
        raise CircuitContractError(f"Invalid flagged plaquette {syndrome.flagged_plaquette}")
    unflagged = Syndrome(syndrome.basis, syndrome.r)
    if syndrome.flag == 1:
        return decode_unflagged(unflagged, layout)
    table = _flagged_table(layout, syndrome.flagged_plaquette)
    if syndrome.r in table:
        kind, qubits = table[syndrome.r]
        return _verdict(layout, syndrome.basis, qubits, kind)
    fallback = decode_unflagged(unflagged, layout)
    return DecoderVerdict(fallback.correction, Classification.FLAG_PLUS_DATA, fallback.qubits)


def decode(syndrome: Syndrome, layout: Optional[CodeLayout] = None) -> DecoderVerdict:
    if syndrome.flag is None:
        return decode_unflagged(syndrome, layout)
    return decode_flagged(syndrome, layout)


@dataclass(frozen=True)
class SharedDecoding:
    corrections: Tuple[DecoderVerdict, DecoderVerdict]
    # Common sign of the collapsed stabilizer pair after splitting
    collapsed_sign: int

    @property
    def weight(self) -> int:
        return sum(v.correction.weight for v in self.corrections)


def joint_decode_shared(
    first: Syndrome,
    second: Syndrome,
    collapsed: int,
    layout: Optional[CodeLayout] = None,
) -> SharedDecoding:
    """
    Decodes the split-basis syndromes of two blocks that were just split

    The collapsed stabilizer had no individual value while merged, only the
    product of the pair was kept. Both blocks re-measure it to a common sign
    which is unknown, so every choice of that sign is tried and the lightest
    joint explanation is kept. A single error from before the merge shows up
    as a disagreement on the collapsed pair and is then corrected with one
    data flip instead of one per block.
    """
    layout = layout or steane_layout()
    if first.basis != second.basis:
        raise CircuitContractError("Shared decoding needs syndromes of the same basis")
    best = None
    # +1 is tried first so ties keep the first block's collapsed outcome
    for sign in sorted({first.r[collapsed], -first.r[collapsed]}, reverse=True):
        verdicts = []
        for syndrome in (first, second):
            r = list(syndrome.r)
            r[collapsed] *= sign
            verdicts.append(
                decode(Syndrome(syndrome.basis, r, syndrome.flag, syndrome.flagged_plaquette), layout)
            )
        candidate = SharedDecoding(tuple(verdicts), sign)
        if best is None or candidate.weight < best.weight:
            best = candidate
    return best


@dataclass(frozen=True)
class CodeBlock:
    """A 7-qubit logical block placed on register qubits"""

    name: str
    qubits: Tuple[int, ...]
    layout: CodeLayout = field(default_factory=steane_layout)

    def stabilizer(self, basis: str, p: int, n_qubits: int) -> PauliString:
        return stabilizer_pauli(self.layout, basis, p, self.qubits, n_qubits)

    def logical(self, basis: str, n_qubits: int, edge: int = 0) -> PauliString:
        return logical_operator(self.layout, basis, edge, self.qubits, n_qubits)

    def pauli(self, qubits: Iterable[int], basis: str, n_qubits: int) -> PauliString:
        """Pauli of one basis on data qubits given by their in-block index"""
        return PauliString.on_qubits(n_qubits, [self.qubits[q] for q in qubits], basis)

    def embed(self, correction: PauliString, n_qubits: int) -> PauliString:
        return correction.embedded(n_qubits, self.qubits)


@dataclass(frozen=True)
class LogicalVerdict:
    x_failure: bool
    z_failure: bool
    corrections: Tuple[PauliString, ...] = ()


def ideal_qec_verdict(
    state: StabilizerState,
    blocks: Sequence[CodeBlock],
    frame=None,
    expected: Sequence[Tuple[str, PauliString]] = (),
) -> LogicalVerdict:
    """
    One round of perfect error correction followed by a logical check

    The pending Pauli frame is applied to a copy of the state, every block's
    six stabilizers are measured noiselessly and corrected with the weight-1
    table, then each expected logical stabilizer is evaluated. ``expected``
    pairs a failure type ("X" or "Z") with a logical operator that should be
    +1, for instance ("X", Z_L Z_L) for a Bell pair.
    """
    work = state.copy()
    n = work.n_qubits
    if frame is not None:
        frame.apply(work)
    corrections: List[PauliString] = []
    for block in blocks:
        for basis in BASES:
            r = [
                work.measure(block.stabilizer(basis, p, n), forced=1, record=False)
                for p in range(len(block.layout.plaquettes))
            ]
            verdict = decode_unflagged(Syndrome(basis, r), block.layout)
            if not verdict.correction.is_identity():
                correction = block.embed(verdict.correction, n)
                work.apply_pauli(correction)
                corrections.append(correction)
    failures = {"X": False, "Z": False}
    for failure_type, logical in expected:
        if work.expectation(logical) != 1:
            failures[failure_type] = True
    return LogicalVerdict(failures["X"], failures["Z"], tuple(corrections))


def stabilizer_group(layout: CodeLayout) -> List[PauliString]:
    """All 2^6 elements of the stabilizer group, signs ignored"""
    generators = [
        stabilizer_pauli(layout, basis, p)
        for basis in BASES
        for p in range(len(layout.plaquettes))
    ]
    elements = []
    for mask in itertools.product((0, 1), repeat=len(generators)):
        element = PauliString.identity(layout.n_data)
        for bit, generator in zip(mask, generators):
            if bit:
                element = element * generator
        elements.append(element.unsigned())
    return elements
