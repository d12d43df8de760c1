"""
Branching circuits and the context they execute in

A circuit is not stored as a node/edge graph. It is a program, a callable
taking an ``ExecutionContext``, that emits primitives one at a time and may
branch on outcomes it has already seen. The straight-line pieces it plays
are explicit node lists: ``schedule.CompiledSchedule.nodes``.

Fault locations are numbered per fault class in emission order. The
reference numbering is the error-free path, obtained by running the program
once with no faults (``enumerate_locations``). A shot on another branch
reuses the same counters, so ordinals past the point where it leaves the
reference path can go unreached; ``execute`` reports them as ``skipped``.
"""
import bisect
import contextlib
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import CircuitContractError
from .noise import FAULT_CLASSES, FaultClass, NoiseParams
from .pauli import PAULI_BITS, PauliString
from .tableau import GateKind, GateOp, StabilizerState
from .util import logger

FaultKey = Tuple[FaultClass, int]

GATE_CLASSES = {
    GateKind.RX: FaultClass.ONE_QUBIT,
    GateKind.RY: FaultClass.ONE_QUBIT,
    GateKind.RZ: FaultClass.ONE_QUBIT,
    GateKind.H: FaultClass.ONE_QUBIT,
    GateKind.S: FaultClass.ONE_QUBIT,
    GateKind.MS2: FaultClass.TWO_QUBIT,
    GateKind.CNOT: FaultClass.TWO_QUBIT,
    GateKind.MS5: FaultClass.FIVE_QUBIT,
}


@dataclass(frozen=True)
class FaultLocation:
    """
    One noisy primitive on the reference path

    ``epoch`` counts the non-idle operations that touched the (single) target
    qubit before this location. Z errors at equal epochs on one qubit are
    interchangeable.
    """

    ordinal: int
    fault_class: FaultClass
    targets: Tuple[int, ...]
    node: str = ""
    epoch: int = 0


@dataclass
class ResourceTally:
    one_qubit_gates: int = 0
    ms2_gates: int = 0
    ms5_gates: int = 0
    measurements: int = 0
    resets: int = 0
    junction_crossings: int = 0
    crossing_events: int = 0
    reorder_steps: int = 0
    cool_steps: int = 0
    # Seconds spent outside junction crossings
    fixed_elapsed: float = 0.0

    def add_gate(self, gate: GateOp):
        if gate.kind == GateKind.MS2:
            self.ms2_gates += 1
        elif gate.kind == GateKind.MS5:
            self.ms5_gates += 1
        elif gate.kind != GateKind.CNOT:
            self.one_qubit_gates += 1

    def elapsed(self, params: NoiseParams) -> float:
        """Total duration, with crossings charged at the crossing time of ``params``"""
        return self.fixed_elapsed + self.crossing_events * params.crossing_time

    def merge(self, other: "ResourceTally") -> "ResourceTally":
        merged = ResourceTally()
        for key, value in asdict(self).items():
            setattr(merged, key, value + getattr(other, key))
        return merged

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


class PauliFrame:
    """
    Pending Pauli corrections over the whole register plus recorded parities

    In inline mode corrections are applied to the state as they arrive and
    measurement outcomes need no adjustment.
    """

    def __init__(self, n_qubits: int, inline_state: Optional[StabilizerState] = None):
        self.n_qubits = n_qubits
        self.pending = PauliString.identity(n_qubits)
        self.parities: Dict[str, int] = {}
        self.inline_state = inline_state

    def add(self, correction: PauliString):
        if correction.is_identity():
            return
        if self.inline_state is not None:
            self.inline_state.apply_pauli(correction)
        else:
            self.pending = (correction * self.pending).unsigned()

    def sign_for(self, observable: PauliString) -> int:
        """-1 if the pending correction flips the observable"""
        return 1 if self.pending.commutes(observable) else -1

    def adjust(self, observable: PauliString, raw_outcome: int) -> int:
        return raw_outcome * self.sign_for(observable)

    def record_parity(self, name: str, value: int):
        self.parities[name] = value

    def apply(self, state: StabilizerState):
        if not self.pending.is_identity():
            state.apply_pauli(self.pending)

    def __str__(self):
        return f"frame {self.pending} parities {self.parities}"


class FaultSource:
    """Decides which Pauli error, if any, strikes a fault location"""

    def at(self, fault_class: FaultClass, ordinal: int) -> Optional[str]:
        return None

    def in_range(self, fault_class: FaultClass, start: int, count: int) -> Dict[int, str]:
        return {}


class AssignedFaults(FaultSource):
    def __init__(self, assignment: Optional[Dict[FaultKey, str]] = None):
        self.assignment = {(FaultClass(c), int(o)): p for (c, o), p in (assignment or {}).items()}
        self._sorted = {
            c: sorted(o for (k, o) in self.assignment if k == c) for c in FAULT_CLASSES
        }

    def at(self, fault_class, ordinal):
        return self.assignment.get((fault_class, ordinal))

    def in_range(self, fault_class, start, count):
        ordinals = self._sorted[fault_class]
        lo = bisect.bisect_left(ordinals, start)
        hi = bisect.bisect_left(ordinals, start + count)
        return {o: self.assignment[(fault_class, o)] for o in ordinals[lo:hi]}


class BernoulliFaults(FaultSource):
    """Independent per-location errors, as drawn by a traditional Monte Carlo"""

    def __init__(self, params: NoiseParams, rng: np.random.Generator):
        self.channels = {c: params.channel_for(c) for c in FAULT_CLASSES}
        self.rng = rng

    def at(self, fault_class, ordinal):
        return self.channels[fault_class].draw(self.rng)

    def in_range(self, fault_class, start, count):
        channel = self.channels[fault_class]
        if channel.probability <= 0 or count <= 0:
            return {}
        hits = np.flatnonzero(self.rng.random(count) < channel.probability)
        return {start + int(i): channel.sample(self.rng) for i in hits}


@dataclass
class ExecutionResult:
    outcomes: List[Tuple[str, int]]
    frame: PauliFrame
    tally: ResourceTally
    realized_weights: Tuple[int, ...]
    skipped: Dict[FaultKey, str]
    flags: Dict[str, bool]
    result: Any = None


class ExecutionContext:
    """
    Per-shot execution of a dynamic circuit

    Every noisy primitive takes the next ordinal of its fault class and the
    fault source decides the error injected right after it. Measurement
    errors are injected before the measurement instead.
    """

    def __init__(
        self,
        n_qubits: int,
        faults: Optional[FaultSource] = None,
        rng: Optional[np.random.Generator] = None,
        state: Optional[StabilizerState] = None,
        record_locations: bool = False,
        trace: bool = False,
        inline_frame: bool = False,
    ):
        self.n_qubits = n_qubits
        self.state = state if state is not None else StabilizerState(n_qubits)
        self.faults = faults or FaultSource()
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.frame = PauliFrame(n_qubits, self.state if inline_frame else None)
        self.tally = ResourceTally()
        self.outcomes: List[Tuple[str, int]] = []
        self.flags: Dict[str, bool] = {}
        self.counters = Counter({c: 0 for c in FAULT_CLASSES})
        self.realized = Counter({c: 0 for c in FAULT_CLASSES})
        self.applied: Dict[FaultKey, str] = {}
        self.epochs = Counter()
        self.locations: Optional[Dict[FaultClass, List[FaultLocation]]] = (
            {c: [] for c in FAULT_CLASSES} if record_locations else None
        )
        self.trace_lines: Optional[List[str]] = [] if trace else None
        self._guards: List[str] = []

    # -- bookkeeping --------------------------------------------------------

    def _trace(self, text: str):
        if self.trace_lines is not None:
            guard = " if " + " and ".join(self._guards) if self._guards else ""
            self.trace_lines.append(text + guard)

    def note(self, text: str):
        self._trace(f"# {text}")

    @contextlib.contextmanager
    def conditional(self, label: str):
        """Marks the nodes emitted inside as guarded by ``label`` in dumps"""
        self._guards.append(label)
        try:
            yield
        finally:
            self._guards.pop()

    def set_flag(self, name: str, value: bool = True):
        """Protocol flags are monotone: once set they stay set"""
        if value:
            self.flags[name] = True

    def flag(self, name: str) -> bool:
        return self.flags.get(name, False)

    def _inject(self, label: str, targets: Sequence[int]):
        if len(label) != len(targets):
            raise CircuitContractError(f"Error {label!r} does not fit the {len(targets)} targets {tuple(targets)}")
        terms = {}
        for q, p in zip(targets, label):
            if p != "I":
                terms[q] = p
        if terms:
            self.state.apply_pauli(PauliString.from_sparse(self.n_qubits, terms))

    def _location(self, fault_class: FaultClass, targets: Sequence[int], node: str):
        ordinal = self.counters[fault_class]
        self.counters[fault_class] += 1
        if self.locations is not None:
            epoch = self.epochs[targets[0]] if len(targets) == 1 else 0
            self.locations[fault_class].append(
                FaultLocation(ordinal, fault_class, tuple(targets), node, epoch)
            )
        label = self.faults.at(fault_class, ordinal)
        if label is not None:
            self._inject(label, targets)
            self.realized[fault_class] += 1
            self.applied[(fault_class, ordinal)] = label

    def _touch(self, qubits: Sequence[int]):
        for q in qubits:
            self.epochs[q] += 1

    # -- noisy primitives ---------------------------------------------------

    def gate(self, gate: GateOp):
        self.state.apply_gate(gate)
        self.tally.add_gate(gate)
        self._trace(f"gate {gate}")
        self._touch(gate.targets)
        self._location(GATE_CLASSES[gate.kind], gate.targets, str(gate))

    def prep(self, q: int):
        self.state.reset(q, self.rng)
        self.tally.resets += 1
        self._trace(f"reset {q}")
        self._touch((q,))
        self._location(FaultClass.PREP_MEASURE, (q,), f"reset {q}")

    def measure(self, q: int, label: str = "") -> int:
        """Z-basis measurement of one ion; the raw outcome is recorded"""
        self._touch((q,))
        self._location(FaultClass.PREP_MEASURE, (q,), f"measure {q}")
        outcome = self.state.measure(
            PauliString.from_sparse(self.n_qubits, {q: "Z"}), self.rng
        )
        self.tally.measurements += 1
        self.outcomes.append((label, outcome))
        self._trace(f"measure {q} -> {label}")
        return outcome

    def idle(self, qubits: Sequence[int], quanta: int):
        """Dephasing locations, one per qubit per time quantum"""
        if quanta <= 0 or not qubits:
            return
        qubits = tuple(qubits)
        count = len(qubits) * quanta
        start = self.counters[FaultClass.IDLE]
        self.counters[FaultClass.IDLE] += count
        self._trace(f"idle {quanta} quanta on {len(qubits)} qubits")
        if self.locations is not None:
            sink = self.locations[FaultClass.IDLE]
            for k in range(count):
                q = qubits[k % len(qubits)]
                sink.append(FaultLocation(start + k, FaultClass.IDLE, (q,), "idle", self.epochs[q]))
        for ordinal, label in self.faults.in_range(FaultClass.IDLE, start, count).items():
            q = qubits[(ordinal - start) % len(qubits)]
            self._inject(label, (q,))
            self.realized[FaultClass.IDLE] += 1
            self.applied[(FaultClass.IDLE, ordinal)] = label

    def cross(self, n_ions: int, exposed: Sequence[int], events: int, names: str = ""):
        """
        Junction crossing of ``n_ions`` ions in ``events`` separate events

        Every exposed qubit dephases with p_cross per event: moving ions by
        the crossing itself, waiting ions by idling for the crossing time.
        """
        self.tally.junction_crossings += n_ions
        self.tally.crossing_events += events
        self._trace(f"jcross {names or n_ions} x{events}")
        exposed = tuple(exposed)
        for _ in range(events):
            start = self.counters[FaultClass.CROSSING]
            self.counters[FaultClass.CROSSING] += len(exposed)
            if self.locations is not None:
                sink = self.locations[FaultClass.CROSSING]
                for k, q in enumerate(exposed):
                    sink.append(
                        FaultLocation(start + k, FaultClass.CROSSING, (q,), "jcross", self.epochs[q])
                    )
            for ordinal, label in self.faults.in_range(
                FaultClass.CROSSING, start, len(exposed)
            ).items():
                self._inject(label, (exposed[ordinal - start],))
                self.realized[FaultClass.CROSSING] += 1
                self.applied[(FaultClass.CROSSING, ordinal)] = label

    def elapse(self, seconds: float, counter: str = ""):
        self.tally.fixed_elapsed += seconds
        if counter:
            setattr(self.tally, counter, getattr(self.tally, counter) + 1)

    # -- noiseless helpers ----------------------------------------------------

    def ideal_gate(self, gate: GateOp):
        self.state.apply_gate(gate)

    def ideal_measure(self, observable: PauliString, forced: Optional[int] = None) -> int:
        return self.state.measure(observable, self.rng, forced=forced, record=False)

    def ideal_pauli(self, pauli: PauliString):
        self.state.apply_pauli(pauli)

    def correct(self, correction: PauliString, reason: str = ""):
        """Adds a correction to the Pauli frame"""
        if not correction.is_identity():
            self._trace(f"frame {correction} {reason}".rstrip())
        self.frame.add(correction)

    def observed(self, observable: PauliString, raw_outcome: int) -> int:
        """A raw outcome of ``observable`` seen through the Pauli frame"""
        return self.frame.adjust(observable, raw_outcome)

    def result(self, payload: Any = None) -> ExecutionResult:
        realized = tuple(self.realized[c] for c in FAULT_CLASSES)
        return ExecutionResult(
            outcomes=list(self.outcomes),
            frame=self.frame,
            tally=self.tally,
            realized_weights=realized,
            skipped={},
            flags=dict(self.flags),
            result=payload,
        )


@dataclass(frozen=True)
class DynamicCircuit:
    """
    A branching circuit given as a program over an execution context

    The program emits primitives through the context and may branch on the
    outcomes it has already seen. It returns the protocol payload, typically
    a logical verdict.
    """

    name: str
    n_qubits: int
    program: Callable[[ExecutionContext], Any]
    params: NoiseParams = field(default_factory=NoiseParams)

    def dump(self) -> str:
        """Line-oriented text of the error-free path"""
        ctx = ExecutionContext(self.n_qubits, trace=True)
        self.program(ctx)
        return "\n".join(ctx.trace_lines) + "\n"


@dataclass(frozen=True)
class Census:
    locations: Dict[FaultClass, Tuple[FaultLocation, ...]]
    tally: ResourceTally

    @property
    def counts(self) -> Tuple[int, ...]:
        return tuple(len(self.locations[c]) for c in FAULT_CLASSES)

    def count(self, fault_class: FaultClass) -> int:
        return len(self.locations[FaultClass(fault_class)])

    def as_dict(self) -> Dict[str, int]:
        return {c.value: len(self.locations[c]) for c in FAULT_CLASSES}


def enumerate_locations(circuit: DynamicCircuit, seed: int = 0) -> Census:
    """Fault locations along the error-free path, by class"""
    ctx = ExecutionContext(
        circuit.n_qubits, rng=np.random.default_rng(seed), record_locations=True
    )
    circuit.program(ctx)
    census = Census({c: tuple(ctx.locations[c]) for c in FAULT_CLASSES}, ctx.tally)
    logger.debug("Census of %s: %s", circuit.name, census.as_dict())
    return census


def execute(
    circuit: DynamicCircuit,
    assignment: Optional[Dict[FaultKey, str]] = None,
    rng: Optional[np.random.Generator] = None,
    state: Optional[StabilizerState] = None,
    faults: Optional[FaultSource] = None,
    inline_frame: bool = False,
) -> ExecutionResult:
    """
    Runs one shot

    ``assignment`` maps (class, ordinal) to a Pauli label. Assigned ordinals
    that the executed branch never reaches are returned in ``skipped``.
    """
    if faults is None:
        faults = AssignedFaults(assignment)
        for (fault_class, _), label in faults.assignment.items():
            if not label or set(label) - set(PAULI_BITS):
                raise ValueError(f"Invalid {fault_class.value} error {label!r}")
    ctx = ExecutionContext(
        circuit.n_qubits, faults=faults, rng=rng, state=state, inline_frame=inline_frame
    )
    payload = circuit.program(ctx)
    result = ctx.result(payload)
    if isinstance(faults, AssignedFaults):
        result.skipped = {
            key: label for key, label in faults.assignment.items() if key not in ctx.applied
        }
    return result
