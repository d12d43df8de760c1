import functools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .circuit import (
    DynamicCircuit,
    ExecutionContext,
    FaultLocation,
    ResourceTally,
    enumerate_locations,
    execute,
)
from .color_code import (
    CodeBlock,
    DecoderVerdict,
    LogicalVerdict,
    Syndrome,
    conjugate_basis,
    decode,
    decode_flagged,
    decode_unflagged,
    ideal_qec_verdict,
    joint_decode_shared,
)
from .constants import (
    CROSSING_PER_ION,
    FIVE_QUBIT_SUBSAMPLE,
    LOGICAL_EDGES,
    MERGE_XX_COLLAPSED,
    MERGE_ZZ_COLLAPSED,
    PLAQUETTES,
    PROTOCOL_FLAG_QEC,
    PROTOCOL_LATTICE_SURGERY,
    PROTOCOL_TRANSVERSAL,
    PROTOCOLS,
    STABILIZER_ORDER,
)
from .exceptions import ConfigError
from .noise import SUPPORTS, FaultClass, NoiseParams
from .pauli import PauliString, nontrivial_paulis
from .schedule import (
    MERGE_GEOMETRY,
    CompiledSchedule,
    Schedule,
    builtin_schedules,
    compile_schedule,
    merge_schedule,
    protocol_register,
    readout_schedule,
    remeasure_schedule,
)
from .tableau import GateKind, GateOp, ry
from .util import derive_rng, logger

LOW_RESOURCE = "low_resource"
COLLAPSED = {"X": MERGE_XX_COLLAPSED, "Z": MERGE_ZZ_COLLAPSED}
TRANSVERSAL_LAYOUTS = (PROTOCOL_TRANSVERSAL, "transversal-compact")

CheckKey = Tuple[str, str, int]


def coupling_sign(n_couplings: int) -> int:
    """
    Sign between a bare readout ion's outcome and the parity it measured

    Each MS2 coupling turns the readout Z into Y and back, picking up -1
    every second pair of couplings.
    """
    return -1 if (n_couplings // 2) % 2 else 1


@dataclass(frozen=True)
class ProtocolOptions:
    """
    ``drop_tags`` removes tagged schedule steps (f-2 breaks the flag window)
    """

    accounting: str = CROSSING_PER_ION
    drop_tags: Tuple[str, ...] = ()
    transversal_layout: str = PROTOCOL_TRANSVERSAL

    def __post_init__(self):
        object.__setattr__(self, "drop_tags", tuple(self.drop_tags))
        if self.transversal_layout not in TRANSVERSAL_LAYOUTS:
            raise ConfigError(
                f"Unknown transversal layout {self.transversal_layout!r}, "
                f"expected one of {TRANSVERSAL_LAYOUTS}"
            )


@dataclass(frozen=True)
class Readout:
    block: str
    basis: str
    plaquette: int
    value: int
    # +1 when the flag did not trigger or the readout had no flag
    flag: int = 1

    @property
    def triggered(self) -> bool:
        return self.value == -1 or self.flag == -1


class ProtocolRun:
    """
    One shot of a protocol: the execution context plus the blocks it acts on

    The low-resource switch lives in the context flags so it is monotone.
    """

    def __init__(self, protocol: "Protocol", ctx: ExecutionContext):
        self.protocol = protocol
        self.ctx = ctx
        self.n = ctx.n_qubits
        self.blocks = protocol.blocks

    @property
    def frame(self):
        return self.ctx.frame

    @property
    def low_resource(self) -> bool:
        return self.ctx.flag(LOW_RESOURCE)

    def switch_low_resource(self, reason: str):
        if not self.low_resource:
            self.ctx.note(f"low-resource switch: {reason}")
        self.ctx.set_flag(LOW_RESOURCE)

    def play(self, compiled: CompiledSchedule) -> Dict[str, int]:
        return compiled.play(self.ctx)

    def prepare(self, block: str, state: str):
        """Noiseless preparation of |0>_L or |+>_L"""
        code = self.blocks[block]
        if state == "+":
            for q in code.qubits:
                self.ctx.ideal_gate(ry(q, 1))
        projected = "X" if state == "0" else "Z"
        for p in range(len(PLAQUETTES)):
            self.ctx.ideal_measure(code.stabilizer(projected, p, self.n), forced=1)

    def read(self, block: str, basis: str, p: int, flagged: bool = True) -> Readout:
        raw = self.play(self.protocol.readout(block, basis, p, flagged))
        stabilizer = self.blocks[block].stabilizer(basis, p, self.n)
        value = self.ctx.observed(stabilizer, raw["syndrome"])
        return Readout(block, basis, p, value, raw.get("flag", 1))

    def check_round(
        self,
        checks: Sequence[CheckKey],
        flagged: bool,
        stop: Optional[Callable[[CheckKey, Dict[CheckKey, Readout]], bool]] = None,
    ) -> Tuple[Dict[CheckKey, Readout], Optional[CheckKey]]:
        """Reads checks in order until ``stop`` fires; returns readouts and the stopping check"""
        readouts: Dict[CheckKey, Readout] = {}
        for key in checks:
            readouts[key] = self.read(*key, flagged=flagged)
            if stop is not None and stop(key, readouts):
                return readouts, key
        return readouts, None

    def apply(self, block: str, verdict: DecoderVerdict, reason: str = ""):
        self.ctx.correct(self.blocks[block].embed(verdict.correction, self.n), reason)

    def bell_verdict(self, first: str, second: str) -> LogicalVerdict:
        a, b = self.blocks[first], self.blocks[second]
        expected = [
            ("X", a.logical("Z", self.n) * b.logical("Z", self.n)),
            ("Z", a.logical("X", self.n) * b.logical("X", self.n)),
        ]
        return ideal_qec_verdict(self.ctx.state, [a, b], self.ctx.frame, expected)


def syndrome_of(readouts: Dict[CheckKey, Readout], block: str, basis: str) -> Tuple[int, ...]:
    return tuple(readouts[(block, basis, p)].value for p in range(len(PLAQUETTES)))


def _all_checks(block: str, basis: str) -> List[CheckKey]:
    return [(block, basis, p) for p in range(len(PLAQUETTES))]


class Protocol:
    """
    A protocol bound to one set of noise parameters

    Compiled schedule fragments are cached per instance. The instance is
    the program of its DynamicCircuit, so it must stay picklable for the
    worker pool.
    """

    name = ""
    block_qubits: Dict[str, Tuple[int, ...]] = {}

    def __init__(self, params: Optional[NoiseParams] = None, options: Optional[ProtocolOptions] = None):
        self.params = params or NoiseParams()
        self.options = options or ProtocolOptions()
        self.register = protocol_register(self.name)
        self.n_qubits = self.register.n_qubits
        self.blocks = {name: CodeBlock(name, qubits) for name, qubits in self.block_qubits.items()}
        self._compiled: Dict[str, CompiledSchedule] = {}

    def compiled(self, key, build: Callable[[], Schedule]) -> CompiledSchedule:
        """Compiles the schedule made by ``build`` once per key"""
        if key not in self._compiled:
            self._compiled[key] = compile_schedule(
                build().without_tags(self.options.drop_tags),
                self.params,
                self.register,
                self.options.accounting,
            )
        return self._compiled[key]

    def builtin(self, name: str) -> CompiledSchedule:
        return self.compiled(name, lambda: builtin_schedules()[name])

    def readout(self, block: str, basis: str, p: int, flagged: bool) -> CompiledSchedule:
        return self.compiled(
            ("readout", block, basis, p, flagged),
            lambda: readout_schedule(self.register, block, basis, p, flagged),
        )

    def merge_module(self, basis: str, module: str) -> CompiledSchedule:
        return self.compiled(
            ("merge", basis, module),
            lambda: merge_schedule(self.register, basis).module(module),
        )

    def remeasure(self, basis: str, which: str) -> CompiledSchedule:
        return self.compiled(
            ("remeasure", basis, which),
            lambda: remeasure_schedule(self.register, basis, which),
        )

    def circuit(self) -> DynamicCircuit:
        return DynamicCircuit(self.name, self.n_qubits, self, self.params)

    def __call__(self, ctx: ExecutionContext) -> LogicalVerdict:
        return self.run(ProtocolRun(self, ctx))

    def run(self, run: ProtocolRun) -> LogicalVerdict:
        raise NotImplementedError


class FlagQecCycle(Protocol):
    """
    One flag-based error-correction cycle on a block entangled with a
    noiseless reference block
    """

    name = PROTOCOL_FLAG_QEC
    block_qubits = {"control": tuple(range(7)), "reference": tuple(range(7, 14))}

    def run(self, run: ProtocolRun) -> LogicalVerdict:
        ctx = run.ctx
        run.prepare("control", "+")
        run.prepare("reference", "0")
        for c, r in zip(run.blocks["control"].qubits, run.blocks["reference"].qubits):
            ctx.ideal_gate(GateOp(GateKind.CNOT, (c, r)))

        trigger = None
        for basis, p in STABILIZER_ORDER:
            readout = run.read("control", basis, p, flagged=True)
            if readout.triggered:
                trigger = readout
                break

        if trigger is not None:
            run.switch_low_resource(f"{trigger.basis}{trigger.plaquette + 1} flag={trigger.flag} value={trigger.value}")
            with ctx.conditional(LOW_RESOURCE):
                checks = [("control", basis, p) for basis, p in STABILIZER_ORDER]
                readouts, _ = run.check_round(checks, flagged=False)
                hook_basis = conjugate_basis(trigger.basis)
                hook = decode(
                    Syndrome(
                        hook_basis,
                        syndrome_of(readouts, "control", hook_basis),
                        trigger.flag,
                        trigger.plaquette,
                    )
                )
                direct = decode_unflagged(
                    Syndrome(trigger.basis, syndrome_of(readouts, "control", trigger.basis))
                )
                run.apply("control", hook, "flagged decode")
                run.apply("control", direct, "unflagged decode")
        return run.bell_verdict("control", "reference")


class TransversalCnot(Protocol):
    name = PROTOCOL_TRANSVERSAL
    block_qubits = {"control": tuple(range(7)), "target": tuple(range(7, 14))}

    def run(self, run: ProtocolRun) -> LogicalVerdict:
        run.prepare("control", "+")
        run.prepare("target", "0")
        run.play(self.builtin(self.options.transversal_layout))
        return run.bell_verdict("control", "target")


@dataclass
class MergeOutcome:
    basis: str
    parity: int
    boundary: Dict[str, int]
    repeats: Dict[str, int]
    collapsed_sign: int = 1
    # Flagged plaquette per block whose hook is left to a later decode
    hook_flags: Dict[str, int] = field(default_factory=dict)


def _boundary_pauli(run: ProtocolRun, basis: str, which: str) -> PauliString:
    geometry = MERGE_GEOMETRY[basis]
    qubits = geometry.weight2 if which == "weight2" else geometry.weight4
    moving = run.blocks[geometry.moving_block].pauli(qubits, basis, run.n)
    staying = run.blocks[geometry.staying_block].pauli(qubits, basis, run.n)
    return moving * staying


def _boundary_once(run: ProtocolRun, basis: str, which: str, compiled: CompiledSchedule) -> int:
    raw = run.play(compiled)["boundary"]
    pauli = _boundary_pauli(run, basis, which)
    return run.ctx.observed(pauli, raw * coupling_sign(pauli.weight))


def _measure_boundary(run: ProtocolRun, basis: str, which: str) -> Tuple[int, int]:
    """
    Measures a boundary operator twice, or a third time when the two
    disagree; once only in low-resource mode
    """
    compiled = run.protocol.merge_module(basis, which)
    repeats = 1 if run.low_resource else 2
    values = [_boundary_once(run, basis, which, compiled) for _ in range(repeats)]
    if repeats == 2 and values[0] != values[1]:
        run.switch_low_resource(f"{basis}{basis} {which} outcomes disagree")
        with run.ctx.conditional("disagree"):
            values.append(_boundary_once(run, basis, which, compiled))
    return values[-1], len(values)


def _merged_qec(run: ProtocolRun, basis: str) -> Tuple[Dict[str, DecoderVerdict], Optional[Tuple[str, int]]]:
    """Same-basis checks of both merged blocks; returns corrections and a triggered flag"""
    geometry = MERGE_GEOMETRY[basis]
    blocks = (geometry.moving_block, geometry.staying_block)
    checks = [key for block in blocks for key in _all_checks(block, basis)]
    flag = None
    if run.low_resource:
        readouts, _ = run.check_round(checks, flagged=False)
    else:
        readouts, hit = run.check_round(checks, flagged=True, stop=lambda k, r: r[k].triggered)
        if hit is not None:
            if readouts[hit].flag == -1:
                flag = (hit[0], hit[2])
            run.switch_low_resource(f"merged check {hit}")
            with run.ctx.conditional(LOW_RESOURCE):
                readouts, _ = run.check_round(checks, flagged=False)
    corrections = {
        block: decode_unflagged(Syndrome(basis, syndrome_of(readouts, block, basis)))
        for block in blocks
    }
    return corrections, flag


def _case_correction(
    run: ProtocolRun,
    basis: str,
    block: str,
    verdict: DecoderVerdict,
    outcome: MergeOutcome,
) -> DecoderVerdict:
    """
    Traditional or alternative correction of a data error on a boundary qubit

    When the recorded boundary outcome already includes the error, the
    correction is completed with the block's logical representative on the
    merged edge so that the state matches the recorded outcome.
    """
    geometry = MERGE_GEOMETRY[basis]
    for which, qubits in (("weight2", geometry.weight2), ("weight4", geometry.weight4)):
        if not verdict.qubits & set(qubits):
            continue
        repeats = outcome.repeats[which]
        if repeats == 3:
            alternative = True
        elif repeats == 2:
            compiled = run.protocol.remeasure(basis, which)
            with run.ctx.conditional(f"boundary error on {block}"):
                again = _boundary_once(run, basis, which, compiled)
            alternative = again == outcome.boundary[which]
        else:
            alternative = False
        if not alternative:
            return verdict
        edge = run.blocks[block].layout.logical_edges[geometry.edge]
        run.ctx.note(f"alternative correction on {block} edge {geometry.edge}")
        logical = PauliString.on_qubits(run.blocks[block].layout.n_data, edge, conjugate_basis(basis))
        return DecoderVerdict(
            (verdict.correction * logical).unsigned(), verdict.classified_as, verdict.qubits
        )
    return verdict


def _split(run: ProtocolRun, basis: str, merge_flag: Optional[Tuple[str, int]], outcome: MergeOutcome):
    geometry = MERGE_GEOMETRY[basis]
    other = conjugate_basis(basis)
    collapsed = COLLAPSED[basis]
    blocks = (geometry.moving_block, geometry.staying_block)
    checks = [key for block in blocks for key in _all_checks(block, other)]
    pair = [(block, other, collapsed) for block in blocks]

    def error_seen(key, readouts):
        readout = readouts[key]
        if readout.flag == -1:
            return True
        if key[2] != collapsed:
            return readout.value == -1
        if all(k in readouts for k in pair):
            return readouts[pair[0]].value != readouts[pair[1]].value
        return False

    split_flag = None
    if run.low_resource:
        readouts, _ = run.check_round(checks, flagged=False)
    else:
        readouts, hit = run.check_round(checks, flagged=True, stop=error_seen)
        if hit is not None:
            if readouts[hit].flag == -1:
                split_flag = (hit[0], hit[2])
            run.switch_low_resource(f"split check {hit}")
            with run.ctx.conditional(LOW_RESOURCE):
                readouts, _ = run.check_round(checks, flagged=False)

    if split_flag is not None:
        block, p = split_flag
        if basis == "Z" and block == geometry.staying_block:
            # The ancilla is read out next, its final decode takes the flag
            outcome.hook_flags[block] = p
        else:
            with run.ctx.conditional("hook detection"):
                hooks, _ = run.check_round(_all_checks(block, basis), flagged=False)
            verdict = decode_flagged(Syndrome(basis, syndrome_of(hooks, block, basis), -1, p))
            run.apply(block, verdict, "hook detection")

    syndromes = []
    for block in blocks:
        flag, plaquette = (-1, merge_flag[1]) if merge_flag and merge_flag[0] == block else (None, None)
        syndromes.append(Syndrome(other, syndrome_of(readouts, block, other), flag, plaquette))
    shared = joint_decode_shared(syndromes[0], syndromes[1], collapsed)
    for block, verdict in zip(blocks, shared.corrections):
        run.apply(block, verdict, "split decode")
    outcome.collapsed_sign = shared.collapsed_sign
    if shared.collapsed_sign == -1:
        run.ctx.correct(_boundary_pauli(run, basis, "weight2"), "collapsed pair fix")


def merge_joint(run: ProtocolRun, basis: str) -> MergeOutcome:
    """
    Joint logical measurement of two blocks by merging and splitting

    basis X joins ancilla and target, basis Z joins control and ancilla.
    """
    geometry = MERGE_GEOMETRY[basis]
    run.play(run.protocol.merge_module(basis, "out"))
    boundary, repeats = {}, {}
    for which in ("weight2", "weight4"):
        boundary[which], repeats[which] = _measure_boundary(run, basis, which)
    run.play(run.protocol.merge_module(basis, "back"))
    outcome = MergeOutcome(basis, boundary["weight2"] * boundary["weight4"], boundary, repeats)

    corrections, merge_flag = _merged_qec(run, basis)
    for block in (geometry.moving_block, geometry.staying_block):
        verdict = corrections[block]
        if verdict.qubits:
            verdict = _case_correction(run, basis, block, verdict, outcome)
        run.apply(block, verdict, "merged decode")

    _split(run, basis, merge_flag, outcome)
    run.frame.record_parity(f"{basis}{basis}", outcome.parity)
    return outcome


class LatticeSurgeryCnot(Protocol):
    name = PROTOCOL_LATTICE_SURGERY
    block_qubits = {
        "control": tuple(range(7)),
        "target": tuple(range(7, 14)),
        "ancilla": tuple(range(14, 21)),
    }

    def prepare_ancilla(self, run: ProtocolRun):
        """Noisy |0> on all seven ancilla ions projected by one round of X checks"""
        run.play(self.builtin("ancilla-prep"))
        readouts, hit = run.check_round(
            _all_checks("ancilla", "X"), flagged=True, stop=lambda k, r: r[k].flag == -1
        )
        if hit is None:
            run.apply("ancilla", decode_unflagged(Syndrome("X", syndrome_of(readouts, "ancilla", "X"))), "projection")
            return
        run.switch_low_resource(f"flag during ancilla preparation {hit}")
        with run.ctx.conditional(LOW_RESOURCE):
            checks = [("ancilla", basis, p) for basis, p in STABILIZER_ORDER]
            again, _ = run.check_round(checks, flagged=False)
        run.apply("ancilla", decode_unflagged(Syndrome("X", syndrome_of(again, "ancilla", "X"))), "projection")
        run.apply("ancilla", decode_flagged(Syndrome("Z", syndrome_of(again, "ancilla", "Z"), -1, hit[2])), "flagged decode")

    def measure_ancilla(self, run: ProtocolRun, flagged_plaquette: Optional[int]) -> int:
        """Transversal X readout of the ancilla, decoded classically"""
        raw = run.play(self.builtin("ancilla-readout"))
        code = run.blocks["ancilla"]
        x = [
            run.ctx.observed(code.pauli([k], "X", run.n), raw[f"m{k}"])
            for k in range(len(code.qubits))
        ]
        r = tuple(int(np.prod([x[q] for q in support])) for support in PLAQUETTES)
        if flagged_plaquette is None:
            syndrome = Syndrome("X", r)
        else:
            syndrome = Syndrome("X", r, -1, flagged_plaquette)
        for q in decode(syndrome).qubits:
            x[q] = -x[q]
        return int(np.prod([x[q] for q in LOGICAL_EDGES[0]]))

    def run(self, run: ProtocolRun) -> LogicalVerdict:
        run.prepare("control", "+")
        run.prepare("target", "0")
        self.prepare_ancilla(run)
        xx = merge_joint(run, "X")
        zz = merge_joint(run, "Z")
        eps3 = self.measure_ancilla(run, zz.hook_flags.get("ancilla"))
        run.frame.record_parity("X", eps3)
        if xx.parity * eps3 == -1:
            run.ctx.correct(run.blocks["control"].logical("Z", run.n), "eps1*eps3")
        if zz.parity == -1:
            run.ctx.correct(run.blocks["target"].logical("X", run.n), "eps2")
        return run.bell_verdict("control", "target")


PROTOCOL_CLASSES = {
    PROTOCOL_FLAG_QEC: FlagQecCycle,
    PROTOCOL_TRANSVERSAL: TransversalCnot,
    PROTOCOL_LATTICE_SURGERY: LatticeSurgeryCnot,
}


def build_circuit(
    protocol: str, params: Optional[NoiseParams] = None, options: Optional[ProtocolOptions] = None
) -> DynamicCircuit:
    try:
        cls = PROTOCOL_CLASSES[protocol]
    except KeyError:
        raise ConfigError(f"Unknown protocol {protocol!r}, expected one of {PROTOCOLS}")
    return cls(params, options).circuit()


def flag_qec_cycle(params=None, options=None) -> DynamicCircuit:
    return build_circuit(PROTOCOL_FLAG_QEC, params, options)


def transversal_cnot(params=None, options=None) -> DynamicCircuit:
    return build_circuit(PROTOCOL_TRANSVERSAL, params, options)


def lattice_surgery_cnot(params=None, options=None) -> DynamicCircuit:
    return build_circuit(PROTOCOL_LATTICE_SURGERY, params, options)


@dataclass(frozen=True)
class BellOutcome:
    x_failure: bool
    z_failure: bool
    tally: ResourceTally


def bell_pair_experiment(
    protocol: str,
    params: Optional[NoiseParams] = None,
    assignment=None,
    rng: Optional[np.random.Generator] = None,
    options: Optional[ProtocolOptions] = None,
) -> BellOutcome:
    """One shot from ideal inputs with the given faults, scored against the Bell stabilizers"""
    circuit = build_circuit(protocol, params, options)
    result = execute(circuit, assignment, rng=rng)
    verdict = result.result
    return BellOutcome(verdict.x_failure, verdict.z_failure, result.tally)


# -- exhaustive single-fault verification ---------------------------------------


@dataclass(frozen=True)
class FtFailure:
    location: FaultLocation
    pauli: str
    x_failure: bool
    z_failure: bool

    def __str__(self):
        kinds = "".join(k for k, hit in (("X", self.x_failure), ("Z", self.z_failure)) if hit)
        return (
            f"{self.location.fault_class.value}#{self.location.ordinal} "
            f"on {self.location.targets} ({self.location.node}) {self.pauli} -> {kinds} failure"
        )


@dataclass(frozen=True)
class FtReport:
    protocol: str
    checked: int
    failures: Tuple[FtFailure, ...]

    @property
    def passed(self) -> bool:
        return not self.failures


def _five_qubit_paulis(rng: np.random.Generator, sample: int) -> Tuple[str, ...]:
    """All weight-1 and weight-2 five-qubit Paulis plus a uniform sample of the rest"""
    everything = nontrivial_paulis(5)
    low = [p for p in everything if sum(c != "I" for c in p) <= 2]
    rest = [p for p in everything if sum(c != "I" for c in p) > 2]
    picked = rng.choice(len(rest), size=min(sample, len(rest)), replace=False)
    return tuple(low) + tuple(rest[i] for i in sorted(picked))


def single_faults(circuit: DynamicCircuit, seed: int = 0, five_qubit_sample: int = FIVE_QUBIT_SUBSAMPLE):
    """
    Every single-fault configuration of the error-free path

    Dephasing locations (idle, crossing) on one qubit with no operation on
    that qubit in between are interchangeable, only the first is kept.
    """
    census = enumerate_locations(circuit, seed)
    rng = derive_rng(seed, 5)
    faults = []
    for fault_class, locations in census.locations.items():
        seen = set()
        for location in locations:
            if fault_class in (FaultClass.IDLE, FaultClass.CROSSING):
                key = (location.targets[0], location.epoch)
                if key in seen:
                    continue
                seen.add(key)
            if fault_class == FaultClass.FIVE_QUBIT:
                paulis = _five_qubit_paulis(rng, five_qubit_sample)
            else:
                paulis = SUPPORTS[fault_class]
            faults.extend((location, pauli) for pauli in paulis)
    return faults


def _check_fault(circuit: DynamicCircuit, seed: int, task) -> Optional[FtFailure]:
    index, (location, pauli) = task
    result = execute(
        circuit,
        {(location.fault_class, location.ordinal): pauli},
        rng=derive_rng(seed, 1, index),
    )
    verdict = result.result
    if verdict.x_failure or verdict.z_failure:
        return FtFailure(location, pauli, verdict.x_failure, verdict.z_failure)
    return None


def verify_ft(
    protocol: str,
    params: Optional[NoiseParams] = None,
    options: Optional[ProtocolOptions] = None,
    seed: int = 0,
    workers: int = 1,
    five_qubit_sample: int = FIVE_QUBIT_SUBSAMPLE,
) -> FtReport:
    """Injects every single fault of the protocol and collects logical failures"""
    circuit = build_circuit(protocol, params, options)
    faults = single_faults(circuit, seed, five_qubit_sample)
    logger.info("Checking %d single faults of %s", len(faults), protocol)
    check = functools.partial(_check_fault, circuit, seed)
    tasks = list(enumerate(faults))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(check, tasks, chunksize=64))
    else:
        results = [check(task) for task in tasks]
    failures = tuple(f for f in results if f is not None)
    for failure in failures:
        logger.debug("FT violation: %s", failure)
    return FtReport(protocol, len(faults), failures)
