import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .circuit import DynamicCircuit, ExecutionContext, ResourceTally
from .constants import (
    CROSSING_ACCOUNTING,
    CROSSING_PER_ION,
    LOGICAL_EDGES,
    MERGE_XX_EDGE,
    MERGE_XX_WEIGHT2,
    MERGE_XX_WEIGHT4,
    MERGE_ZZ_EDGE,
    MERGE_ZZ_WEIGHT2,
    MERGE_ZZ_WEIGHT4,
    PLAQUETTES,
    PROTOCOL_FLAG_QEC,
    PROTOCOL_LATTICE_SURGERY,
    PROTOCOL_TRANSVERSAL,
    PROTOCOLS,
)
from .exceptions import ConfigError, ScheduleViolation
from .noise import NoiseParams
from .tableau import GateKind, GateOp
from .util import ceil_quanta, logger

ARMS = ("control", "ancilla", "target")
STORAGE_ZONES = ("S1", "S2", "S3")
MANIPULATION_ZONES = ("M1", "M2")
STORAGE_CAPACITY = 4
MANIPULATION_CAPACITY = 8

ROLES = ("data", "flag", "syndrome", "cooling")

STEP_KINDS = (
    "split",
    "merge",
    "shuttle",
    "rotate",
    "jcross",
    "cool",
    "gate",
    "measure",
    "reset",
    "idle",
)
# Steps that change the ion configuration and invalidate a previous cool
REORDER_KINDS = ("split", "merge", "shuttle", "rotate", "jcross")

STEP_DURATIONS = {
    "split": "split_merge",
    "merge": "split_merge",
    "shuttle": "shuttle",
    "rotate": "rotate",
    "cool": "cool",
    "measure": "measure",
    "reset": "reset",
}
GATE_DURATIONS = {
    GateKind.RX: "one_qubit",
    GateKind.RY: "one_qubit",
    GateKind.RZ: "one_qubit",
    GateKind.MS2: "ms2",
    GateKind.MS5: "ms5",
}
STEP_COUNTERS = {
    "split": "reorder_steps",
    "merge": "reorder_steps",
    "shuttle": "reorder_steps",
    "rotate": "reorder_steps",
    "cool": "cool_steps",
}

# Home zones of the seven data ions of a block
DATA_HOME = ("S1", "S1", "S1", "S1", "S2", "S2", "S2")
# Crossed-in ions wait here in the foreign arm
FOREIGN_ZONE = "S3"
# Tags of the two syndrome-flag couplings of a flagged readout
FLAG_TAGS = ("f-1", "f-2")


def zone_key(arm: str, zone: str) -> str:
    return f"{arm}:{zone}"


def split_zone(key: str) -> Tuple[str, str]:
    arm, _, zone = key.partition(":")
    return arm, zone


@dataclass(frozen=True)
class TrapLayout:
    """Arms of storage and manipulation zones joined by one Y-junction"""

    arms: Tuple[str, ...] = ARMS
    storage_capacity: int = STORAGE_CAPACITY
    manipulation_capacity: int = MANIPULATION_CAPACITY
    junctions: FrozenSet[FrozenSet[str]] = field(
        default_factory=lambda: frozenset(
            frozenset(pair) for pair in itertools.combinations(ARMS, 2)
        )
    )

    def has_zone(self, key: str) -> bool:
        arm, zone = split_zone(key)
        return arm in self.arms and zone in STORAGE_ZONES + MANIPULATION_ZONES

    def capacity(self, key: str) -> int:
        _, zone = split_zone(key)
        if zone in MANIPULATION_ZONES:
            return self.manipulation_capacity
        return self.storage_capacity

    def is_manipulation(self, key: str) -> bool:
        return split_zone(key)[1] in MANIPULATION_ZONES

    def adjacent(self, arm_a: str, arm_b: str) -> bool:
        return frozenset((arm_a, arm_b)) in self.junctions


@dataclass(frozen=True)
class Ion:
    name: str
    role: str
    block: str
    arm: str
    zone: str
    qubit: Optional[int] = None

    @property
    def home(self) -> str:
        return zone_key(self.arm, self.zone)


@dataclass(frozen=True)
class IonRegister:
    """
    The ions of one protocol and their initial zones

    Qubit indices refer to the simulated register, which may hold extra
    noiseless reference qubits that no ion carries.
    """

    name: str
    ions: Tuple[Ion, ...]
    n_qubits: int

    def __post_init__(self):
        names = [ion.name for ion in self.ions]
        if len(set(names)) != len(names):
            raise ConfigError(f"Duplicate ion names in register {self.name}")
        for ion in self.ions:
            if ion.role not in ROLES:
                raise ConfigError(f"Unknown ion role {ion.role!r} for {ion.name}")
            if (ion.role == "cooling") != (ion.qubit is None):
                raise ConfigError(f"Only cooling ions carry no qubit, check {ion.name}")
        qubits = self.qubits
        if len(set(qubits)) != len(qubits) or any(not 0 <= q < self.n_qubits for q in qubits):
            raise ConfigError(f"Invalid qubit assignment in register {self.name}")
        object.__setattr__(self, "_by_name", {ion.name: ion for ion in self.ions})

    def ion(self, name: str) -> Ion:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"No ion {name!r} in register {self.name}")

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def qubit(self, name: str) -> int:
        ion = self.ion(name)
        if ion.qubit is None:
            raise ScheduleViolation(f"Cooling ion {name} carries no qubit")
        return ion.qubit

    @property
    def qubits(self) -> Tuple[int, ...]:
        return tuple(sorted(ion.qubit for ion in self.ions if ion.qubit is not None))

    def data_qubits(self, block: str) -> Tuple[int, ...]:
        return tuple(self.qubit(data_ion(block, k)) for k in range(len(DATA_HOME)))

    def blocks(self) -> Tuple[str, ...]:
        return tuple(dict.fromkeys(ion.block for ion in self.ions))


def data_ion(block: str, k: int) -> str:
    """Name of the data ion carrying zero-indexed code qubit k"""
    return f"{block}.d{k + 1}"


def block_ions(
    block: str,
    first_qubit: int,
    syndrome: Optional[int] = None,
    flag: Optional[int] = None,
    arm: Optional[str] = None,
) -> List[Ion]:
    arm = arm or block
    ions = [
        Ion(data_ion(block, k), "data", block, arm, zone, first_qubit + k)
        for k, zone in enumerate(DATA_HOME)
    ]
    if syndrome is not None:
        ions.append(Ion(f"{block}.s", "syndrome", block, arm, "M1", syndrome))
    if flag is not None:
        ions.append(Ion(f"{block}.f", "flag", block, arm, "M1", flag))
    ions.append(Ion(f"{block}.c", "cooling", block, arm, "M1"))
    return ions


def protocol_register(protocol: str) -> IonRegister:
    """
    Register of each protocol

    flag-qec: one block on qubits 0-6 with syndrome 14 and flag 15; qubits
    7-13 hold a noiseless reference block. transversal-cnot: control 0-6 and
    target 7-13. lattice-surgery-cnot: control 0-6, target 7-13, ancilla
    14-20, then syndrome and flag pairs of control, target and ancilla.
    """
    if protocol == PROTOCOL_FLAG_QEC:
        return IonRegister(protocol, tuple(block_ions("control", 0, 14, 15)), 16)
    if protocol == PROTOCOL_TRANSVERSAL:
        ions = block_ions("control", 0) + block_ions("target", 7)
        return IonRegister(protocol, tuple(ions), 14)
    if protocol == PROTOCOL_LATTICE_SURGERY:
        ions = (
            block_ions("control", 0, 21, 22)
            + block_ions("target", 7, 23, 24)
            + block_ions("ancilla", 14, 25, 26)
        )
        return IonRegister(protocol, tuple(ions), 27)
    raise ConfigError(f"Unknown protocol {protocol!r}, expected one of {PROTOCOLS}")


@dataclass(frozen=True)
class ScheduleStep:
    kind: str
    operands: Tuple[str, ...] = ()
    zone: str = ""
    gate: Optional[GateKind] = None
    angle: int = 1
    label: str = ""
    tag: str = ""
    seconds: float = 0.0

    def __post_init__(self):
        if self.kind not in STEP_KINDS:
            raise ScheduleViolation(f"Unknown step kind {self.kind!r}")
        object.__setattr__(self, "operands", tuple(self.operands))
        if self.kind == "gate":
            if self.gate is None:
                raise ScheduleViolation("Gate step without a gate")
            object.__setattr__(self, "gate", GateKind(self.gate))
        if self.kind in ("shuttle", "jcross", "cool") and not self.zone:
            raise ScheduleViolation(f"{self.kind} step needs a zone")

    def to_text(self) -> str:
        fields = [self.kind, ",".join(self.operands) or "-", self.zone or "-"]
        if self.gate is not None:
            fields += [f"gate={self.gate.value}", f"angle={self.angle}"]
        if self.label:
            fields.append(f"label={self.label}")
        if self.tag:
            fields.append(f"tag={self.tag}")
        if self.seconds:
            fields.append(f"seconds={self.seconds!r}")
        return " ".join(fields)

    @classmethod
    def from_text(cls, line: str) -> "ScheduleStep":
        tokens = line.split()
        if len(tokens) < 3:
            raise ScheduleViolation(f"Malformed schedule line {line!r}")
        kind, operands, zone = tokens[:3]
        options = {}
        for token in tokens[3:]:
            key, sep, value = token.partition("=")
            if not sep:
                raise ScheduleViolation(f"Malformed option {token!r} in {line!r}")
            options[key] = value
        return cls(
            kind=kind,
            operands=() if operands == "-" else tuple(operands.split(",")),
            zone="" if zone == "-" else zone,
            gate=GateKind(options["gate"]) if "gate" in options else None,
            angle=int(options.get("angle", 1)),
            label=options.get("label", ""),
            tag=options.get("tag", ""),
            seconds=float(options.get("seconds", 0.0)),
        )


@dataclass(frozen=True)
class Schedule:
    """
    A named step sequence grouped into consecutive modules

    ``start`` places ions away from their register home zones when the
    schedule begins, as for a readout in the middle of a joint measurement.
    """

    name: str
    register: str
    steps: Tuple[ScheduleStep, ...]
    # (module name, index of its first step)
    modules: Tuple[Tuple[str, int], ...] = ()
    start: Tuple[Tuple[str, str], ...] = ()

    @classmethod
    def from_modules(
        cls,
        name: str,
        register: str,
        modules: Sequence[Tuple[str, Sequence[ScheduleStep]]],
        start: Iterable[Tuple[str, str]] = (),
    ) -> "Schedule":
        steps: List[ScheduleStep] = []
        starts = []
        for module, module_steps in modules:
            starts.append((module, len(steps)))
            steps.extend(module_steps)
        return cls(name, register, tuple(steps), tuple(starts), tuple(start))

    def placements_before(self, index: int) -> Dict[str, str]:
        """Ions moved away from home by the start placement and steps[:index]"""
        moved = dict(self.start)
        for step in self.steps[:index]:
            if step.kind in ("shuttle", "jcross"):
                moved.update({name: step.zone for name in step.operands})
        return moved

    def __len__(self):
        return len(self.steps)

    @property
    def module_names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.modules)

    def _bounds(self):
        starts = list(self.modules) or [("main", 0)]
        for (name, start), (_, stop) in zip(starts, starts[1:] + [("", len(self.steps))]):
            yield name, start, stop

    def module(self, name: str) -> "Schedule":
        for module, start, stop in self._bounds():
            if module == name:
                return Schedule(
                    f"{self.name}/{name}",
                    self.register,
                    self.steps[start:stop],
                    ((name, 0),),
                    tuple(sorted(self.placements_before(start).items())),
                )
        raise KeyError(f"No module {name!r} in schedule {self.name}")

    def without_tags(self, tags: Iterable[str]) -> "Schedule":
        """Drops every step carrying one of ``tags``, used to break schedules on purpose"""
        tags = set(tags)
        if not tags:
            return self
        return Schedule.from_modules(
            self.name,
            self.register,
            [
                (module, [s for s in self.steps[start:stop] if s.tag not in tags])
                for module, start, stop in self._bounds()
            ],
            self.start,
        )

    def to_text(self) -> str:
        lines = [f"schedule {self.name} register={self.register}"]
        if self.start:
            lines.append("start " + " ".join(f"{ion}={zone}" for ion, zone in self.start))
        for module, start, stop in self._bounds():
            lines.append(f"module {module}")
            lines.extend(step.to_text() for step in self.steps[start:stop])
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Schedule":
        name, register = "", ""
        start = []
        modules: List[Tuple[str, List[ScheduleStep]]] = []
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            head, _, rest = line.partition(" ")
            if head == "schedule":
                name, _, option = rest.partition(" ")
                register = option.partition("=")[2]
            elif head == "start":
                start.extend(tuple(token.split("=", 1)) for token in rest.split())
            elif head == "module":
                modules.append((rest.strip(), []))
            else:
                if not modules:
                    modules.append(("main", []))
                try:
                    modules[-1][1].append(ScheduleStep.from_text(line))
                except (ValueError, ScheduleViolation) as e:
                    raise ScheduleViolation(f"Line {number}: {e}")
        if not name or register not in PROTOCOLS:
            raise ScheduleViolation(
                "Schedule text must start with 'schedule <name> register=<protocol>'"
            )
        if any(len(pair) != 2 for pair in start):
            raise ScheduleViolation("Start placements must read ion=arm:zone")
        return cls.from_modules(name, register, modules, start)


def validate(
    schedule: Schedule,
    layout: Optional[TrapLayout] = None,
    register: Optional[IonRegister] = None,
) -> List[str]:
    """
    Checks a schedule against the trap and returns the violations found

    Rules: zone capacities, moves within an arm or across one junction,
    gates and readout only in manipulation zones, co-located operands, no
    qubit operation on a cooling ion, and a cool step in the crystal's zone
    since its last reconfiguration before every entangling gate.
    """
    layout = layout or TrapLayout()
    register = register or protocol_register(schedule.register)
    positions = {ion.name: ion.home for ion in register.ions}
    roles = {ion.name: ion.role for ion in register.ions}
    cooled = set()
    violations = []
    for name, key in schedule.start:
        if name not in positions or not layout.has_zone(key):
            violations.append(f"start: cannot place {name} in {key}")
        else:
            positions[name] = key

    for i, step in enumerate(schedule.steps):
        where = f"step {i} ({step.to_text()})"
        unknown = [name for name in step.operands if name not in positions]
        if unknown:
            violations.append(f"{where}: unknown ions {unknown}")
            continue
        here = {positions[name] for name in step.operands}

        if step.kind in ("shuttle", "jcross"):
            if not layout.has_zone(step.zone):
                violations.append(f"{where}: no zone {step.zone}")
                continue
            arm_to, _ = split_zone(step.zone)
            for name in step.operands:
                arm_from, _ = split_zone(positions[name])
                if step.kind == "shuttle" and arm_from != arm_to:
                    violations.append(f"{where}: {name} cannot shuttle from {arm_from} to {arm_to}")
                if step.kind == "jcross" and not layout.adjacent(arm_from, arm_to):
                    violations.append(f"{where}: {arm_from} and {arm_to} share no junction")
                positions[name] = step.zone
            cooled -= here | {step.zone}
            occupancy = sum(1 for key in positions.values() if key == step.zone)
            if occupancy > layout.capacity(step.zone):
                violations.append(
                    f"{where}: {occupancy} ions exceed capacity {layout.capacity(step.zone)}"
                )
        elif step.kind in ("split", "merge", "rotate"):
            if len(here) > 1:
                violations.append(f"{where}: operands are not co-located")
            cooled -= here
        elif step.kind == "cool":
            coolers = [n for n, key in positions.items() if key == step.zone and roles[n] == "cooling"]
            if not coolers:
                violations.append(f"{where}: no cooling ion in {step.zone}")
            cooled.add(step.zone)
        elif step.kind in ("gate", "measure", "reset"):
            if any(roles[name] == "cooling" for name in step.operands):
                violations.append(f"{where}: qubit operation on a cooling ion")
            if any(not layout.is_manipulation(key) for key in here):
                violations.append(f"{where}: outside a manipulation zone")
            if step.kind == "gate":
                if len(here) > 1:
                    violations.append(f"{where}: gate operands are not co-located")
                entangling = step.gate in (GateKind.MS2, GateKind.MS5)
                if entangling and not here <= cooled:
                    violations.append(f"{where}: entangling gate without cool since last reorder")
    return violations


@dataclass(frozen=True)
class Node:
    """
    One compiled primitive

    kinds: gate, measure, reset, idle (qubits x quanta), cross (``ions``
    crossing in ``events`` events, exposing ``qubits``) and elapse.
    """

    kind: str
    qubits: Tuple[int, ...] = ()
    gate: Optional[GateOp] = None
    label: str = ""
    quanta: int = 0
    ions: int = 0
    events: int = 0
    seconds: float = 0.0
    counter: str = ""


@dataclass(frozen=True)
class CompiledSchedule:
    name: str
    register: IonRegister
    nodes: Tuple[Node, ...]
    tally: ResourceTally

    def play(self, ctx: ExecutionContext) -> Dict[str, int]:
        """Emits the nodes into ``ctx`` and returns raw outcomes by label"""
        outcomes = {}
        for node in self.nodes:
            if node.kind == "gate":
                ctx.gate(node.gate)
            elif node.kind == "measure":
                outcomes[node.label] = ctx.measure(node.qubits[0], node.label)
            elif node.kind == "reset":
                ctx.prep(node.qubits[0])
            elif node.kind == "idle":
                ctx.idle(node.qubits, node.quanta)
            elif node.kind == "cross":
                ctx.cross(node.ions, node.qubits, node.events, node.label)
            elif node.kind == "elapse":
                ctx.elapse(node.seconds, node.counter)
        return outcomes

    def circuit(self, params: NoiseParams) -> DynamicCircuit:
        return DynamicCircuit(self.name, self.register.n_qubits, self.play, params)


def _static_tally(nodes: Iterable[Node]) -> ResourceTally:
    tally = ResourceTally()
    for node in nodes:
        if node.kind == "gate":
            tally.add_gate(node.gate)
        elif node.kind == "measure":
            tally.measurements += 1
        elif node.kind == "reset":
            tally.resets += 1
        elif node.kind == "cross":
            tally.junction_crossings += node.ions
            tally.crossing_events += node.events
        elif node.kind == "elapse":
            tally.fixed_elapsed += node.seconds
            if node.counter:
                setattr(tally, node.counter, getattr(tally, node.counter) + 1)
    return tally


def compile_schedule(
    schedule: Schedule,
    params: NoiseParams,
    register: Optional[IonRegister] = None,
    accounting: str = CROSSING_PER_ION,
    layout: Optional[TrapLayout] = None,
) -> CompiledSchedule:
    """
    Lowers a validated schedule to circuit nodes

    Every qubit not taking part in a step idles for the step's duration,
    rounded up to whole time quanta. A junction crossing exposes every qubit
    of the register once per crossing event: one event per ion in per-ion
    accounting, one per step otherwise.
    """
    if accounting not in CROSSING_ACCOUNTING:
        raise ConfigError(f"Unknown crossing accounting {accounting!r}")
    register = register or protocol_register(schedule.register)
    violations = validate(schedule, layout, register)
    if violations:
        raise ScheduleViolation(
            f"Schedule {schedule.name} has {len(violations)} violations, first: {violations[0]}",
            violations,
        )
    every = register.qubits
    nodes: List[Node] = []

    def wait(seconds: float, busy: Sequence[int] = (), counter: str = ""):
        nodes.append(Node("elapse", seconds=seconds, counter=counter))
        quanta = ceil_quanta(seconds, params.time_quantum)
        idle = tuple(q for q in every if q not in busy)
        if quanta and idle:
            nodes.append(Node("idle", idle, quanta=quanta))

    for step in schedule.steps:
        if step.kind == "gate":
            targets = tuple(register.qubit(name) for name in step.operands)
            nodes.append(Node("gate", targets, gate=GateOp(step.gate, targets, step.angle)))
            wait(params.duration(GATE_DURATIONS[step.gate]), targets)
        elif step.kind in ("measure", "reset"):
            targets = tuple(register.qubit(name) for name in step.operands)
            for name, q in zip(step.operands, targets):
                nodes.append(Node(step.kind, (q,), label=step.label or name))
            wait(params.duration(step.kind), targets)
        elif step.kind == "jcross":
            events = len(step.operands) if accounting == CROSSING_PER_ION else 1
            nodes.append(
                Node(
                    "cross",
                    every,
                    label=",".join(step.operands),
                    ions=len(step.operands),
                    events=events,
                )
            )
        elif step.kind == "idle":
            wait(step.seconds)
        else:
            wait(params.duration(STEP_DURATIONS[step.kind]), counter=STEP_COUNTERS[step.kind])
    nodes = tuple(nodes)
    return CompiledSchedule(schedule.name, register, nodes, _static_tally(nodes))


# -- schedule fragments --------------------------------------------------------


def _gate(kind: GateKind, operands: Sequence[str], angle: int = 1, tag: str = "") -> ScheduleStep:
    return ScheduleStep("gate", tuple(operands), gate=kind, angle=angle, tag=tag)


def _coupling(
    data: str,
    readout: str,
    site: str,
    home: str,
    basis: str,
    extra: Sequence[ScheduleStep] = (),
) -> List[ScheduleStep]:
    """
    Brings one data ion to the readout ion and couples it into the parity

    ``extra`` runs in the same crystal right after the data coupling.
    """
    steps = [
        ScheduleStep("shuttle", (data,), site),
        ScheduleStep("merge", (data, readout)),
        ScheduleStep("cool", zone=site),
    ]
    if basis == "Z":
        steps.append(_gate(GateKind.RY, (data,), 1))
    steps += [_gate(GateKind.MS2, (readout, data), 1), _gate(GateKind.RX, (data,), 1)]
    if basis == "Z":
        steps.append(_gate(GateKind.RY, (data,), -1))
    steps += list(extra)
    steps += [ScheduleStep("split", (data, readout)), ScheduleStep("shuttle", (data,), home)]
    return steps


def flagged_readout(register: IonRegister, block: str, basis: str, plaquette: int) -> List[ScheduleStep]:
    """
    Flag-protected readout of one weight-4 stabilizer

    The flag couples to the syndrome ion after the first data coupling
    (tag f-1) and is uncoupled after the third (tag f-2), so a syndrome
    fault between the middle couplings flips the flag.
    """
    s, f = f"{block}.s", f"{block}.f"
    site = register.ion(s).home
    steps = [
        ScheduleStep("reset", (s,), label="syndrome-reset"),
        ScheduleStep("reset", (f,), label="flag-reset"),
    ]
    for k, q in enumerate(PLAQUETTES[plaquette]):
        name = data_ion(block, q)
        extra = []
        if k == 0:
            extra = [_gate(GateKind.MS2, (s, f), 1, tag=FLAG_TAGS[0])]
        elif k == 2:
            extra = [_gate(GateKind.MS2, (s, f), -1, tag=FLAG_TAGS[1])]
        steps += _coupling(name, s, site, register.ion(name).home, basis, extra)
    steps += [
        ScheduleStep("measure", (s,), label="syndrome"),
        ScheduleStep("measure", (f,), label="flag"),
    ]
    return steps


def unflagged_readout(register: IonRegister, block: str, basis: str, plaquette: int) -> List[ScheduleStep]:
    """Readout of one stabilizer with two five-ion MS gates in a single crystal"""
    s = f"{block}.s"
    site = register.ion(s).home
    data = [data_ion(block, q) for q in PLAQUETTES[plaquette]]
    crystal = (s,) + tuple(data)
    steps = [ScheduleStep("reset", (s,), label="syndrome-reset"), _gate(GateKind.RY, (s,), 1)]
    steps += [ScheduleStep("shuttle", (name,), site) for name in data]
    steps += [ScheduleStep("merge", crystal), ScheduleStep("cool", zone=site)]
    if basis == "Z":
        steps += [_gate(GateKind.RY, (name,), 1) for name in data]
    steps += [
        _gate(GateKind.MS5, crystal, 1),
        _gate(GateKind.RZ, (s,), 1),
        _gate(GateKind.MS5, crystal, -1),
    ]
    if basis == "Z":
        steps += [_gate(GateKind.RY, (name,), -1) for name in data]
    steps += [_gate(GateKind.RX, (s,), 1), ScheduleStep("split", crystal)]
    steps += [ScheduleStep("shuttle", (name,), register.ion(name).home) for name in data]
    steps.append(ScheduleStep("measure", (s,), label="syndrome"))
    return steps


def boundary_readout(
    register: IonRegister,
    readout: str,
    order: Sequence[str],
    homes: Dict[str, str],
    basis: str,
) -> List[ScheduleStep]:
    """
    Parity of a boundary operator across two blocks on a bare readout ion

    For the weight-4 operator ``order`` alternates between the two blocks so
    that a readout fault after the second coupling leaves one data error per
    block.
    """
    site = register.ion(readout).home
    steps = [ScheduleStep("reset", (readout,), label="boundary-reset")]
    for name in order:
        steps += _coupling(name, readout, site, homes[name], basis)
    steps.append(ScheduleStep("measure", (readout,), label="boundary"))
    return steps


def _cross_home(register: IonRegister, names: Sequence[str]) -> List[ScheduleStep]:
    """Junction crossings that return ions to their home zones, one step per zone"""
    by_home: Dict[str, List[str]] = {}
    for name in names:
        by_home.setdefault(register.ion(name).home, []).append(name)
    return [ScheduleStep("jcross", tuple(group), home) for home, group in by_home.items()]


@dataclass(frozen=True)
class MergeGeometry:
    """Which ions a joint measurement moves and how its boundary operators pair up"""

    basis: str
    moving_block: str
    staying_block: str
    edge: int
    weight2: Tuple[int, ...]
    weight4: Tuple[int, ...]

    @property
    def moving(self) -> Tuple[str, ...]:
        return tuple(data_ion(self.moving_block, q) for q in LOGICAL_EDGES[self.edge])

    @property
    def readout(self) -> str:
        return f"{self.staying_block}.s"

    def order(self, which: str) -> Tuple[str, ...]:
        qubits = self.weight2 if which == "weight2" else self.weight4
        return tuple(
            data_ion(block, q) for q in qubits for block in (self.moving_block, self.staying_block)
        )


MERGE_GEOMETRY = {
    "X": MergeGeometry("X", "ancilla", "target", MERGE_XX_EDGE, MERGE_XX_WEIGHT2, MERGE_XX_WEIGHT4),
    "Z": MergeGeometry("Z", "control", "ancilla", MERGE_ZZ_EDGE, MERGE_ZZ_WEIGHT2, MERGE_ZZ_WEIGHT4),
}


def merge_fragments(register: IonRegister, basis: str) -> Dict[str, List[ScheduleStep]]:
    """
    Transport and boundary readouts of one joint measurement

    Keys: out, weight2, weight4, back, and remeasure-weight2/4 which move
    only the needed ions out and back around a single readout.
    """
    geometry = MERGE_GEOMETRY[basis]
    target_arm = split_zone(register.ion(geometry.readout).home)[0]
    foreign = zone_key(target_arm, FOREIGN_ZONE)
    homes = {ion.name: ion.home for ion in register.ions}
    homes.update({name: foreign for name in geometry.moving})
    fragments = {
        "out": [ScheduleStep("jcross", geometry.moving, foreign)],
        "back": _cross_home(register, geometry.moving),
    }
    for which in ("weight2", "weight4"):
        order = geometry.order(which)
        readout = boundary_readout(register, geometry.readout, order, homes, basis)
        fragments[which] = readout
        movers = tuple(name for name in order if name in geometry.moving)
        fragments[f"remeasure-{which}"] = (
            [ScheduleStep("jcross", movers, foreign)] + readout + _cross_home(register, movers)
        )
    return fragments


def ancilla_prep(register: IonRegister, block: str = "ancilla") -> List[ScheduleStep]:
    site = register.ion(f"{block}.c").home
    steps = []
    for k in range(len(DATA_HOME)):
        name = data_ion(block, k)
        steps += [
            ScheduleStep("shuttle", (name,), site),
            ScheduleStep("reset", (name,), label=f"prep{k}"),
            ScheduleStep("shuttle", (name,), register.ion(name).home),
        ]
    return steps


def transversal_readout(register: IonRegister, block: str = "ancilla") -> List[ScheduleStep]:
    """X-basis measurement of all seven data ions, labels m0..m6"""
    site = register.ion(f"{block}.c").home
    steps = []
    for k in range(len(DATA_HOME)):
        name = data_ion(block, k)
        steps += [
            ScheduleStep("shuttle", (name,), site),
            _gate(GateKind.RY, (name,), -1),
            ScheduleStep("measure", (name,), label=f"m{k}"),
            ScheduleStep("shuttle", (name,), register.ion(name).home),
        ]
    return steps


def _pair_gate(control: str, target: str, cooler: str, site: str, homes: Dict[str, str]) -> List[ScheduleStep]:
    """One physical CNOT as RY, MS2 and three rotations"""
    crystal = (control, target, cooler)
    return [
        ScheduleStep("shuttle", (control,), site),
        ScheduleStep("shuttle", (target,), site),
        ScheduleStep("merge", crystal),
        ScheduleStep("cool", zone=site),
        _gate(GateKind.RY, (control,), 1),
        _gate(GateKind.MS2, (control, target), 1),
        _gate(GateKind.RX, (target,), -1),
        _gate(GateKind.RX, (control,), -1),
        _gate(GateKind.RY, (control,), -1),
        ScheduleStep("split", crystal),
        ScheduleStep("shuttle", (control,), homes[control]),
        ScheduleStep("shuttle", (target,), homes[target]),
    ]


def transversal_modules(register: IonRegister) -> List[Tuple[str, List[ScheduleStep]]]:
    """
    Transversal CNOT through the vacated ancilla arm

    (a) the control block crosses into the ancilla arm, (b) the target block
    follows, (c) seven pair gates in the ancilla arm's M1, (d) both return.
    """
    control = [data_ion("control", k) for k in range(7)]
    target = [data_ion("target", k) for k in range(7)]
    homes = {}
    homes.update({name: "ancilla:S1" for name in control[:4]})
    homes.update({name: "ancilla:S2" for name in control[4:]})
    homes.update({name: "ancilla:S3" for name in target[:4]})
    homes.update({name: "ancilla:M2" for name in target[4:]})
    module_a = [
        ScheduleStep("jcross", tuple(control[:4]), "ancilla:S1"),
        ScheduleStep("jcross", tuple(control[4:]) + ("control.c",), "ancilla:S2"),
    ]
    module_b = [
        ScheduleStep("jcross", tuple(target[:4]), "ancilla:S3"),
        ScheduleStep("jcross", tuple(target[4:]) + ("target.c",), "ancilla:M2"),
    ]
    module_c = [ScheduleStep("shuttle", ("control.c",), "ancilla:M1")]
    for c, t in zip(control, target):
        module_c += _pair_gate(c, t, "control.c", "ancilla:M1", homes)
    module_d = _cross_home(register, control + ["control.c"]) + _cross_home(
        register, target + ["target.c"]
    )
    return [("a", module_a), ("b", module_b), ("c", module_c), ("d", module_d)]


def transversal_compact_modules(register: IonRegister) -> List[Tuple[str, List[ScheduleStep]]]:
    """Only the control data cross, into the target arm, and come back"""
    control = [data_ion("control", k) for k in range(7)]
    target = [data_ion("target", k) for k in range(7)]
    homes = {name: register.ion(name).home for name in target}
    homes.update({name: "target:S3" for name in control[:4]})
    homes.update({name: "target:M2" for name in control[4:]})
    out = [
        ScheduleStep("jcross", tuple(control[:4]), "target:S3"),
        ScheduleStep("jcross", tuple(control[4:]), "target:M2"),
    ]
    gates = []
    for c, t in zip(control, target):
        gates += _pair_gate(c, t, "target.c", "target:M1", homes)
    return [("out", out), ("gates", gates), ("back", _cross_home(register, control))]


def readout_schedule(
    register: IonRegister, block: str, basis: str, plaquette: int, flagged: bool = True
) -> Schedule:
    kind = "flagged" if flagged else "unflagged"
    prefix = "" if register.name == PROTOCOL_FLAG_QEC else f"{block}-"
    build = flagged_readout if flagged else unflagged_readout
    return Schedule.from_modules(
        f"{prefix}{kind}-{basis}{plaquette + 1}",
        register.name,
        [("main", build(register, block, basis, plaquette))],
    )


def merge_schedule(register: IonRegister, basis: str) -> Schedule:
    """One pass of a joint measurement with modules out, weight2, weight4 and back"""
    fragments = merge_fragments(register, basis)
    return Schedule.from_modules(
        f"merge-{basis.lower() * 2}",
        register.name,
        [(key, fragments[key]) for key in ("out", "weight2", "weight4", "back")],
    )


def remeasure_schedule(register: IonRegister, basis: str, which: str) -> Schedule:
    fragments = merge_fragments(register, basis)
    return Schedule.from_modules(
        f"merge-{basis.lower() * 2}-remeasure-{which}",
        register.name,
        [("main", fragments[f"remeasure-{which}"])],
    )


def builtin_schedules() -> Dict[str, Schedule]:
    """
    Every named schedule shipped with the package

    flag-qec readouts are named like flagged-X1, lattice-surgery readouts
    carry their block as prefix (ancilla-flagged-Z3). The error-free
    lattice-surgery path is lattice-surgery-cnot with one module per stage.
    """
    schedules: List[Schedule] = []
    flag = protocol_register(PROTOCOL_FLAG_QEC)
    transversal = protocol_register(PROTOCOL_TRANSVERSAL)
    ls = protocol_register(PROTOCOL_LATTICE_SURGERY)

    for register, blocks in ((flag, ("control",)), (ls, ("control", "target", "ancilla"))):
        for block, basis, p, flagged in itertools.product(
            blocks, ("X", "Z"), range(len(PLAQUETTES)), (True, False)
        ):
            schedules.append(readout_schedule(register, block, basis, p, flagged))

    schedules.append(
        Schedule.from_modules(PROTOCOL_TRANSVERSAL, transversal.name, transversal_modules(transversal))
    )
    schedules.append(
        Schedule.from_modules(
            "transversal-compact", transversal.name, transversal_compact_modules(transversal)
        )
    )
    for basis in ("X", "Z"):
        schedules.append(merge_schedule(ls, basis))
        for which in ("weight2", "weight4"):
            schedules.append(remeasure_schedule(ls, basis, which))
    schedules.append(Schedule.from_modules("ancilla-prep", ls.name, [("main", ancilla_prep(ls))]))
    schedules.append(
        Schedule.from_modules("ancilla-readout", ls.name, [("main", transversal_readout(ls))])
    )
    schedules.append(Schedule.from_modules(PROTOCOL_LATTICE_SURGERY, ls.name, lattice_surgery_path(ls)))
    logger.debug("Built %d schedules", len(schedules))
    return {schedule.name: schedule for schedule in schedules}


def _round(register: IonRegister, blocks: Sequence[str], basis: str) -> List[ScheduleStep]:
    steps = []
    for block in blocks:
        for p in range(len(PLAQUETTES)):
            steps += flagged_readout(register, block, basis, p)
    return steps


def merge_path(register: IonRegister, basis: str) -> List[ScheduleStep]:
    """
    Error-free path of one joint measurement: both boundary operators
    twice, one merged round of same-basis checks, one split round of the
    conjugate checks
    """
    geometry = MERGE_GEOMETRY[basis]
    other = "Z" if basis == "X" else "X"
    fragments = merge_fragments(register, basis)
    blocks = (geometry.moving_block, geometry.staying_block)
    return (
        fragments["out"]
        + fragments["weight2"] * 2
        + fragments["weight4"] * 2
        + fragments["back"]
        + _round(register, blocks, basis)
        + _round(register, blocks, other)
    )


def lattice_surgery_path(register: IonRegister) -> List[Tuple[str, List[ScheduleStep]]]:
    return [
        ("prep", ancilla_prep(register) + _round(register, ("ancilla",), "X")),
        ("merge-xx", merge_path(register, "X")),
        ("merge-zz", merge_path(register, "Z")),
        ("readout", transversal_readout(register)),
    ]
