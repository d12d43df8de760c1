import pytest

from ion_cnot_sim.circuit import enumerate_locations
from ion_cnot_sim.constants import (
    CROSSING_PER_EVENT,
    P_CROSS_HIGH,
    P_CROSS_LOW,
    PROTOCOL_FLAG_QEC,
    PROTOCOL_LATTICE_SURGERY,
    PROTOCOL_TRANSVERSAL,
    REFERENCE_DURATIONS,
    REFERENCE_RESOURCES,
)
from ion_cnot_sim.exceptions import ConfigError, ScheduleViolation
from ion_cnot_sim.noise import NoiseParams
from ion_cnot_sim.schedule import (
    FLAG_TAGS,
    Schedule,
    ScheduleStep,
    builtin_schedules,
    compile_schedule,
    protocol_register,
    validate,
)

BROKEN = """\
schedule broken register=flag-qec
module main
gate control.s,control.f - gate=MS2 angle=1
"""


@pytest.fixture(scope="module")
def schedules():
    return builtin_schedules()


def within(value, reference, tolerance=0.2):
    low, high = reference
    return low * (1 - tolerance) <= value <= high * (1 + tolerance)


class TestRegisters:
    def test_register_sizes(self):
        assert protocol_register(PROTOCOL_FLAG_QEC).n_qubits == 16
        assert protocol_register(PROTOCOL_TRANSVERSAL).n_qubits == 14
        assert protocol_register(PROTOCOL_LATTICE_SURGERY).n_qubits == 27

    def test_lattice_surgery_qubit_map(self):
        register = protocol_register(PROTOCOL_LATTICE_SURGERY)
        assert register.data_qubits("control") == tuple(range(7))
        assert register.data_qubits("target") == tuple(range(7, 14))
        assert register.data_qubits("ancilla") == tuple(range(14, 21))
        assert register.qubit("ancilla.f") == 26

    def test_it_raises_error_for_unknown_protocol(self):
        with pytest.raises(ConfigError):
            protocol_register("teleported-cnot")


class TestValidate:
    def test_builtin_schedules_are_valid(self, schedules):
        for name, schedule in schedules.items():
            assert validate(schedule) == [], name

    def test_entangling_gate_needs_a_cool(self):
        violations = validate(Schedule.from_text(BROKEN))
        assert any("without cool" in v for v in violations)

    def test_compile_rejects_invalid_schedules(self):
        with pytest.raises(ScheduleViolation) as e:
            compile_schedule(Schedule.from_text(BROKEN), NoiseParams())
        assert e.value.violations

    def test_it_rejects_unknown_step_kinds(self):
        with pytest.raises(ScheduleViolation):
            ScheduleStep("teleport")

    def test_it_rejects_malformed_text(self):
        with pytest.raises(ScheduleViolation):
            Schedule.from_text("module main\nreset control.s -\n")


class TestScheduleText:
    @pytest.mark.parametrize("name", [PROTOCOL_TRANSVERSAL, "merge-xx", "control-flagged-Z2"])
    def test_text_is_stable(self, schedules, name):
        text = schedules[name].to_text()
        parsed = Schedule.from_text(text)
        assert parsed.to_text() == text
        assert parsed == schedules[name]

    def test_modules_keep_their_start_placement(self, schedules):
        module = schedules[PROTOCOL_LATTICE_SURGERY].module("readout")
        assert module.name == f"{PROTOCOL_LATTICE_SURGERY}/readout"
        assert validate(module) == []

    def test_dropping_a_tag_removes_its_steps(self, schedules):
        schedule = schedules["flagged-X1"]
        dropped = schedule.without_tags(["f-2"])
        assert len(dropped) == len(schedule) - 1
        assert all(step.tag != "f-2" for step in dropped.steps)


class TestCompile:
    def test_transversal_counts(self, schedules):
        tally = compile_schedule(schedules[PROTOCOL_TRANSVERSAL], NoiseParams()).tally
        assert tally.one_qubit_gates == 28
        assert tally.ms2_gates == 7
        assert tally.ms5_gates == 0
        assert tally.junction_crossings == 32

    def test_compact_transversal_crosses_less(self, schedules):
        tally = compile_schedule(schedules["transversal-compact"], NoiseParams()).tally
        assert tally.ms2_gates == 7
        assert tally.junction_crossings == 14

    def test_lattice_surgery_counts(self, schedules):
        tally = compile_schedule(schedules[PROTOCOL_LATTICE_SURGERY], NoiseParams()).tally
        assert tally.ms2_gates == 186
        assert tally.one_qubit_gates == 259
        assert tally.ms5_gates == 0
        assert tally.junction_crossings == 12

    def test_lattice_surgery_counts_by_stage(self, schedules):
        schedule = schedules[PROTOCOL_LATTICE_SURGERY]
        counts = {}
        for name in schedule.module_names:
            tally = compile_schedule(schedule.module(name), NoiseParams()).tally
            counts[name] = (tally.ms2_gates, tally.one_qubit_gates, tally.junction_crossings)
        # 3 flagged checks; 12 boundary couplings plus 12 flagged checks per merge
        assert counts == {
            "prep": (18, 12, 0),
            "merge-xx": (84, 108, 6),
            "merge-zz": (84, 132, 6),
            "readout": (0, 7, 0),
        }

    def test_lattice_surgery_floor_is_above_the_reference(self, schedules):
        # Four couplings per check is the least a single syndrome ion can do
        schedule = schedules[PROTOCOL_LATTICE_SURGERY].without_tags(FLAG_TAGS)
        tally = compile_schedule(schedule, NoiseParams()).tally
        assert tally.ms2_gates == 27 * 4 + 2 * 12
        assert tally.ms2_gates > REFERENCE_RESOURCES[PROTOCOL_LATTICE_SURGERY]["ms2_gates"] * 1.05
        assert tally.junction_crossings == 12

    def test_module_counts_add_up(self, schedules):
        schedule = schedules[PROTOCOL_LATTICE_SURGERY]
        params = NoiseParams()
        total = compile_schedule(schedule, params).tally
        parts = [compile_schedule(schedule.module(name), params).tally for name in schedule.module_names]
        assert sum(t.ms2_gates for t in parts) == total.ms2_gates
        assert sum(t.one_qubit_gates for t in parts) == total.one_qubit_gates
        assert sum(t.junction_crossings for t in parts) == total.junction_crossings

    def test_transversal_durations(self, schedules):
        tally = compile_schedule(schedules[PROTOCOL_TRANSVERSAL], NoiseParams()).tally
        low, high = REFERENCE_DURATIONS[PROTOCOL_TRANSVERSAL]
        assert within(tally.elapsed(NoiseParams(p_cross=P_CROSS_LOW)), low)
        assert within(tally.elapsed(NoiseParams(p_cross=P_CROSS_HIGH)), high)

    def test_lattice_surgery_durations(self, schedules):
        tally = compile_schedule(schedules[PROTOCOL_LATTICE_SURGERY], NoiseParams()).tally
        low, high = REFERENCE_DURATIONS[PROTOCOL_LATTICE_SURGERY]
        assert within(tally.elapsed(NoiseParams(p_cross=P_CROSS_LOW)), low, tolerance=0.15)
        assert within(tally.elapsed(NoiseParams(p_cross=P_CROSS_HIGH)), high, tolerance=0.15)
        assert tally.elapsed(NoiseParams(p_cross=P_CROSS_HIGH)) > tally.elapsed(NoiseParams(p_cross=P_CROSS_LOW))

    def test_per_event_accounting_counts_steps(self, schedules):
        schedule = schedules[PROTOCOL_TRANSVERSAL]
        per_ion = compile_schedule(schedule, NoiseParams()).tally
        per_event = compile_schedule(schedule, NoiseParams(), accounting=CROSSING_PER_EVENT).tally
        assert per_event.junction_crossings == per_ion.junction_crossings
        assert per_event.crossing_events < per_ion.crossing_events

    def test_it_raises_error_for_unknown_accounting(self, schedules):
        with pytest.raises(ConfigError):
            compile_schedule(schedules[PROTOCOL_TRANSVERSAL], NoiseParams(), accounting="per-hop")

    def test_census_does_not_depend_on_rates(self, schedules):
        schedule = schedules[PROTOCOL_TRANSVERSAL]
        a = enumerate_locations(compile_schedule(schedule, NoiseParams()).circuit(NoiseParams()))
        noisy = NoiseParams(p_2q=0.1, p_cross=1e-3)
        b = enumerate_locations(compile_schedule(schedule, noisy).circuit(noisy))
        assert a.counts == b.counts
