import pytest

from ion_cnot_sim.circuit import (
    AssignedFaults,
    BernoulliFaults,
    DynamicCircuit,
    ExecutionContext,
    PauliFrame,
    ResourceTally,
    enumerate_locations,
    execute,
)
from ion_cnot_sim.exceptions import CircuitContractError
from ion_cnot_sim.noise import FaultClass, NoiseParams
from ion_cnot_sim.pauli import PauliString
from ion_cnot_sim.tableau import ms2, ry


def plus_then_measure(ctx):
    ctx.prep(0)
    ctx.gate(ry(0))
    ctx.gate(ry(0, -1))
    return ctx.measure(0, "m")


class TestExecutionContext:
    def test_gate_faults_strike_after_the_gate(self):
        ctx = ExecutionContext(1, AssignedFaults({(FaultClass.ONE_QUBIT, 0): "Z"}))
        ctx.gate(ry(0))
        assert ctx.state.expectation(PauliString.from_label("X")) == -1

    def test_measurement_faults_strike_before_the_measurement(self):
        ctx = ExecutionContext(1, AssignedFaults({(FaultClass.PREP_MEASURE, 0): "X"}))
        assert ctx.measure(0) == -1
        assert ctx.tally.measurements == 1

    def test_ordinals_count_per_class(self):
        ctx = ExecutionContext(2, record_locations=True)
        ctx.prep(0)
        ctx.gate(ry(0))
        ctx.gate(ms2(0, 1))
        ctx.measure(1)
        ordinals = {c: [loc.ordinal for loc in locs] for c, locs in ctx.locations.items()}
        assert ordinals[FaultClass.PREP_MEASURE] == [0, 1]
        assert ordinals[FaultClass.ONE_QUBIT] == [0]
        assert ordinals[FaultClass.TWO_QUBIT] == [0]

    def test_idle_creates_one_location_per_qubit_and_quantum(self):
        ctx = ExecutionContext(3, record_locations=True)
        ctx.idle([0, 2], 3)
        idle = ctx.locations[FaultClass.IDLE]
        assert len(idle) == 6
        assert [loc.targets for loc in idle[:2]] == [(0,), (2,)]

    def test_idle_faults_hit_the_right_qubit(self):
        ctx = ExecutionContext(3, AssignedFaults({(FaultClass.IDLE, 3): "Z"}))
        ctx.gate(ry(2))
        ctx.idle([0, 2], 3)
        assert ctx.state.expectation(PauliString.from_label("IIX")) == -1

    def test_crossing_exposes_every_qubit_per_event(self):
        ctx = ExecutionContext(3, record_locations=True)
        ctx.cross(2, [0, 1, 2], events=2)
        assert len(ctx.locations[FaultClass.CROSSING]) == 6
        assert ctx.tally.junction_crossings == 2
        assert ctx.tally.crossing_events == 2

    def test_epochs_group_interchangeable_dephasing(self):
        ctx = ExecutionContext(1, record_locations=True)
        ctx.idle([0], 2)
        ctx.gate(ry(0))
        ctx.idle([0], 1)
        epochs = [loc.epoch for loc in ctx.locations[FaultClass.IDLE]]
        assert epochs == [0, 0, 1]

    def test_flags_are_monotone(self):
        ctx = ExecutionContext(1)
        ctx.set_flag("low_resource")
        ctx.set_flag("low_resource", False)
        assert ctx.flag("low_resource")

    def test_frame_adjusts_outcomes(self):
        ctx = ExecutionContext(1)
        ctx.correct(PauliString.from_label("X"))
        assert ctx.observed(PauliString.from_label("Z"), 1) == -1
        assert ctx.observed(PauliString.from_label("X"), 1) == 1


class TestPauliFrame:
    def test_inline_frame_updates_the_state(self):
        ctx = ExecutionContext(1, inline_frame=True)
        ctx.correct(PauliString.from_label("X"))
        assert ctx.state.expectation(PauliString.from_label("Z")) == -1
        assert ctx.frame.pending.is_identity()

    def test_pending_corrections_compose(self):
        frame = PauliFrame(2)
        frame.add(PauliString.from_label("XI"))
        frame.add(PauliString.from_label("XZ"))
        assert frame.pending == PauliString.from_label("IZ")


class TestResourceTally:
    def test_elapsed_charges_crossings_at_the_crossing_time(self):
        tally = ResourceTally(crossing_events=4, fixed_elapsed=1e-3)
        params = NoiseParams(p_cross=1e-4)
        assert tally.elapsed(params) == pytest.approx(1e-3 + 4 * params.crossing_time)

    def test_merge_adds_fields(self):
        merged = ResourceTally(ms2_gates=2).merge(ResourceTally(ms2_gates=3, measurements=1))
        assert merged.ms2_gates == 5
        assert merged.measurements == 1


class TestExecute:
    @pytest.fixture
    def circuit(self):
        return DynamicCircuit("plus", 1, plus_then_measure)

    def test_error_free_run(self, circuit):
        result = execute(circuit)
        assert result.result == 1
        assert result.realized_weights == (0, 0, 0, 0, 0, 0)

    def test_assigned_fault_is_realized(self, circuit):
        result = execute(circuit, {(FaultClass.ONE_QUBIT, 1): "X"})
        assert result.result == -1
        assert result.realized_weights == (0, 1, 0, 0, 0, 0)

    def test_unreached_ordinals_are_skipped(self, circuit):
        result = execute(circuit, {(FaultClass.TWO_QUBIT, 4): "XX"})
        assert result.skipped == {(FaultClass.TWO_QUBIT, 4): "XX"}

    def test_it_raises_error_for_invalid_label(self, circuit):
        with pytest.raises(ValueError):
            execute(circuit, {(FaultClass.ONE_QUBIT, 0): "Q"})

    def test_zero_noise_draws_nothing(self, circuit, noiseless, rng):
        for _ in range(20):
            result = execute(circuit, faults=BernoulliFaults(noiseless, rng), rng=rng)
            assert result.result == 1

    def test_census_of_the_error_free_path(self, circuit):
        census = enumerate_locations(circuit)
        assert census.counts == (2, 2, 0, 0, 0, 0)
        assert census.as_dict()["one_qubit"] == 2
        assert census.tally.one_qubit_gates == 2

    def test_dump_lists_the_primitives(self, circuit):
        text = circuit.dump()
        assert "reset 0" in text
        assert "measure 0 -> m" in text

    def test_it_raises_error_when_the_label_does_not_fit_the_targets(self, circuit):
        with pytest.raises(CircuitContractError):
            execute(circuit, {(FaultClass.ONE_QUBIT, 0): "XX"})

    def test_two_qubit_error_needs_two_letters(self):
        ctx = ExecutionContext(2, AssignedFaults({(FaultClass.TWO_QUBIT, 0): "X"}))
        with pytest.raises(CircuitContractError):
            ctx.gate(ms2(0, 1))

    def test_reference_numbering_does_not_depend_on_the_run(self, circuit):
        first = enumerate_locations(circuit)
        second = enumerate_locations(circuit, seed=7)
        assert first.locations == second.locations
        nodes = [loc.node for loc in first.locations[FaultClass.ONE_QUBIT]]
        assert len(nodes) == 2
