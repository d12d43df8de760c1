import itertools

import numpy as np
import pytest

from ion_cnot_sim.circuit import execute
from ion_cnot_sim.color_code import (
    Classification,
    CodeBlock,
    Syndrome,
    conjugate_basis,
    decode,
    decode_flagged,
    decode_unflagged,
    decoding_table,
    ideal_qec_verdict,
    joint_decode_shared,
    logical_operator,
    stabilizer_group,
    stabilizer_pauli,
)
from ion_cnot_sim.constants import PLAQUETTES
from ion_cnot_sim.exceptions import CircuitContractError
from ion_cnot_sim.pauli import PauliString
from ion_cnot_sim.protocols import FlagQecCycle, single_faults
from ion_cnot_sim.tableau import GateKind, GateOp, StabilizerState


def generators(layout):
    return [stabilizer_pauli(layout, basis, p) for basis in "XZ" for p in range(3)]


# Decoding table with qubits numbered from 1; "f" is the flag alone
UNFLAGGED_CELLS = {
    (1, 1, -1): 7,
    (1, -1, 1): 5,
    (1, -1, -1): 6,
    (-1, 1, 1): 1,
    (-1, 1, -1): 4,
    (-1, -1, 1): 2,
    (-1, -1, -1): 3,
}
FLAGGED_CELLS = {
    0: {(1, 1, 1): "f", (1, -1, 1): {3, 4}, (-1, 1, 1): {1}, (-1, 1, -1): {4}},
    1: {(1, 1, 1): "f", (1, 1, -1): {5, 6}, (1, -1, -1): {6}, (-1, -1, 1): {2}},
    2: {(1, 1, 1): "f", (1, 1, -1): {7}, (1, -1, 1): {6, 7}, (-1, -1, -1): {3}},
}


class OneFlaggedReadout(FlagQecCycle):
    """A single flagged readout followed by noiseless checks of both bases"""

    def __init__(self, basis, plaquette):
        super().__init__()
        self.basis = basis
        self.plaquette = plaquette

    def run(self, run):
        ctx = run.ctx
        run.prepare("control", "+")
        run.prepare("reference", "0")
        for c, r in zip(run.blocks["control"].qubits, run.blocks["reference"].qubits):
            ctx.ideal_gate(GateOp(GateKind.CNOT, (c, r)))
        readout = run.read("control", self.basis, self.plaquette, flagged=True)
        block = run.blocks["control"]
        for basis in "XZ":
            r = []
            for p in range(len(PLAQUETTES)):
                stabilizer = block.stabilizer(basis, p, run.n)
                r.append(ctx.observed(stabilizer, ctx.ideal_measure(stabilizer)))
            if basis == conjugate_basis(self.basis):
                syndrome = Syndrome(basis, r, readout.flag, self.plaquette)
            else:
                syndrome = Syndrome(basis, r)
            run.apply("control", decode(syndrome), "noiseless decode")
        return run.bell_verdict("control", "reference")


class TestCode:
    def test_stabilizers_commute(self, layout):
        for a, b in itertools.combinations(generators(layout), 2):
            assert a.commutes(b)

    def test_logicals_anticommute_with_each_other_only(self, layout):
        for edge in range(3):
            x_l = logical_operator(layout, "X", edge)
            z_l = logical_operator(layout, "Z", edge)
            assert not x_l.commutes(z_l)
            assert all(x_l.commutes(g) and z_l.commutes(g) for g in generators(layout))

    def test_logical_edges_are_equivalent(self, layout):
        group = {str(g.unsigned()) for g in stabilizer_group(layout)}
        first = logical_operator(layout, "X", 0)
        for edge in (1, 2):
            product = (first * logical_operator(layout, "X", edge)).unsigned()
            assert str(product) in group

    def test_stabilizer_group_has_64_elements(self, layout):
        assert len({str(g) for g in stabilizer_group(layout)}) == 64

    def test_it_raises_error_for_bad_plaquette(self, layout):
        with pytest.raises(CircuitContractError):
            stabilizer_pauli(layout, "X", 3)

    def test_every_qubit_has_a_distinct_syndrome(self, layout):
        syndromes = {layout.syndrome_of([q]) for q in range(7)}
        assert len(syndromes) == 7
        assert (1, 1, 1) not in syndromes


class TestUnflaggedDecoder:
    @pytest.mark.parametrize("basis", ["X", "Z"])
    def test_it_corrects_every_single_error(self, layout, basis):
        for q in range(7):
            verdict = decode_unflagged(Syndrome(basis, layout.syndrome_of([q])), layout)
            assert verdict.qubits == frozenset({q})
            assert verdict.classified_as == Classification.WEIGHT_1
            assert verdict.correction.label(q) == ("Z" if basis == "X" else "X")

    def test_trivial_syndrome_means_no_error(self):
        verdict = decode(Syndrome("Z", (1, 1, 1)))
        assert verdict.classified_as == Classification.NO_ERROR
        assert verdict.correction.is_identity()

    def test_it_rejects_malformed_syndromes(self):
        with pytest.raises(CircuitContractError):
            Syndrome("X", (1, 0, 1))
        with pytest.raises(CircuitContractError):
            Syndrome("X", (1, 1, 1), flag=-1)


class TestFlaggedDecoder:
    @pytest.mark.parametrize("p", [0, 1, 2])
    def test_grey_cells(self, layout, p):
        a, _, c, d = PLAQUETTES[p]
        cells = {
            (1, 1, 1): (Classification.MEASUREMENT_ERROR, frozenset()),
            layout.syndrome_of([a]): (Classification.WEIGHT_1, frozenset({a})),
            layout.syndrome_of([c, d]): (Classification.HOOK, frozenset({c, d})),
            layout.syndrome_of([d]): (Classification.WEIGHT_1, frozenset({d})),
        }
        for r, (kind, qubits) in cells.items():
            verdict = decode_flagged(Syndrome("X", r, -1, p), layout)
            assert verdict.classified_as == kind
            assert verdict.qubits == qubits

    @pytest.mark.parametrize("p", [0, 1, 2])
    def test_hooks_from_the_flag_window_are_corrected(self, layout, p):
        # An ancilla fault between the couplings leaves the data coupled later
        plaquette = PLAQUETTES[p]
        for after in (1, 2, 3):
            residue = PauliString.on_qubits(7, plaquette[after:], "Z")
            verdict = decode_flagged(Syndrome("X", layout.syndrome_of(plaquette[after:]), -1, p), layout)
            remaining = (residue * verdict.correction).unsigned()
            stabilizer = stabilizer_pauli(layout, "Z", p)
            assert remaining.is_identity() or remaining == stabilizer

    def test_unflagged_column_matches_the_lookup_table(self, layout):
        for r, qubit in UNFLAGGED_CELLS.items():
            verdict = decode_unflagged(Syndrome("Z", r), layout)
            assert verdict.qubits == frozenset({qubit - 1}), r

    @pytest.mark.parametrize("p", [0, 1, 2])
    def test_flagged_columns_match_the_lookup_table(self, layout, p):
        cells = FLAGGED_CELLS[p]
        for r, error in cells.items():
            verdict = decode_flagged(Syndrome("X", r, -1, p), layout)
            if error == "f":
                assert verdict.classified_as == Classification.MEASUREMENT_ERROR
                assert verdict.qubits == frozenset()
            else:
                assert verdict.qubits == frozenset(q - 1 for q in error), r
        for r in set(UNFLAGGED_CELLS) - set(cells):
            verdict = decode_flagged(Syndrome("X", r, -1, p), layout)
            assert verdict.classified_as == Classification.FLAG_PLUS_DATA
            assert verdict.qubits == frozenset({UNFLAGGED_CELLS[r] - 1})

    def test_other_outcomes_are_flag_plus_data(self, layout):
        a, b, c, d = PLAQUETTES[0]
        r = layout.syndrome_of([b])
        assert r not in decoding_table(layout, 0)
        verdict = decode_flagged(Syndrome("Z", r, -1, 0), layout)
        assert verdict.classified_as == Classification.FLAG_PLUS_DATA
        assert verdict.qubits == frozenset({b})

    def test_untriggered_flag_uses_the_unflagged_table(self, layout):
        r = layout.syndrome_of([5])
        flagged = decode_flagged(Syndrome("X", r, 1, 2), layout)
        assert flagged.qubits == decode_unflagged(Syndrome("X", r), layout).qubits


class TestFlaggedReadoutFaults:
    @pytest.mark.parametrize("basis,p", [("X", 0), ("Z", 2)])
    def test_every_single_fault_leaves_a_stabilizer(self, basis, p):
        circuit = OneFlaggedReadout(basis, p).circuit()
        faults = single_faults(circuit)
        assert faults
        corrected = 0
        for index, (location, pauli) in enumerate(faults):
            result = execute(
                circuit,
                {(location.fault_class, location.ordinal): pauli},
                rng=np.random.default_rng(index),
            )
            verdict = result.result
            assert not (verdict.x_failure or verdict.z_failure), (location, pauli)
            # The readout block has no syndrome left for the final perfect round
            leftover = [c for c in verdict.corrections if set(c.support) & set(range(7))]
            assert not leftover, (location, pauli)
            corrected += not result.frame.pending.is_identity()
        assert corrected > 0


class TestSharedDecoding:
    def test_agreeing_blocks_need_no_correction(self):
        shared = joint_decode_shared(Syndrome("X", (1, -1, 1)), Syndrome("X", (1, -1, 1)), 1)
        assert shared.weight == 0
        assert shared.collapsed_sign == -1

    def test_a_disagreement_costs_one_flip(self):
        shared = joint_decode_shared(Syndrome("X", (1, -1, 1)), Syndrome("X", (1, 1, 1)), 1)
        assert shared.weight == 1
        assert shared.collapsed_sign == 1
        assert shared.corrections[0].qubits == frozenset({4})

    def test_it_rejects_mixed_bases(self):
        with pytest.raises(CircuitContractError):
            joint_decode_shared(Syndrome("X", (1, 1, 1)), Syndrome("Z", (1, 1, 1)), 0)


class TestIdealQec:
    def _logical_zero(self, layout, rng):
        state = StabilizerState(7)
        for p in range(3):
            state.measure(stabilizer_pauli(layout, "X", p), rng, forced=1)
        return state

    def test_it_corrects_a_single_data_error(self, layout, rng):
        block = CodeBlock("control", tuple(range(7)), layout)
        state = self._logical_zero(layout, rng)
        state.apply_pauli(PauliString.from_sparse(7, {3: "X"}))
        verdict = ideal_qec_verdict(state, [block], expected=[("X", block.logical("Z", 7))])
        assert not verdict.x_failure
        assert len(verdict.corrections) == 1

    def test_it_reports_a_logical_flip(self, layout, rng):
        block = CodeBlock("control", tuple(range(7)), layout)
        state = self._logical_zero(layout, rng)
        state.apply_pauli(block.logical("X", 7))
        verdict = ideal_qec_verdict(state, [block], expected=[("X", block.logical("Z", 7))])
        assert verdict.x_failure
        assert not verdict.z_failure
