import itertools
import math
from unittest import mock

import numpy as np
import pytest

from ion_cnot_sim.circuit import enumerate_locations
from ion_cnot_sim.exceptions import ConfigError, InfeasibleTolerance
from ion_cnot_sim.noise import FaultClass, NoiseParams
from ion_cnot_sim.protocols import flag_qec_cycle, transversal_cnot
from ion_cnot_sim.sampler import (
    SubsetEstimate,
    combine,
    enumerate_labels,
    estimates_frame,
    find_crossing,
    hypercube,
    leading_order,
    load_estimates,
    make_grid,
    occurrence_prob,
    sample_subset,
    sample_subsets,
    save_estimates,
    select_subsets,
    shots_for,
    sweep,
    traditional_sampler,
)

ZERO = (0, 0, 0, 0, 0, 0)


def rates(**kwargs):
    vector = dict(p_m=0.0, p_1q=0.0, p_2q=0.0, p_5q=0.0, p_idle=0.0, p_cross=0.0)
    vector.update(kwargs)
    return tuple(vector.values())


@pytest.fixture(scope="module")
def flag_circuit():
    return flag_qec_cycle()


@pytest.fixture(scope="module")
def flag_census(flag_circuit):
    return enumerate_locations(flag_circuit)


class TestOccurrenceProbability:
    def test_single_class_example(self):
        a = occurrence_prob((2, 0, 0, 0, 0, 0), rates(p_m=0.01), (100, 0, 0, 0, 0, 0))
        assert a == pytest.approx(0.18486, abs=1e-5)

    def test_it_normalizes_for_one_large_class(self):
        counts = (0, 0, 200, 0, 0, 0)
        total = sum(occurrence_prob((0, 0, w, 0, 0, 0), rates(p_2q=0.03), counts) for w in range(201))
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_it_normalizes_over_every_label(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            counts = tuple(int(n) for n in rng.integers(0, 5, size=6))
            p = tuple(float(v) for v in rng.uniform(0, 0.3, size=6))
            labels = enumerate_labels(counts, sum(counts))
            assert sum(occurrence_prob(label, p, counts) for label in labels) == pytest.approx(1.0, abs=1e-12)

    def test_it_raises_error_for_weights_beyond_the_census(self):
        with pytest.raises(ValueError):
            occurrence_prob((3, 0, 0, 0, 0, 0), rates(p_m=0.1), (2, 0, 0, 0, 0, 0))

    def test_it_accepts_noise_params_and_census(self, flag_census):
        params = NoiseParams()
        assert occurrence_prob(ZERO, params, flag_census) == pytest.approx(
            math.prod((1 - p) ** n for p, n in zip(params.vector(), flag_census.counts))
        )


class TestSelectSubsets:
    def test_small_census_selection(self):
        labels = select_subsets(rates(p_m=0.1), (3, 0, 0, 0, 0, 0), 1e-6, 3)
        assert labels == [(0, 0, 0, 0, 0, 0), (1, 0, 0, 0, 0, 0), (2, 0, 0, 0, 0, 0), (3, 0, 0, 0, 0, 0)]

    def test_loose_tolerance_keeps_only_the_zero_subset(self):
        labels = select_subsets(rates(p_m=0.01), (3, 0, 0, 0, 0, 0), 0.5, 3)
        assert labels == [ZERO]

    def test_selection_is_downward_closed(self):
        counts = (4, 5, 3, 0, 6, 2)
        labels = set(select_subsets(rates(p_m=0.02, p_1q=0.04, p_2q=0.05, p_idle=0.02, p_cross=0.05), counts, 1e-4, 6))
        for label in labels:
            for lower in itertools.product(*(range(w + 1) for w in label)):
                assert lower in labels

    def test_it_raises_error_when_the_cap_is_too_low(self):
        with pytest.raises(InfeasibleTolerance) as e:
            select_subsets(rates(p_m=0.1), (3, 0, 0, 0, 0, 0), 1e-6, 0)
        assert e.value.achieved_coverage == pytest.approx(0.729)

    @pytest.mark.parametrize("delta", [0.0, 1.0, -0.1])
    def test_it_raises_error_for_bad_delta(self, delta):
        with pytest.raises(ConfigError):
            select_subsets(rates(p_m=0.1), (3, 0, 0, 0, 0, 0), delta, 3)


class TestCombine:
    def test_zero_rates_give_zero_bounds(self):
        estimates = {ZERO: SubsetEstimate(ZERO)}
        bounds = combine(estimates, rates(), (5, 5, 5, 0, 5, 5))
        assert bounds["Z"].lower == bounds["Z"].upper == 0.0

    def test_complete_coverage_closes_the_gap(self):
        counts = (2, 0, 0, 0, 0, 0)
        estimates = {
            ZERO: SubsetEstimate(ZERO),
            (1, 0, 0, 0, 0, 0): SubsetEstimate((1, 0, 0, 0, 0, 0), 4, 1, 0),
            (2, 0, 0, 0, 0, 0): SubsetEstimate((2, 0, 0, 0, 0, 0), 4, 4, 2),
        }
        bounds = combine(estimates, rates(p_m=0.2), counts)
        assert bounds["Z"].gap == pytest.approx(0.0, abs=1e-12)
        assert bounds["Z"].lower == pytest.approx(0.32 * 0.25 + 0.04)
        assert bounds["X"].lower == pytest.approx(0.02)

    def test_missing_subsets_widen_the_gap(self):
        counts = (10, 0, 0, 0, 0, 0)
        estimates = {ZERO: SubsetEstimate(ZERO)}
        bounds = combine(estimates, rates(p_m=0.01), counts)
        assert bounds["Z"].lower == 0.0
        assert bounds["Z"].upper == pytest.approx(1 - 0.99**10)
        assert 0 <= bounds["X"].lower <= bounds["X"].point <= bounds["X"].upper <= 1


class TestSampling:
    def test_zero_subset_is_not_simulated(self, flag_circuit, flag_census):
        estimate = sample_subset(ZERO, flag_circuit, shots=10, census=flag_census)
        assert estimate.shots == 0
        assert estimate.p_z == estimate.p_x == 0.0
        assert estimate.mean_tally["ms2_gates"] == 36

    def test_weight_one_is_exhaustive_and_fault_tolerant(self, flag_circuit, flag_census):
        label = (0, 0, 1, 0, 0, 0)
        estimate = sample_subset(label, flag_circuit, shots=10, census=flag_census)
        assert estimate.exhaustive
        assert estimate.shots == flag_census.count(FaultClass.TWO_QUBIT) * 15
        assert estimate.p_z == estimate.p_x == 0.0
        assert estimate.std_error("Z") == 0.0

    def test_weight_one_dephasing_keeps_the_full_multiplicity(self, flag_circuit, flag_census):
        label = (0, 0, 0, 0, 1, 0)
        estimate = sample_subset(label, flag_circuit, shots=10, census=flag_census)
        assert estimate.shots == flag_census.count(FaultClass.IDLE)

    def test_random_subsets_are_reproducible(self, flag_circuit, flag_census):
        label = (0, 0, 2, 0, 0, 0)
        first = sample_subset(label, flag_circuit, shots=30, seed=5, census=flag_census)
        second = sample_subset(label, flag_circuit, shots=30, seed=5, census=flag_census)
        assert first.shots == 30
        assert (first.failures_z, first.failures_x) == (second.failures_z, second.failures_x)
        assert first.realized == second.realized

    def test_unreached_ordinals_are_logged_as_warnings(self, flag_circuit, flag_census):
        # A detected measurement fault leaves the flagged path, so later ordinals go unreached
        label = (2, 0, 0, 0, 0, 0)
        with mock.patch("ion_cnot_sim.sampler.logger") as mock_logger:
            estimate = sample_subset(label, flag_circuit, shots=100, seed=3, census=flag_census)
        assert set(estimate.realized) != {"2-0-0-0-0-0"}
        messages = [call.args[0] for call in mock_logger.warning.call_args_list]
        assert "Unreached fault ordinals %s" in messages
        assert "Subset %s: %d of %d shots skipped unreached ordinals" in messages

    def test_shots_per_weight_mapping(self):
        assert shots_for(2, {2: 100, 4: 10}) == 100
        assert shots_for(3, {2: 100, 4: 10}) == 100
        assert shots_for(6, {2: 100, 4: 10}) == 10

    def test_sample_subsets_covers_every_label(self, flag_circuit, flag_census):
        labels = [ZERO, (1, 0, 0, 0, 0, 0), (2, 0, 0, 0, 0, 0)]
        estimates = sample_subsets(labels, flag_circuit, flag_census, {2: 20})
        assert set(estimates) == set(labels)
        assert estimates[(2, 0, 0, 0, 0, 0)].shots == 20

    def test_it_raises_error_for_labels_beyond_the_census(self, flag_circuit, flag_census):
        with pytest.raises(ValueError):
            sample_subset((0, 0, 0, 1, 0, 0), flag_circuit, shots=1, census=flag_census)


class TestSweep:
    @pytest.fixture
    def estimates(self):
        counts = (3, 0, 0, 0, 0, 0)
        return counts, {
            ZERO: SubsetEstimate(ZERO),
            (1, 0, 0, 0, 0, 0): SubsetEstimate((1, 0, 0, 0, 0, 0), 3, 0, 0, True),
            (2, 0, 0, 0, 0, 0): SubsetEstimate((2, 0, 0, 0, 0, 0), 10, 5, 1),
        }

    def test_sweeping_twice_gives_identical_bounds(self, estimates):
        counts, subsets = estimates
        grid = make_grid(NoiseParams(), "p_m", [1e-4, 1e-3, 1e-2])
        first = sweep(grid, subsets, counts, hypercube(grid), "p_m").to_frame()
        second = sweep(grid, subsets, counts, hypercube(grid), "p_m").to_frame()
        assert first.equals(second)
        assert list(first["p_m_prob"]) == [1e-4, 1e-3, 1e-2]
        assert "pL_Z_gap_prob" in first.columns
        assert "duration_mean_s" in first.columns

    def test_lower_bound_grows_with_the_rate(self, estimates):
        counts, subsets = estimates
        grid = make_grid(NoiseParams(), "p_m", [1e-4, 1e-3, 1e-2])
        frame = sweep(grid, subsets, counts, axis="p_m").to_frame()
        assert frame["pL_Z_lower_prob"].is_monotonic_increasing

    def test_it_raises_error_outside_the_hypercube(self, estimates):
        counts, subsets = estimates
        grid = make_grid(NoiseParams(), "p_m", [1e-3, 1e-2])
        with pytest.raises(ConfigError):
            sweep(grid, subsets, counts, hypercube(grid[:1]), "p_m")

    def test_it_raises_error_for_unknown_axis(self):
        with pytest.raises(ConfigError):
            make_grid(NoiseParams(), "p_3q", [1e-3])

    def test_prefixed_columns_keep_the_axis(self, estimates):
        counts, subsets = estimates
        grid = make_grid(NoiseParams(), "p_m", [1e-3])
        frame = sweep(grid, subsets, counts, axis="p_m", protocol="flag-qec").to_frame(prefix=True)
        assert "p_m_prob" in frame.columns
        assert "flag-qec:pL_X_upper_prob" in frame.columns


class TestAnalysis:
    def test_crossing_on_a_grid_point(self):
        assert find_crossing([1e-5, 1e-4, 1e-3], [1e-6, 1e-5, 1e-4], [1e-5, 1e-5, 1e-5]) == pytest.approx(1e-4)

    def test_crossing_between_grid_points(self):
        assert find_crossing([1e-4, 1e-3], [1e-8, 1e-6], [1e-7, 1e-7]) == pytest.approx(10**-3.5)

    def test_no_crossing(self):
        assert find_crossing([1e-4, 1e-3], [1e-8, 1e-7], [1e-6, 1e-5]) is None

    def test_leading_order_coefficient(self):
        counts = (10, 0, 0, 0, 0, 0)
        estimates = [
            SubsetEstimate(ZERO),
            SubsetEstimate((1, 0, 0, 0, 0, 0), 10, 0, 0, True),
            SubsetEstimate((2, 0, 0, 0, 0, 0), 4, 2, 0),
            SubsetEstimate((3, 0, 0, 0, 0, 0), 4, 4, 0),
        ]
        terms = leading_order(estimates, counts)
        assert terms["X"] == []
        (term,) = terms["Z"]
        assert term.label == (2, 0, 0, 0, 0, 0)
        assert term.coefficient == pytest.approx(22.5)
        assert term.evaluate(rates(p_m=1e-3)) == pytest.approx(22.5e-6)


class TestPersistence:
    def test_estimates_survive_a_save(self, tmp_path):
        label = (0, 1, 2, 0, 0, 0)
        estimate = SubsetEstimate(label, 7, 2, 1)
        estimate.realized = {"0-1-2-0-0-0": 6, "0-1-1-0-0-0": 1}
        path = str(tmp_path / "run.subsets.csv")
        save_estimates(path, {label: estimate}, {"protocol": "flag-qec"})
        loaded, metadata = load_estimates(path)
        assert loaded[label] == estimate
        assert metadata["protocol"] == "flag-qec"
        assert estimates_frame(loaded).equals(estimates_frame({label: estimate}))

    def test_it_raises_error_for_missing_results(self, tmp_path):
        with pytest.raises(ConfigError):
            load_estimates(str(tmp_path / "missing.csv"))


class TestTraditionalSampler:
    def test_noiseless_runs_never_fail(self, noiseless):
        estimate = traditional_sampler(transversal_cnot(noiseless), shots=20)
        assert estimate.failures_z == estimate.failures_x == 0
        assert estimate.mean_weights == (0.0,) * 6

    def test_mean_injected_weight_matches_the_rate(self):
        params = NoiseParams(p_m=0.0, p_1q=0.05, p_2q=0.0, p_5q=0.0, p_cross=0.0, p_idle_override=0.0)
        estimate = traditional_sampler(transversal_cnot(params), shots=400, seed=3)
        assert estimate.mean_weights[1] == pytest.approx(28 * 0.05, abs=0.3)

    @pytest.mark.slow
    def test_subset_bounds_bracket_plain_monte_carlo(self):
        p = 5e-3
        params = NoiseParams(p_m=p, p_1q=p, p_2q=p, p_5q=p, p_cross=0.0, p_idle_override=0.0)
        circuit = flag_qec_cycle(params)
        census = enumerate_locations(circuit)
        labels = select_subsets(params.vector(), census, 1e-2, 5)
        estimates = sample_subsets(labels, circuit, census, {2: 1000}, seed=11, workers=4)
        bounds = combine(estimates, params, census)
        plain = traditional_sampler(circuit, params, shots=100_000, seed=11, workers=4)
        for failure_type in ("Z", "X"):
            rate = plain.rate(failure_type)
            slack = 3 * plain.std_error(failure_type)
            assert bounds[failure_type].lower - slack <= rate <= bounds[failure_type].upper + slack
