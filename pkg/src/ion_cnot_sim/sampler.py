import functools
import itertools
import json
import math
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.special import comb
from scipy.stats import binom

from .circuit import BernoulliFaults, Census, DynamicCircuit, ResourceTally, enumerate_locations, execute
from .constants import CSV_SCHEMA_VERSION, SHOTS_PER_WEIGHT_DEFAULT
from .exceptions import ConfigError, InfeasibleTolerance
from .noise import FAULT_CLASSES, PARAMETER_NAMES, SUPPORTS, FaultClass, NoiseParams, bare_bell_reference
from .util import derive_rng, format_label, label_key, logger, parse_label

SubsetLabel = Tuple[int, ...]
Counts = Union[Census, Sequence[int]]

FAILURE_TYPES = ("Z", "X")
TALLY_FIELDS = tuple(ResourceTally().as_dict())
# Seed stream of the traditional sampler, apart from every subset label key
TRADITIONAL_STREAM = 2**31 - 1
SHOT_CHUNK = 500


def _counts(census: Counts) -> Tuple[int, ...]:
    counts = census.counts if isinstance(census, Census) else tuple(int(n) for n in census)
    if len(counts) != len(FAULT_CLASSES):
        raise ValueError(f"Expected {len(FAULT_CLASSES)} location counts, got {len(counts)}")
    return counts


def _vector(p: Union[NoiseParams, Sequence[float]]) -> Tuple[float, ...]:
    vector = p.vector() if isinstance(p, NoiseParams) else tuple(float(v) for v in p)
    if len(vector) != len(FAULT_CLASSES):
        raise ValueError(f"Expected {len(FAULT_CLASSES)} error rates, got {len(vector)}")
    return vector


def log_occurrence_prob(label: Sequence[int], p, census: Counts) -> float:
    counts = _counts(census)
    vector = _vector(p)
    if len(label) != len(counts):
        raise ValueError(f"Label {tuple(label)} does not match {len(counts)} fault classes")
    for w, n in zip(label, counts):
        if not 0 <= w <= n:
            raise ValueError(f"Subset weight {w} outside [0, {n}] in {tuple(label)}")
    return float(sum(binom.logpmf(w, n, q) for w, n, q in zip(label, counts, vector)))


def occurrence_prob(label: Sequence[int], p, census: Counts) -> float:
    """Probability that exactly ``label[i]`` locations of class i fail"""
    return math.exp(log_occurrence_prob(label, p, census))


def enumerate_labels(census: Counts, weight_cap: int) -> List[SubsetLabel]:
    """Every label of total weight at most ``weight_cap`` allowed by the census"""
    counts = _counts(census)
    ranges = [range(min(n, weight_cap) + 1) for n in counts]
    return [label for label in itertools.product(*ranges) if sum(label) <= weight_cap]


def _downward_closure(labels: Iterable[SubsetLabel]) -> set:
    closed = set()
    for label in labels:
        closed.update(itertools.product(*(range(w + 1) for w in label)))
    return closed


def _selection_key(item):
    label, a = item
    return (-a, sum(label), label)


def select_subsets(p_max, census: Counts, delta: float, weight_cap: int) -> List[SubsetLabel]:
    """
    Smallest downward-closed set of subsets covering 1 - delta at ``p_max``

    Subsets are taken by descending occurrence probability. Coverage at the
    corner of the hypercube bounds the truncation error everywhere inside it.
    """
    if not 0 < delta < 1:
        raise ConfigError(f"delta must be in (0, 1), got {delta}")
    if weight_cap < 0:
        raise ConfigError(f"Weight cap must be non-negative, got {weight_cap}")
    candidates = [(label, occurrence_prob(label, p_max, census)) for label in enumerate_labels(census, weight_cap)]
    candidates.sort(key=_selection_key)

    chosen, covered = [], 0.0
    for label, a in candidates:
        if covered >= 1 - delta:
            break
        chosen.append(label)
        covered += a
    if covered < 1 - delta:
        raise InfeasibleTolerance(
            f"Subsets up to weight {weight_cap} cover {covered:.6g} < {1 - delta:.6g}",
            achieved_coverage=covered,
        )

    closed = _downward_closure(chosen)
    selection = sorted(closed, key=lambda label: (sum(label), label))
    logger.info(
        "Selected %d subsets up to weight %d covering %.6g",
        len(selection),
        max(sum(label) for label in selection),
        sum(occurrence_prob(label, p_max, census) for label in selection),
    )
    return selection


@dataclass
class SubsetEstimate:
    """
    Failure counts of one subset, independent of the error rates

    ``tally_sums`` holds per-shot resource tallies summed over shots and
    ``realized`` counts the shots by the weight actually injected.
    """

    label: SubsetLabel
    shots: int = 0
    failures_z: int = 0
    failures_x: int = 0
    exhaustive: bool = False
    tally_sums: Dict[str, float] = field(default_factory=lambda: dict.fromkeys(TALLY_FIELDS, 0.0))
    realized: Dict[str, int] = field(default_factory=dict)

    def _rate(self, failures: int) -> float:
        return failures / self.shots if self.shots else 0.0

    @property
    def p_z(self) -> float:
        return self._rate(self.failures_z)

    @property
    def p_x(self) -> float:
        return self._rate(self.failures_x)

    def rate(self, failure_type: str) -> float:
        return self.p_z if failure_type == "Z" else self.p_x

    def std_error(self, failure_type: str) -> float:
        """Binomial standard error; zero for exhaustive or unsimulated subsets"""
        if self.exhaustive or not self.shots:
            return 0.0
        p = self.rate(failure_type)
        return math.sqrt(p * (1 - p) / self.shots)

    @property
    def mean_tally(self) -> Dict[str, float]:
        if not self.shots:
            return dict(self.tally_sums)
        return {k: v / self.shots for k, v in self.tally_sums.items()}

    def add_shot(self, z_failure: bool, x_failure: bool, tally: ResourceTally, realized: str, weight: int = 1):
        self.shots += weight
        self.failures_z += weight * int(z_failure)
        self.failures_x += weight * int(x_failure)
        for key, value in tally.as_dict().items():
            self.tally_sums[key] += weight * value
        self.realized[realized] = self.realized.get(realized, 0) + weight

    def merge(self, other: "SubsetEstimate") -> "SubsetEstimate":
        if other.label != self.label:
            raise ValueError(f"Cannot merge subsets {self.label} and {other.label}")
        merged = SubsetEstimate(
            self.label,
            self.shots + other.shots,
            self.failures_z + other.failures_z,
            self.failures_x + other.failures_x,
            self.exhaustive or other.exhaustive,
            {k: self.tally_sums[k] + other.tally_sums[k] for k in TALLY_FIELDS},
            dict(Counter(self.realized) + Counter(other.realized)),
        )
        return merged


def _zero_estimate(census: Census) -> SubsetEstimate:
    """The error-free path never fails and costs exactly its census tally"""
    estimate = SubsetEstimate((0,) * len(FAULT_CLASSES), exhaustive=True)
    estimate.tally_sums = {k: float(v) for k, v in census.tally.as_dict().items()}
    return estimate


def _weight_one_configs(census: Census, fault_class: FaultClass):
    """
    Every (location, Pauli) of one class with its multiplicity

    Dephasing locations sharing qubit and epoch are interchangeable, so one
    representative stands for the whole group.
    """
    groups: Dict[Tuple, List] = {}
    for location in census.locations[fault_class]:
        if fault_class in (FaultClass.IDLE, FaultClass.CROSSING):
            key = (location.targets[0], location.epoch)
        else:
            key = (location.ordinal,)
        groups.setdefault(key, []).append(location)
    return [
        (members[0], pauli, len(members))
        for members in groups.values()
        for pauli in SUPPORTS[fault_class]
    ]


def _run_shot(circuit: DynamicCircuit, assignment, rng, estimate: SubsetEstimate, weight: int = 1):
    result = execute(circuit, assignment, rng=rng)
    verdict = result.result
    estimate.add_shot(
        verdict.z_failure,
        verdict.x_failure,
        result.tally,
        format_label(result.realized_weights),
        weight,
    )
    if result.skipped:
        logger.warning("Unreached fault ordinals %s", sorted(k[1] for k in result.skipped))


def _draw_assignment(label: SubsetLabel, counts: Tuple[int, ...], rng: np.random.Generator):
    assignment = {}
    for fault_class, w, n in zip(FAULT_CLASSES, label, counts):
        if not w:
            continue
        support = SUPPORTS[fault_class]
        ordinals = rng.choice(n, size=w, replace=False)
        for ordinal in sorted(int(o) for o in ordinals):
            assignment[(fault_class, ordinal)] = support[int(rng.integers(len(support)))]
    return assignment


def _sample_chunk(circuit: DynamicCircuit, counts: Tuple[int, ...], seed: int, task) -> SubsetEstimate:
    label, start, stop = task
    estimate = SubsetEstimate(label)
    key = label_key(label)
    for shot in range(start, stop):
        rng = derive_rng(seed, key, shot)
        _run_shot(circuit, _draw_assignment(label, counts, rng), rng, estimate)
    return estimate


def _exhaustive_chunk(circuit: DynamicCircuit, seed: int, task) -> SubsetEstimate:
    label, configs = task
    estimate = SubsetEstimate(label, exhaustive=True)
    key = label_key(label)
    for location, pauli, multiplicity in configs:
        rng = derive_rng(seed, key, location.ordinal)
        assignment = {(location.fault_class, location.ordinal): pauli}
        _run_shot(circuit, assignment, rng, estimate, multiplicity)
    return estimate


def _map(fn, tasks, workers: int):
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, tasks))
    return [fn(task) for task in tasks]


def _reduce(partials: Iterable[SubsetEstimate]) -> Dict[SubsetLabel, SubsetEstimate]:
    merged: Dict[SubsetLabel, SubsetEstimate] = {}
    for partial in partials:
        merged[partial.label] = merged[partial.label].merge(partial) if partial.label in merged else partial
    return merged


def shots_for(weight: int, shots_per_weight: Optional[Mapping[int, int]] = None) -> int:
    """Shots for a subset of total weight ``weight``; the largest configured weight covers the rest"""
    if not shots_per_weight:
        return SHOTS_PER_WEIGHT_DEFAULT
    configured = {int(k): int(v) for k, v in shots_per_weight.items()}
    if weight in configured:
        return configured[weight]
    below = [k for k in configured if k <= weight]
    return configured[max(below)] if below else SHOTS_PER_WEIGHT_DEFAULT


def sample_subsets(
    labels: Sequence[SubsetLabel],
    circuit: DynamicCircuit,
    census: Census,
    shots_per_weight: Optional[Mapping[int, int]] = None,
    seed: int = 0,
    workers: int = 1,
) -> Dict[SubsetLabel, SubsetEstimate]:
    """
    Estimates every subset in ``labels``

    The zero subset is not simulated, weight-1 subsets are enumerated
    exhaustively and the rest get random shots. Shots are split into
    chunks for the worker pool; the merged result does not depend on the
    chunking because every shot seeds its own generator.
    """
    counts = census.counts
    estimates: Dict[SubsetLabel, SubsetEstimate] = {}
    exhaustive_tasks, random_tasks = [], []
    for label in labels:
        label = tuple(int(w) for w in label)
        weight = sum(label)
        if weight == 0:
            estimates[label] = _zero_estimate(census)
        elif weight == 1:
            fault_class = FAULT_CLASSES[label.index(1)]
            configs = _weight_one_configs(census, fault_class)
            for start in range(0, len(configs), SHOT_CHUNK):
                exhaustive_tasks.append((label, configs[start:start + SHOT_CHUNK]))
        else:
            shots = shots_for(weight, shots_per_weight)
            for start in range(0, shots, SHOT_CHUNK):
                random_tasks.append((label, start, min(start + SHOT_CHUNK, shots)))

    logger.info(
        "Sampling %d subsets of %s in %d chunks",
        len(labels),
        circuit.name,
        len(exhaustive_tasks) + len(random_tasks),
    )
    partials = _map(functools.partial(_exhaustive_chunk, circuit, seed), exhaustive_tasks, workers)
    partials += _map(functools.partial(_sample_chunk, circuit, counts, seed), random_tasks, workers)
    estimates.update(_reduce(partials))
    for label in sorted(estimates, key=lambda lbl: (sum(lbl), lbl)):
        estimate = estimates[label]
        short = sum(n for realized, n in estimate.realized.items() if realized != format_label(label))
        if short:
            logger.warning(
                "Subset %s: %d of %d shots skipped unreached ordinals", format_label(label), short, estimate.shots
            )
        logger.debug(
            "Subset %s: %d shots, %d Z and %d X failures, realized %s",
            format_label(label),
            estimate.shots,
            estimate.failures_z,
            estimate.failures_x,
            estimate.realized,
        )
    return estimates


def sample_subset(
    label: Sequence[int],
    circuit: DynamicCircuit,
    shots: int,
    seed: int = 0,
    census: Optional[Census] = None,
) -> SubsetEstimate:
    """One subset, run in-process"""
    census = census if census is not None else enumerate_locations(circuit, seed)
    label = tuple(int(w) for w in label)
    for w, n in zip(label, census.counts):
        if w > n:
            raise ValueError(f"Subset {label} exceeds the census {census.counts}")
    return sample_subsets([label], circuit, census, {sum(label): shots}, seed)[label]


@dataclass(frozen=True)
class Bounds:
    lower: float
    point: float
    upper: float

    @property
    def gap(self) -> float:
        return self.upper - self.lower


def combine(
    estimates: Union[Mapping[SubsetLabel, SubsetEstimate], Iterable[SubsetEstimate]],
    p,
    census: Counts,
) -> Dict[str, Bounds]:
    """
    Lower and upper bound of the logical failure rates at ``p``

    The lower bound weighs each sampled subset by its occurrence
    probability; the upper bound adds the probability mass of every subset
    that was not sampled, which is assumed to always fail.
    """
    items = estimates.values() if isinstance(estimates, Mapping) else estimates
    lower = dict.fromkeys(FAILURE_TYPES, 0.0)
    covered = 0.0
    for estimate in items:
        a = occurrence_prob(estimate.label, p, census)
        covered += a
        for failure_type in FAILURE_TYPES:
            lower[failure_type] += a * estimate.rate(failure_type)
    missing = max(0.0, 1.0 - covered)
    return {
        t: Bounds(lower[t], lower[t], min(1.0, lower[t] + missing)) for t in FAILURE_TYPES
    }


def mean_resources(
    estimates: Mapping[SubsetLabel, SubsetEstimate], params: NoiseParams, census: Counts
) -> Dict[str, float]:
    """Occurrence-weighted mean tally over the sampled subsets, plus the mean duration"""
    weights = {label: occurrence_prob(label, params, census) for label in estimates}
    total = sum(weights.values())
    means = dict.fromkeys(TALLY_FIELDS, 0.0)
    if total <= 0:
        return dict(means, duration=0.0)
    for label, estimate in estimates.items():
        for key, value in estimate.mean_tally.items():
            means[key] += weights[label] * value / total
    means["duration"] = means["fixed_elapsed"] + means["crossing_events"] * params.crossing_time
    return means


@dataclass
class SweepResult:
    """Bounds and mean resources of one protocol over a grid of parameter points"""

    protocol: str
    axis: Optional[str]
    points: List[NoiseParams]
    bounds: List[Dict[str, Bounds]]
    resources: List[Dict[str, float]]

    def to_frame(self, prefix: bool = False) -> pd.DataFrame:
        """Columns carry their unit as a suffix: _prob, _count or _s"""
        rows = []
        for params, bounds, resources in zip(self.points, self.bounds, self.resources):
            row = {}
            if self.axis is not None:
                row[f"{self.axis}_prob"] = getattr(params, self.axis)
            else:
                row.update({f"{name}_prob": value for name, value in zip(PARAMETER_NAMES, params.vector())})
            for failure_type in FAILURE_TYPES:
                b = bounds[failure_type]
                row[f"pL_{failure_type}_lower_prob"] = b.lower
                row[f"pL_{failure_type}_point_prob"] = b.point
                row[f"pL_{failure_type}_upper_prob"] = b.upper
                row[f"pL_{failure_type}_gap_prob"] = b.gap
            for key in TALLY_FIELDS:
                if key == "fixed_elapsed":
                    continue
                row[f"{key}_mean_count"] = resources[key]
            row["duration_mean_s"] = resources["duration"]
            rows.append(row)
        frame = pd.DataFrame(rows)
        if prefix:
            axis_columns = [c for c in frame.columns if c.startswith("p_")]
            frame = frame.rename(
                columns={c: f"{self.protocol}:{c}" for c in frame.columns if c not in axis_columns}
            )
        return frame


def check_hypercube(points: Iterable[NoiseParams], p_max: Sequence[float]):
    """Rejects any point outside the box the subsets were selected for"""
    for params in points:
        vector = params.vector()
        outside = [
            name
            for name, value, limit in zip(PARAMETER_NAMES, vector, p_max)
            if value > limit * (1 + 1e-9)
        ]
        if outside:
            raise ConfigError(
                f"Grid point {dict(zip(PARAMETER_NAMES, vector))} exceeds the sampled hypercube "
                f"in {outside}"
            )


def sweep(
    grid: Sequence[NoiseParams],
    estimates: Mapping[SubsetLabel, SubsetEstimate],
    census: Counts,
    p_max: Optional[Sequence[float]] = None,
    axis: Optional[str] = None,
    protocol: str = "",
) -> SweepResult:
    """Re-weights fixed subset estimates at every grid point without simulating"""
    grid = list(grid)
    if p_max is not None:
        check_hypercube(grid, p_max)
    bounds = [combine(estimates, params, census) for params in grid]
    resources = [mean_resources(estimates, params, census) for params in grid]
    return SweepResult(protocol, axis, grid, bounds, resources)


def make_grid(base: NoiseParams, axis: str, values: Sequence[float], couple_p5q: bool = True) -> List[NoiseParams]:
    if axis not in PARAMETER_NAMES:
        raise ConfigError(f"Unknown sweep axis {axis!r}, expected one of {PARAMETER_NAMES}")
    if not values:
        raise ConfigError("Sweep grid is empty")
    return [base.with_parameter(axis, float(v), couple_p5q) for v in values]


def hypercube(grid: Sequence[NoiseParams]) -> Tuple[float, ...]:
    """Componentwise maximum of the grid"""
    return tuple(float(v) for v in np.max(np.array([p.vector() for p in grid]), axis=0))


@dataclass(frozen=True)
class TraditionalEstimate:
    shots: int
    failures_z: int
    failures_x: int
    # Mean injected errors per fault class
    mean_weights: Tuple[float, ...]

    def rate(self, failure_type: str) -> float:
        failures = self.failures_z if failure_type == "Z" else self.failures_x
        return failures / self.shots if self.shots else 0.0

    def std_error(self, failure_type: str) -> float:
        if not self.shots:
            return 0.0
        p = self.rate(failure_type)
        return math.sqrt(p * (1 - p) / self.shots)


def _traditional_chunk(circuit: DynamicCircuit, params: NoiseParams, seed: int, task):
    start, stop = task
    z = x = 0
    weights = np.zeros(len(FAULT_CLASSES))
    for shot in range(start, stop):
        rng = derive_rng(seed, TRADITIONAL_STREAM, shot)
        result = execute(circuit, faults=BernoulliFaults(params, rng), rng=rng)
        z += int(result.result.z_failure)
        x += int(result.result.x_failure)
        weights += result.realized_weights
    return z, x, weights


def traditional_sampler(
    circuit: DynamicCircuit,
    params: Optional[NoiseParams] = None,
    shots: int = 10_000,
    seed: int = 0,
    workers: int = 1,
) -> TraditionalEstimate:
    """Plain Monte Carlo with an independent error draw at every location"""
    params = params if params is not None else circuit.params
    tasks = [(start, min(start + SHOT_CHUNK, shots)) for start in range(0, shots, SHOT_CHUNK)]
    partials = _map(functools.partial(_traditional_chunk, circuit, params, seed), tasks, workers)
    z = sum(p[0] for p in partials)
    x = sum(p[1] for p in partials)
    weights = sum((p[2] for p in partials), np.zeros(len(FAULT_CLASSES)))
    mean = tuple(float(w) / shots for w in weights) if shots else (0.0,) * len(FAULT_CLASSES)
    logger.info("Traditional sampling of %s: %d shots, %d Z and %d X failures", circuit.name, shots, z, x)
    return TraditionalEstimate(shots, z, x, mean)


def find_crossing(axis: Sequence[float], series_a: Sequence[float], series_b: Sequence[float]) -> Optional[float]:
    """
    Axis value where two positive curves cross, interpolated linearly in log-log

    Points where either curve is not positive are skipped. Returns None
    when the curves do not cross on the grid.
    """
    points = [
        (math.log(x), math.log(a) - math.log(b))
        for x, a, b in zip(axis, series_a, series_b)
        if x > 0 and a > 0 and b > 0
    ]
    for (x0, d0), (x1, d1) in zip(points, points[1:]):
        if d0 == 0:
            return math.exp(x0)
        if d0 * d1 < 0:
            t = d0 / (d0 - d1)
            return math.exp(x0 + t * (x1 - x0))
    if points and points[-1][1] == 0:
        return math.exp(points[-1][0])
    return None


@dataclass(frozen=True)
class LeadingTerm:
    """c * prod(p_i ** w_i) with c = prod(C(n_i, w_i)) * p_hat"""

    label: SubsetLabel
    coefficient: float

    def evaluate(self, p) -> float:
        return self.coefficient * float(np.prod([q**w for q, w in zip(_vector(p), self.label)]))


def leading_order(
    estimates: Union[Mapping[SubsetLabel, SubsetEstimate], Iterable[SubsetEstimate]], census: Counts
) -> Dict[str, List[LeadingTerm]]:
    """Lowest-weight terms of the logical failure polynomial, per failure type"""
    counts = _counts(census)
    items = list(estimates.values() if isinstance(estimates, Mapping) else estimates)
    terms: Dict[str, List[LeadingTerm]] = {}
    for failure_type in FAILURE_TYPES:
        failing = [e for e in items if e.rate(failure_type) > 0]
        if not failing:
            terms[failure_type] = []
            continue
        lowest = min(sum(e.label) for e in failing)
        terms[failure_type] = [
            LeadingTerm(
                e.label,
                float(np.prod([comb(n, w, exact=True) for n, w in zip(counts, e.label)]))
                * e.rate(failure_type),
            )
            for e in sorted(failing, key=lambda e: e.label)
            if sum(e.label) == lowest
        ]
    return terms


def bare_reference_rows(grid: Sequence[NoiseParams]) -> pd.DataFrame:
    rows = []
    for params in grid:
        z, x = bare_bell_reference(params.p_2q)
        rows.append({"bare_Z_prob": z, "bare_X_prob": x})
    return pd.DataFrame(rows)


# -- persistence ------------------------------------------------------------------


def estimates_frame(estimates: Mapping[SubsetLabel, SubsetEstimate]) -> pd.DataFrame:
    rows = []
    for label in sorted(estimates, key=lambda lbl: (sum(lbl), lbl)):
        estimate = estimates[label]
        row = {
            "label": format_label(label),
            "weight_count": sum(label),
            "shots_count": estimate.shots,
            "failures_Z_count": estimate.failures_z,
            "failures_X_count": estimate.failures_x,
            "exhaustive": estimate.exhaustive,
        }
        row.update({f"sum_{k}": v for k, v in estimate.tally_sums.items()})
        row["realized"] = json.dumps(estimate.realized, sort_keys=True)
        rows.append(row)
    return pd.DataFrame(rows)


def estimates_from_frame(frame: pd.DataFrame) -> Dict[SubsetLabel, SubsetEstimate]:
    estimates = {}
    for row in frame.to_dict(orient="records"):
        label = parse_label(str(row["label"]))
        estimates[label] = SubsetEstimate(
            label,
            int(row["shots_count"]),
            int(row["failures_Z_count"]),
            int(row["failures_X_count"]),
            bool(row["exhaustive"]),
            {k: float(row[f"sum_{k}"]) for k in TALLY_FIELDS},
            {k: int(v) for k, v in json.loads(row["realized"]).items()},
        )
    return estimates


def save_estimates(path: str, estimates: Mapping[SubsetLabel, SubsetEstimate], metadata: Dict):
    """Writes the subset table as CSV and the run metadata as a JSON sidecar"""
    estimates_frame(estimates).to_csv(path, index=False, float_format="%.17g")
    with open(metadata_path(path), "w") as stream:
        json.dump(dict(metadata, schema_version=CSV_SCHEMA_VERSION), stream, indent=2, sort_keys=True)
    logger.info("Wrote %d subset estimates to %s", len(estimates), path)


def load_estimates(path: str) -> Tuple[Dict[SubsetLabel, SubsetEstimate], Dict]:
    try:
        frame = pd.read_csv(path, dtype={"label": str})
        with open(metadata_path(path)) as stream:
            metadata = json.load(stream)
    except FileNotFoundError as e:
        raise ConfigError(f"Results file {e.filename} not found")
    if metadata.get("schema_version") != CSV_SCHEMA_VERSION:
        raise ConfigError(
            f"Results schema {metadata.get('schema_version')!r} does not match {CSV_SCHEMA_VERSION!r}"
        )
    return estimates_from_frame(frame), metadata


def metadata_path(path: str) -> str:
    return f"{path}.meta.json"


def subsets_by_weight(labels: Iterable[SubsetLabel]) -> Dict[int, int]:
    histogram = defaultdict(int)
    for label in labels:
        histogram[sum(label)] += 1
    return dict(sorted(histogram.items()))
