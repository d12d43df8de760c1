import json
import os
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from .circuit import Census, DynamicCircuit, enumerate_locations
from .config import RunConfigProfile
from .constants import (
    CROSSING_ACCOUNTING,
    CROSSING_PER_ION,
    CSV_SCHEMA_VERSION,
    P_CROSS_HIGH,
    P_CROSS_LOW,
    PROTOCOL_LATTICE_SURGERY,
    REFERENCE_DURATIONS,
    REFERENCE_RESOURCES,
)
from .exceptions import ConfigError
from .noise import FAULT_CLASSES, NoiseParams
from .protocols import FtReport, ProtocolOptions, build_circuit, verify_ft
from .sampler import (
    FAILURE_TYPES,
    SubsetEstimate,
    SubsetLabel,
    SweepResult,
    bare_reference_rows,
    combine,
    find_crossing,
    hypercube,
    leading_order,
    load_estimates,
    make_grid,
    metadata_path,
    sample_subsets,
    save_estimates,
    select_subsets,
    subsets_by_weight,
    sweep,
    traditional_sampler,
)
from .schedule import FLAG_TAGS, builtin_schedules, compile_schedule
from .util import code_version, format_label, logger

STATIC_FIELDS = ("one_qubit_gates", "ms2_gates", "ms5_gates", "junction_crossings")
# Relative tolerance when matching a duration against its reference range
DURATION_MATCH = 0.2
# Module name of the flag-free row in the static resource table
FLAG_FREE_MODULE = "without-flags"


@dataclass
class SubsetRun:
    protocol: str
    census: Census
    p_max: Tuple[float, ...]
    labels: List[SubsetLabel]
    estimates: Dict[SubsetLabel, SubsetEstimate]
    path: str


def write_table(frame: pd.DataFrame, path: str, metadata: Optional[Dict] = None) -> str:
    """CSV with a JSON sidecar; identical inputs give identical bytes"""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.12g")
    if metadata is not None:
        with open(metadata_path(path), "w") as stream:
            json.dump(dict(metadata, schema_version=CSV_SCHEMA_VERSION), stream, indent=2, sort_keys=True)
    logger.info("Wrote %s", path)
    return path


def _within(value: float, reference: Tuple[float, float], tolerance: float) -> bool:
    low, high = reference
    return low * (1 - tolerance) <= value <= high * (1 + tolerance)


class ExperimentClient:
    def __init__(
        self,
        params: NoiseParams,
        options: ProtocolOptions,
        out_dir: str,
        seed: int,
        workers: int,
        delta: float,
        weight_caps: Dict[str, int],
        shots_per_weight: Dict[int, int],
        sweep_axis: Optional[str] = None,
        sweep_grid: Sequence[float] = (),
        couple_p5q: bool = True,
        protocol: str = PROTOCOL_LATTICE_SURGERY,
        sweep_protocols: Sequence[str] = (),
    ):
        self.params = params
        self.options = options
        self.out_dir = out_dir
        self.seed = seed
        self.workers = workers
        self.delta = delta
        self.weight_caps = weight_caps
        self.shots_per_weight = shots_per_weight
        self.sweep_axis = sweep_axis
        self.sweep_grid = list(sweep_grid)
        self.couple_p5q = couple_p5q
        self.protocol = protocol
        self.sweep_protocols = list(sweep_protocols) or [protocol]

    @classmethod
    def from_config(cls, config: RunConfigProfile):
        config.validate()
        protocols = list(dict.fromkeys([config.protocol] + config.sweep_protocols))
        return cls(
            params=config.noise_params(),
            options=ProtocolOptions(
                accounting=config.crossing_accounting,
                transversal_layout=config.transversal_layout,
            ),
            out_dir=config.out_dir,
            seed=config.seed,
            workers=config.workers,
            delta=config.delta,
            weight_caps={p: config.weight_cap_for(p) for p in protocols},
            shots_per_weight=config.shots_per_weight,
            sweep_axis=config.sweep_axis,
            sweep_grid=config.sweep_grid,
            couple_p5q=config.couple_p5q,
            protocol=config.protocol,
            sweep_protocols=config.sweep_protocols,
        )

    def _options(self, accounting: Optional[str] = None, drop_tags: Sequence[str] = ()) -> ProtocolOptions:
        return ProtocolOptions(
            accounting=accounting or self.options.accounting,
            drop_tags=tuple(drop_tags),
            transversal_layout=self.options.transversal_layout,
        )

    def circuit(self, protocol: str, accounting: Optional[str] = None, drop_tags: Sequence[str] = ()) -> DynamicCircuit:
        return build_circuit(protocol, self.params, self._options(accounting, drop_tags))

    def _out(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def _metadata(self, **extra) -> Dict:
        return dict(
            seed=self.seed,
            code_version=code_version(),
            noise=self.params.to_dict(),
            crossing_accounting=self.options.accounting,
            transversal_layout=self.options.transversal_layout,
            **extra,
        )

    def grid(self) -> List[NoiseParams]:
        if self.sweep_axis is None:
            return [self.params]
        return make_grid(self.params, self.sweep_axis, self.sweep_grid, self.couple_p5q)

    # -- verification -----------------------------------------------------------

    def verify_ft(self, protocol: Optional[str] = None, drop_tags: Sequence[str] = ()) -> FtReport:
        protocol = protocol or self.protocol
        logger.info("Verifying single-fault tolerance of %s", protocol)
        report = verify_ft(protocol, self.params, self._options(drop_tags=drop_tags), self.seed, self.workers)
        logger.info("%s: %d faults checked, %d failures", protocol, report.checked, len(report.failures))
        return report

    # -- subset sampling --------------------------------------------------------

    def subset_run(self, protocol: str, grid: Sequence[NoiseParams]) -> SubsetRun:
        """Selects subsets for the hypercube spanned by ``grid``, samples and stores them"""
        circuit = self.circuit(protocol)
        census = enumerate_locations(circuit, self.seed)
        logger.info("Census of %s: %s", protocol, census.as_dict())
        p_max = hypercube(grid)
        weight_cap = self.weight_caps.get(protocol, 5)
        labels = select_subsets(p_max, census, self.delta, weight_cap)
        logger.info("Subsets of %s by weight: %s", protocol, subsets_by_weight(labels))
        estimates = sample_subsets(labels, circuit, census, self.shots_per_weight, self.seed, self.workers)
        os.makedirs(self.out_dir, exist_ok=True)
        path = self._out(f"{protocol}.subsets.csv")
        save_estimates(
            path,
            estimates,
            self._metadata(
                protocol=protocol,
                census=census.as_dict(),
                p_max=list(p_max),
                delta=self.delta,
                weight_cap=weight_cap,
                shots_per_weight={str(k): v for k, v in sorted(self.shots_per_weight.items())},
                subsets=[format_label(label) for label in labels],
            ),
        )
        return SubsetRun(protocol, census, p_max, labels, estimates, path)

    def _sweep_results(self) -> Dict[str, SweepResult]:
        grid = self.grid()
        results = {}
        for protocol in self.sweep_protocols:
            run = self.subset_run(protocol, grid)
            results[protocol] = sweep(grid, run.estimates, run.census, run.p_max, self.sweep_axis, protocol)
        return results

    def _crossings(self, results: Dict[str, SweepResult], column: str) -> Dict[str, Optional[float]]:
        if self.sweep_axis is None or len(results) != 2:
            return {}
        (a_name, a), (b_name, b) = results.items()
        frame_a, frame_b = a.to_frame(), b.to_frame()
        axis = frame_a[f"{self.sweep_axis}_prob"].tolist()
        crossing = find_crossing(axis, frame_a[column].tolist(), frame_b[column].tolist())
        return {f"{a_name} vs {b_name}": crossing}

    def sweep(self) -> Tuple[str, Dict[str, Optional[float]]]:
        """Bounds of every sweep protocol over the configured grid, in one CSV"""
        if self.sweep_axis is None or not self.sweep_grid:
            raise ConfigError("A sweep needs exactly one sweep_axis and a non-empty sweep_grid")
        results = self._sweep_results()
        frames = []
        for k, result in enumerate(results.values()):
            frame = result.to_frame(prefix=True)
            frames.append(frame if k == 0 else frame.drop(columns=[f"{self.sweep_axis}_prob"]))
        bare = bare_reference_rows(self.grid())
        combined = pd.concat([frames[0].iloc[:, :1], bare] + [frames[0].iloc[:, 1:]] + frames[1:], axis=1)
        crossings = self._crossings(results, "pL_Z_point_prob")
        for pair, value in crossings.items():
            logger.info("Logical-Z break-even of %s at %s=%s", pair, self.sweep_axis, value)
        path = write_table(
            combined,
            self._out(f"sweep-{self.sweep_axis}.csv"),
            self._metadata(
                sweep_axis=self.sweep_axis,
                sweep_grid=self.sweep_grid,
                protocols=list(results),
                logical_z_crossing=crossings,
            ),
        )
        return path, crossings

    # -- resources --------------------------------------------------------------

    def _duration(self, census: Census, p_cross: float) -> float:
        return census.tally.elapsed(self.params.with_parameter("p_cross", p_cross))

    def static_resources(self) -> pd.DataFrame:
        """Error-free counts and durations of every sweep protocol under both crossing accountings"""
        rows = []
        for protocol in self.sweep_protocols:
            reference = REFERENCE_RESOURCES.get(protocol, {})
            durations = REFERENCE_DURATIONS.get(protocol)
            for accounting in CROSSING_ACCOUNTING:
                census = enumerate_locations(self.circuit(protocol, accounting), self.seed)
                tally = census.tally.as_dict()
                row = {"protocol": protocol, "module": "total", "accounting": accounting}
                for key in STATIC_FIELDS:
                    row[f"{key}_count"] = tally[key]
                    row[f"{key}_reference_count"] = reference.get(key)
                row["duration_low_s"] = self._duration(census, P_CROSS_LOW)
                row["duration_high_s"] = self._duration(census, P_CROSS_HIGH)
                if durations:
                    row["duration_low_matches"] = _within(row["duration_low_s"], durations[0], DURATION_MATCH)
                    row["duration_high_matches"] = _within(row["duration_high_s"], durations[1], DURATION_MATCH)
                rows.append(row)
                if accounting == CROSSING_PER_ION:
                    deviations = {
                        key: (tally[key], value) for key, value in reference.items() if tally[key] != value
                    }
                    if deviations:
                        logger.warning("%s deviates from the reference counts: %s", protocol, deviations)
            if protocol == PROTOCOL_LATTICE_SURGERY:
                rows.extend(self._module_rows(protocol))
        return pd.DataFrame(rows)

    def _module_rows(self, protocol: str) -> List[Dict]:
        """
        Per-stage counts of the error-free lattice-surgery path

        The last row is the same path with the flag couplings removed, the
        fewest gates any single-ancilla compilation of its readouts can use.
        """
        schedule = builtin_schedules()[protocol]
        parts = [(name, schedule.module(name)) for name in schedule.module_names]
        parts.append((FLAG_FREE_MODULE, schedule.without_tags(FLAG_TAGS)))
        rows = []
        for name, part in parts:
            compiled = compile_schedule(part, self.params, accounting=CROSSING_PER_ION)
            tally = compiled.tally.as_dict()
            row = {"protocol": protocol, "module": name, "accounting": CROSSING_PER_ION}
            row.update({f"{key}_count": tally[key] for key in STATIC_FIELDS})
            row["duration_low_s"] = compiled.tally.elapsed(self.params.with_parameter("p_cross", P_CROSS_LOW))
            row["duration_high_s"] = compiled.tally.elapsed(self.params.with_parameter("p_cross", P_CROSS_HIGH))
            rows.append(row)
        return rows

    def resources(self) -> Tuple[List[str], Dict[str, Optional[float]]]:
        """Static counts, plus noise-dependent averages when a sweep is configured"""
        paths = [write_table(self.static_resources(), self._out("resources.csv"), self._metadata())]
        crossings = {}
        if self.sweep_axis is not None and self.sweep_grid:
            results = self._sweep_results()
            frames = []
            for k, result in enumerate(results.values()):
                frame = result.to_frame(prefix=True)
                keep = [c for c in frame.columns if not c.split(":")[-1].startswith("pL_")]
                if k:
                    keep = [c for c in keep if c != f"{self.sweep_axis}_prob"]
                frames.append(frame[keep])
            crossings = self._crossings(results, "duration_mean_s")
            for pair, value in crossings.items():
                logger.info("Duration break-even of %s at %s=%s", pair, self.sweep_axis, value)
            paths.append(
                write_table(
                    pd.concat(frames, axis=1),
                    self._out(f"resources-{self.sweep_axis}.csv"),
                    self._metadata(sweep_axis=self.sweep_axis, sweep_grid=self.sweep_grid, duration_crossing=crossings),
                )
            )
        return paths, crossings

    # -- export -----------------------------------------------------------------

    def export(self, results_path: str, out_path: Optional[str] = None) -> str:
        """Re-weights stored subset estimates onto the configured grid"""
        estimates, metadata = load_estimates(results_path)
        counts = tuple(int(metadata["census"][c.value]) for c in FAULT_CLASSES)
        protocol = metadata.get("protocol", "")
        result = sweep(self.grid(), estimates, counts, metadata["p_max"], self.sweep_axis, protocol)
        frame = pd.concat([result.to_frame(), bare_reference_rows(result.points)], axis=1)
        out_path = out_path or self._out(f"export-{protocol}.csv")
        leading = {
            t: [dict(label=format_label(term.label), coefficient=term.coefficient) for term in terms]
            for t, terms in leading_order(estimates, counts).items()
        }
        write_table(frame, out_path, dict(source=os.path.basename(results_path), protocol=protocol, leading_order=leading))
        return out_path

    def export_schedule(self, name: str, out_path: Optional[str] = None) -> str:
        schedules = builtin_schedules()
        if name not in schedules:
            raise ConfigError(f"Unknown schedule {name!r}, expected one of {sorted(schedules)}")
        out_path = out_path or self._out(f"{name}.schedule.txt")
        os.makedirs(os.path.dirname(os.path.abspath(out_path)), exist_ok=True)
        with open(out_path, "w") as stream:
            stream.write(schedules[name].to_text())
        logger.info("Wrote schedule %s to %s", name, out_path)
        return out_path

    def export_circuit(self, protocol: str, out_path: Optional[str] = None) -> str:
        out_path = out_path or self._out(f"{protocol}.circuit.txt")
        os.makedirs(os.path.dirname(os.path.abspath(out_path)), exist_ok=True)
        with open(out_path, "w") as stream:
            stream.write(self.circuit(protocol).dump())
        logger.info("Wrote circuit of %s to %s", protocol, out_path)
        return out_path

    # -- single point -----------------------------------------------------------

    def run_point(self, protocol: Optional[str] = None, traditional_shots: int = 0) -> Dict:
        """Bounds at the configured noise point, optionally next to a plain Monte Carlo estimate"""
        protocol = protocol or self.protocol
        run = self.subset_run(protocol, [self.params])
        bounds = combine(run.estimates, self.params, run.census)
        report = dict(
            protocol=protocol,
            noise=self.params.to_dict(),
            subsets=len(run.labels),
            bounds={t: dict(lower=b.lower, point=b.point, upper=b.upper) for t, b in bounds.items()},
        )
        if traditional_shots:
            estimate = traditional_sampler(self.circuit(protocol), self.params, traditional_shots, self.seed, self.workers)
            report["traditional"] = {
                t: dict(rate=estimate.rate(t), std_error=estimate.std_error(t)) for t in FAILURE_TYPES
            }
            report["traditional"]["shots"] = traditional_shots
        os.makedirs(self.out_dir, exist_ok=True)
        path = self._out(f"run-{protocol}.json")
        with open(path, "w") as stream:
            json.dump(dict(report, seed=self.seed, code_version=code_version()), stream, indent=2, sort_keys=True)
        logger.info("Wrote %s", path)
        return report


def create_experiment_client(config: RunConfigProfile) -> ExperimentClient:
    return ExperimentClient.from_config(config)
