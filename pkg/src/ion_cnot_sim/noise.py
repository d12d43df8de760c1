import enum
import math
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple

import numpy as np

from .constants import (
    DURATIONS,
    INFIDELITIES,
    MOTIONAL_QUANTA,
    P5Q_OVER_P2Q,
    P_CROSS_DEFAULT,
    PRESET_ANTICIPATED,
    PRESETS,
    T2_DEFAULT,
)
from .exceptions import ConfigError
from .pauli import PauliString, nontrivial_paulis
from .util import logger


class FaultClass(str, enum.Enum):
    PREP_MEASURE = "prep_measure"
    ONE_QUBIT = "one_qubit"
    TWO_QUBIT = "two_qubit"
    FIVE_QUBIT = "five_qubit"
    IDLE = "idle"
    CROSSING = "crossing"


# Fixed order of the six noise parameters in every subset label
FAULT_CLASSES: Tuple[FaultClass, ...] = tuple(FaultClass)
PARAMETER_NAMES = ("p_m", "p_1q", "p_2q", "p_5q", "p_idle", "p_cross")


def p_idle(t: float, T2: float) -> float:
    """Dephasing probability after idling for t seconds"""
    if t < 0:
        raise ValueError(f"Idle time must be non-negative, got {t}")
    if T2 <= 0:
        raise ValueError(f"T2 must be positive, got {T2}")
    return -math.expm1(-t / T2) / 2


def t_cross(p_cross: float, T2: float) -> float:
    """Crossing time whose dephasing equals p_cross"""
    if not 0 <= p_cross < 0.5:
        raise ValueError(f"p_cross must be in [0, 1/2), got {p_cross}")
    if T2 <= 0:
        raise ValueError(f"T2 must be positive, got {T2}")
    return -T2 * math.log1p(-2 * p_cross)


@dataclass(frozen=True)
class Channel:
    """Uniform distribution over a fixed support of Pauli labels"""

    probability: float
    support: Tuple[str, ...]

    @property
    def arity(self) -> int:
        return len(self.support[0])

    def sample(self, rng: np.random.Generator) -> str:
        return self.support[int(rng.integers(len(self.support)))]

    def draw(self, rng: np.random.Generator) -> Optional[str]:
        """A Pauli label with the channel probability, otherwise None"""
        if self.probability > 0 and rng.random() < self.probability:
            return self.sample(rng)
        return None

    def probabilities(self) -> Dict[str, float]:
        share = self.probability / len(self.support)
        return {label: share for label in self.support}


SUPPORTS: Dict[FaultClass, Tuple[str, ...]] = {
    FaultClass.PREP_MEASURE: ("X",),
    FaultClass.ONE_QUBIT: ("X", "Y", "Z"),
    FaultClass.TWO_QUBIT: nontrivial_paulis(2),
    FaultClass.FIVE_QUBIT: nontrivial_paulis(5),
    FaultClass.IDLE: ("Z",),
    FaultClass.CROSSING: ("Z",),
}


@dataclass(frozen=True)
class NoiseParams:
    """
    The six-parameter stochastic Pauli model

    ``p_idle_override`` replaces the dephasing per time quantum derived from
    T2 when a sweep sets p_idle directly.
    """

    p_m: float = INFIDELITIES[PRESET_ANTICIPATED]["p_m"]
    p_1q: float = INFIDELITIES[PRESET_ANTICIPATED]["p_1q"]
    p_2q: float = INFIDELITIES[PRESET_ANTICIPATED]["p_2q"]
    p_5q: float = INFIDELITIES[PRESET_ANTICIPATED]["p_5q"]
    p_cross: float = P_CROSS_DEFAULT
    T2: float = T2_DEFAULT
    durations: Dict[str, float] = field(
        default_factory=lambda: dict(DURATIONS[PRESET_ANTICIPATED])
    )
    time_quantum: Optional[float] = None
    pessimistic: bool = True
    p_idle_override: Optional[float] = None
    preset_name: str = PRESET_ANTICIPATED

    def __post_init__(self):
        for name in ("p_m", "p_1q", "p_2q", "p_5q"):
            value = getattr(self, name)
            if not 0 <= value < 1:
                raise ConfigError(f"{name} must be in [0, 1), got {value}")
        if not 0 <= self.p_cross < 0.5:
            raise ConfigError(f"p_cross must be in [0, 1/2), got {self.p_cross}")
        if self.p_idle_override is not None and not 0 <= self.p_idle_override <= 0.5:
            raise ConfigError(f"p_idle must be in [0, 1/2], got {self.p_idle_override}")
        if self.T2 <= 0:
            raise ConfigError(f"T2 must be positive, got {self.T2}")
        for kind, value in self.durations.items():
            if value <= 0:
                raise ConfigError(f"Duration of {kind} must be positive, got {value}")
        if self.time_quantum is None:
            object.__setattr__(self, "time_quantum", self.durations["split_merge"])
        if self.time_quantum <= 0:
            raise ConfigError(f"Time quantum must be positive, got {self.time_quantum}")

    @classmethod
    def preset(cls, name: str = PRESET_ANTICIPATED, **overrides) -> "NoiseParams":
        """Rates and durations of a named preset, with keyword overrides"""
        if name not in PRESETS:
            raise ConfigError(f"Unknown preset {name!r}, expected one of {PRESETS}")
        rates = {k: v for k, v in INFIDELITIES[name].items() if k.startswith("p_")}
        durations = dict(DURATIONS[name])
        durations.update(overrides.pop("durations", {}) or {})
        params = dict(rates, durations=durations, preset_name=name)
        params.update(overrides)
        noise = cls(**params)
        if noise.off_preset_durations():
            logger.warning(
                "Durations %s differ from the %s preset",
                sorted(noise.off_preset_durations()),
                name,
            )
        return noise

    def off_preset_durations(self):
        reference = DURATIONS.get(self.preset_name, {})
        return {
            kind
            for kind, value in self.durations.items()
            if kind in reference and not math.isclose(value, reference[kind])
        }

    @property
    def motional_quanta(self) -> Dict[str, float]:
        return dict(MOTIONAL_QUANTA.get(self.preset_name, {}))

    def duration(self, kind: str) -> float:
        """
        Elapsed time charged for one operation

        In pessimistic mode MS gates, measurements and preparations take as
        long as a split or merge, and single-qubit rotations are instantaneous.
        """
        if kind == "junction":
            return self.crossing_time
        if self.pessimistic:
            if kind in ("ms2", "ms5", "measure", "reset"):
                return self.durations["split_merge"]
            if kind == "one_qubit":
                return 0.0
        return self.durations[kind]

    @property
    def crossing_time(self) -> float:
        return t_cross(self.p_cross, self.T2)

    @property
    def p_idle(self) -> float:
        """Dephasing probability per idle time quantum"""
        if self.p_idle_override is not None:
            return self.p_idle_override
        return p_idle(self.time_quantum, self.T2)

    def vector(self) -> Tuple[float, ...]:
        """Parameter vector in the fixed class order of subset labels"""
        return (self.p_m, self.p_1q, self.p_2q, self.p_5q, self.p_idle, self.p_cross)

    def with_parameter(self, name: str, value: float, couple_p5q: bool = False) -> "NoiseParams":
        if name not in PARAMETER_NAMES:
            raise ConfigError(f"Unknown noise parameter {name!r}")
        if name == "p_idle":
            return replace(self, p_idle_override=value)
        changes = {name: value}
        if name == "p_2q" and couple_p5q:
            changes["p_5q"] = min(P5Q_OVER_P2Q * value, 0.999)
        return replace(self, **changes)

    def probability(self, fault_class: FaultClass) -> float:
        return self.vector()[FAULT_CLASSES.index(FaultClass(fault_class))]

    def channel_for(self, fault_class: FaultClass) -> Channel:
        return channel_for(fault_class, self)

    def to_dict(self) -> Dict[str, object]:
        return {
            "preset": self.preset_name,
            "p_m": self.p_m,
            "p_1q": self.p_1q,
            "p_2q": self.p_2q,
            "p_5q": self.p_5q,
            "p_idle": self.p_idle,
            "p_cross": self.p_cross,
            "T2_s": self.T2,
            "time_quantum_s": self.time_quantum,
            "pessimistic": self.pessimistic,
            "durations_s": dict(self.durations),
        }


def channel_for(fault_class: FaultClass, params: Optional[NoiseParams] = None) -> Channel:
    """The error channel of one fault class; probability 0 without params"""
    fault_class = FaultClass(fault_class)
    probability = params.probability(fault_class) if params is not None else 0.0
    return Channel(probability, SUPPORTS[fault_class])


# Two-qubit Paulis that flip the X_c X_t and the Z_c Z_t correlation of a
# Bell pair, written as (control, target)
BELL_Z_FLIPS = ("IY", "IZ", "XY", "XZ", "YI", "YX", "ZI", "ZX")
BELL_X_FLIPS = ("IX", "IY", "XI", "XZ", "YI", "YZ", "ZX", "ZY")


def bell_flip_sets() -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    """
    Enumerates which of the 15 two-qubit errors spoil each Bell correlation

    A Pauli flips X_c X_t when it anticommutes with it, which is a Z-type
    failure of the pair, and likewise for Z_c Z_t.
    """
    xx = PauliString.from_label("XX")
    zz = PauliString.from_label("ZZ")
    z_flips = tuple(p for p in nontrivial_paulis(2) if not PauliString.from_label(p).commutes(xx))
    x_flips = tuple(p for p in nontrivial_paulis(2) if not PauliString.from_label(p).commutes(zz))
    return z_flips, x_flips


def bare_bell_reference(p_2q: float) -> Tuple[float, float]:
    """Logical-Z and logical-X failure rates of an unencoded noisy CNOT"""
    if not 0 <= p_2q <= 1:
        raise ValueError(f"p_2q must be a probability, got {p_2q}")
    z_flips, x_flips = bell_flip_sets()
    total = len(SUPPORTS[FaultClass.TWO_QUBIT])
    return len(z_flips) * p_2q / total, len(x_flips) * p_2q / total
