import json
import os
from typing import Dict, List, Optional

from .constants import (
    CROSSING_ACCOUNTING,
    CROSSING_PER_ION,
    DEFAULT_OUT_DIR,
    DELTA_DEFAULT,
    PRESET_ANTICIPATED,
    PRESETS,
    PROTOCOL_DEFAULT,
    PROTOCOL_LATTICE_SURGERY,
    PROTOCOL_TRANSVERSAL,
    PROTOCOLS,
    SEED_DEFAULT,
    SHOTS_PER_WEIGHT_DEFAULT,
    SWEEP_AXES,
    WEIGHT_CAPS,
    WORKERS_DEFAULT,
)
from .exceptions import ConfigError
from .noise import NoiseParams


_UNSET = object()


class JSONConfig:
    IGNORE_FIELDS = []

    def __init__(self, config_dict, *args, **kwargs):
        self.config_dict = config_dict

    @classmethod
    def from_json_file(cls, config_json_path, *args, **kwargs):
        config_json_path = os.path.expanduser(config_json_path)

        if os.path.isfile(config_json_path):
            with open(config_json_path, "r") as fh:
                try:
                    config_dict = json.load(fh)
                except json.JSONDecodeError as e:
                    raise ConfigError(f"{config_json_path} is not valid JSON: {e}")
        else:
            config_dict = {}
        return cls(config_dict, *args, **kwargs)

    @classmethod
    def _fetch_or_raise_error(cls, data, key):
        try:
            return data[key]
        except KeyError:
            raise ConfigError(f"{key} not found in {data} and is required")

    @classmethod
    def _override_data(cls, default_data, override_data):
        data = {}

        # Set default config values from outermost scope
        for k, v in default_data.items():
            if k in cls.IGNORE_FIELDS:
                continue
            data[k] = v

        if override_data:
            for k, v in override_data.items():
                default_value = data.get(k)

                if isinstance(default_value, list):
                    # List config values will be extended from default
                    data[k] = default_value + list(v)
                elif isinstance(default_value, dict):
                    # Shallow merge
                    data[k] = dict(default_value, **v)
                else:
                    data[k] = v
        return data

    def get_attribute(self, key, default=_UNSET):
        try:
            return self._fetch_or_raise_error(self.config_dict, key)
        except ConfigError:
            if default is _UNSET:
                raise
            return default

    def with_overrides(self, **overrides):
        """A copy with the non-None overrides applied, as given on the command line"""
        data = dict(self.config_dict)
        data.update({k: v for k, v in overrides.items() if v is not None})
        copy = self.__class__.__new__(self.__class__)
        JSONConfig.__init__(copy, data)
        return copy

    def __str__(self):
        return str(self.config_dict)


class JSONConfigWithProfile(JSONConfig):
    IGNORE_FIELDS = ["profiles", "default_profile"]

    def __init__(self, config_dict, profile_name=None):
        config_dict = self.normalize_data(config_dict, profile_name)

        super().__init__(config_dict=config_dict)

    @classmethod
    def normalize_data(cls, raw_config, profile_name):
        profile_data = None

        if profile_name is None and "default_profile" in raw_config:
            profile_name = raw_config["default_profile"]
        if profile_name:
            profiles = cls._fetch_or_raise_error(raw_config, "profiles")
            profile_data = cls._fetch_or_raise_error(profiles, profile_name)

        return cls._override_data(raw_config, profile_data)


class RunConfigProfile(JSONConfigWithProfile):
    @property
    def protocol(self) -> str:
        return self.get_attribute("protocol", PROTOCOL_DEFAULT)

    @property
    def preset(self) -> str:
        return self.get_attribute("preset", PRESET_ANTICIPATED)

    @property
    def noise(self) -> Dict[str, object]:
        return self.get_attribute("noise", {})

    @property
    def sweep_axis(self) -> Optional[str]:
        return self.get_attribute("sweep_axis", None)

    @property
    def sweep_grid(self) -> List[float]:
        return [float(v) for v in self.get_attribute("sweep_grid", [])]

    @property
    def delta(self) -> float:
        return float(self.get_attribute("delta", DELTA_DEFAULT))

    @property
    def weight_cap(self) -> int:
        return int(self.get_attribute("weight_cap", WEIGHT_CAPS.get(self.protocol, 5)))

    def weight_cap_for(self, protocol: str) -> int:
        return int(self.get_attribute("weight_cap", WEIGHT_CAPS.get(protocol, 5)))

    @property
    def sweep_protocols(self) -> List[str]:
        return self.get_attribute("sweep_protocols", [PROTOCOL_TRANSVERSAL, PROTOCOL_LATTICE_SURGERY])

    @property
    def shots_per_weight(self) -> Dict[int, int]:
        configured = self.get_attribute("shots_per_weight", {})
        shots = {2: SHOTS_PER_WEIGHT_DEFAULT}
        shots.update({int(k): int(v) for k, v in configured.items()})
        return shots

    @property
    def seed(self) -> int:
        return int(self.get_attribute("seed", SEED_DEFAULT))

    @property
    def out_dir(self) -> str:
        return os.path.expanduser(self.get_attribute("out_dir", DEFAULT_OUT_DIR))

    @property
    def crossing_accounting(self) -> str:
        return self.get_attribute("crossing_accounting", CROSSING_PER_ION)

    @property
    def couple_p5q(self) -> bool:
        return bool(self.get_attribute("couple_p5q", True))

    @property
    def workers(self) -> int:
        return int(self.get_attribute("workers", WORKERS_DEFAULT))

    @property
    def transversal_layout(self) -> str:
        return self.get_attribute("transversal_layout", PROTOCOL_TRANSVERSAL)

    def noise_params(self) -> NoiseParams:
        return NoiseParams.preset(self.preset, **self.noise)

    def validate(self):
        if self.protocol not in PROTOCOLS:
            raise ConfigError(f"Unknown protocol {self.protocol!r}, expected one of {PROTOCOLS}")
        unknown = [p for p in self.sweep_protocols if p not in PROTOCOLS]
        if unknown:
            raise ConfigError(f"Unknown sweep protocols {unknown}, expected some of {PROTOCOLS}")
        if self.preset not in PRESETS:
            raise ConfigError(f"Unknown preset {self.preset!r}, expected one of {PRESETS}")
        if self.sweep_axis is not None and self.sweep_axis not in SWEEP_AXES:
            raise ConfigError(f"Unknown sweep axis {self.sweep_axis!r}, expected one of {SWEEP_AXES}")
        if any(not 0 <= v < 1 for v in self.sweep_grid):
            raise ConfigError(f"Sweep grid values must be in [0, 1), got {self.sweep_grid}")
        if not 0 < self.delta < 1:
            raise ConfigError(f"delta must be in (0, 1), got {self.delta}")
        if self.weight_cap < 1:
            raise ConfigError(f"weight_cap must be at least 1, got {self.weight_cap}")
        if any(w < 0 or n < 0 for w, n in self.shots_per_weight.items()):
            raise ConfigError(f"shots_per_weight must be non-negative, got {self.shots_per_weight}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.crossing_accounting not in CROSSING_ACCOUNTING:
            raise ConfigError(
                f"Unknown crossing accounting {self.crossing_accounting!r}, "
                f"expected one of {CROSSING_ACCOUNTING}"
            )
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}")
        try:
            self.noise_params()
        except TypeError as e:
            raise ConfigError(f"Invalid noise overrides {self.noise}: {e}")
        return self
