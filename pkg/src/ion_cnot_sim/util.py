import importlib.metadata as importlib_metadata
import logging
import math
import os
from typing import Iterable, Sequence

import colorlog
import numpy as np

log_level = os.environ.get("ION_CNOT_SIM_LOG_LEVEL", "INFO")
logger = logging.getLogger("ion-cnot-sim")
logger.setLevel(getattr(logging, log_level))
logFormatter = colorlog.ColoredFormatter(
    fmt="%(log_color)s%(name)s :: %(levelname)-8s :: %(message)s"
)
handler = logging.StreamHandler()
handler.setFormatter(logFormatter)
logger.addHandler(handler)


def derive_rng(master_seed: int, *key: int) -> np.random.Generator:
    """
    Returns a generator that depends only on the master seed and the key path

    The key is typically (subset index, shot index) so that every shot is
    reproducible no matter which worker runs it or in which order.
    """
    if master_seed < 0:
        raise ValueError(f"Seed must be non-negative, got {master_seed}")
    sequence = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(key))
    return np.random.default_rng(sequence)


def label_key(label: Sequence[int]) -> int:
    """Folds a subset label into a single non-negative integer for seeding"""
    key = 0
    for w in label:
        if w < 0:
            raise ValueError(f"Subset weights must be non-negative, got {label}")
        key = key * 1_000_003 + int(w)
    return key


def ceil_quanta(duration: float, quantum: float) -> int:
    if quantum <= 0:
        raise ValueError(f"Time quantum must be positive, got {quantum}")
    if duration <= 0:
        return 0
    # Guard against float noise such as 90e-6 / 30e-6 == 3.0000000000000004
    return int(math.ceil(round(duration / quantum, 9)))


def format_label(label: Iterable[int]) -> str:
    return "-".join(str(int(w)) for w in label)


def parse_label(text: str):
    try:
        return tuple(int(w) for w in text.split("-"))
    except ValueError:
        raise ValueError(f"Malformed subset label {text!r}")


def code_version() -> str:
    try:
        return importlib_metadata.version("ion-cnot-sim")
    except importlib_metadata.PackageNotFoundError:
        return "unknown"
