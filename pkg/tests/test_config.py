import json
import os
import pytest
from contextlib import contextmanager
from unittest import mock

from ion_cnot_sim.config import RunConfigProfile
from ion_cnot_sim.constants import (
    CROSSING_PER_ION,
    DELTA_DEFAULT,
    PRESET_ANTICIPATED,
    PROTOCOL_FLAG_QEC,
    PROTOCOL_LATTICE_SURGERY,
    PROTOCOL_TRANSVERSAL,
    SEED_DEFAULT,
    SHOTS_PER_WEIGHT_DEFAULT,
)
from ion_cnot_sim.exceptions import ConfigError


@pytest.fixture
def mock_contents():
    return dict(protocol=PROTOCOL_TRANSVERSAL, seed=7, out_dir="~/mock_results")


@pytest.fixture
def file_open_mocker():
    @contextmanager
    def _mocker(mock_return_value, is_json=True):
        if is_json:
            mock_return_value = json.dumps(mock_return_value)

        with mock.patch("builtins.open") as mock_open:
            mock_open.side_effect = mock.mock_open(read_data=mock_return_value)
            yield mock_open

    return _mocker


@mock.patch("os.path.isfile", return_value=False)
def test_handles_file_does_not_exist(_mock_is_file):
    config = RunConfigProfile.from_json_file("file_does_not_exist")
    assert config.config_dict == {}


@mock.patch("os.path.isfile", return_value=True)
def test_handles_file_does_exist(_mock_is_file, file_open_mocker, mock_contents):
    with file_open_mocker(mock_contents):
        config = RunConfigProfile.from_json_file("file_does_exist")
    assert config.config_dict == mock_contents
    assert config.out_dir == os.path.expanduser("~/mock_results")


@mock.patch("os.path.isfile", return_value=True)
def test_invalid_json_raises_config_error(_mock_is_file, file_open_mocker):
    with file_open_mocker("{not json", is_json=False):
        with pytest.raises(ConfigError):
            RunConfigProfile.from_json_file("broken.json")


def test_settings_with_defaults():
    config = RunConfigProfile({})
    assert config.protocol == PROTOCOL_LATTICE_SURGERY
    assert config.preset == PRESET_ANTICIPATED
    assert config.noise == {}
    assert config.sweep_axis is None
    assert config.sweep_grid == []
    assert config.delta == DELTA_DEFAULT
    assert config.sweep_protocols == [PROTOCOL_TRANSVERSAL, PROTOCOL_LATTICE_SURGERY]
    assert config.shots_per_weight == {2: SHOTS_PER_WEIGHT_DEFAULT}
    assert config.seed == SEED_DEFAULT
    assert config.crossing_accounting == CROSSING_PER_ION
    assert config.couple_p5q is True
    assert config.transversal_layout == PROTOCOL_TRANSVERSAL
    assert config.validate() is config


def test_settings_with_profile():
    config_dict = {
        "protocol": PROTOCOL_TRANSVERSAL,
        "noise": {"p_2q": 1e-3, "p_cross": 1e-5},
        "sweep_protocols": [PROTOCOL_TRANSVERSAL],
        "shots_per_weight": {"2": 100},
        "default_profile": "fine",
        "profiles": {
            "fine": {
                "noise": {"p_cross": 1e-4},
                "sweep_protocols": [PROTOCOL_FLAG_QEC],
                "shots_per_weight": {"3": 50},
                "delta": 1e-3,
            },
            "coarse": {"delta": 1e-1},
        },
    }
    config = RunConfigProfile(config_dict)
    assert config.noise == {"p_2q": 1e-3, "p_cross": 1e-4}
    assert config.sweep_protocols == [PROTOCOL_TRANSVERSAL, PROTOCOL_FLAG_QEC]
    assert config.shots_per_weight == {2: 100, 3: 50}
    assert config.delta == 1e-3
    assert "profiles" not in config.config_dict

    coarse = RunConfigProfile(config_dict, "coarse")
    assert coarse.delta == 1e-1
    assert coarse.noise == {"p_2q": 1e-3, "p_cross": 1e-5}


def test_unknown_profile_raises_config_error():
    with pytest.raises(ConfigError):
        RunConfigProfile({"profiles": {}}, "missing")


def test_noise_params_apply_overrides():
    params = RunConfigProfile({"preset": "current", "noise": {"p_cross": 1e-4}}).noise_params()
    assert params.p_2q == 1e-2
    assert params.p_cross == 1e-4


def test_overrides_skip_unset_values():
    config = RunConfigProfile({"seed": 3, "workers": 2}).with_overrides(seed=None, workers=8)
    assert isinstance(config, RunConfigProfile)
    assert config.seed == 3
    assert config.workers == 8


@pytest.mark.parametrize(
    "config_dict",
    [
        {"protocol": "teleported-cnot"},
        {"sweep_protocols": ["teleported-cnot"]},
        {"preset": "future"},
        {"sweep_axis": "p_meas"},
        {"sweep_grid": [0.5, 1.0]},
        {"delta": 0},
        {"weight_cap": 0},
        {"shots_per_weight": {"2": -1}},
        {"seed": -1},
        {"crossing_accounting": "per-hop"},
        {"workers": 0},
        {"noise": {"p_meas": 0.1}},
    ],
)
def test_validate_rejects_bad_settings(config_dict):
    with pytest.raises(ConfigError):
        RunConfigProfile(config_dict).validate()
