import json
from pathlib import Path

import pytest

from src.errors import ConfigError
from src.models.config import Extra, Suite, SuiteConfig

DEFAULT_CONFIG = Path(__file__).resolve().parent.parent / "configs" / "default_suite.json"


def test_defaults():
    config = SuiteConfig()
    assert config.suite == Suite.ALL
    assert config.r4_convention == "half_b"
    assert not config.custom_hamiltonian
    assert config.to_dict()["suite"] == "all"


def test_all_expands_to_every_suite():
    suites = Suite.ALL.expand()
    assert Suite.ALL not in suites
    assert len(suites) == 6
    assert Suite.RECURSION.expand() == [Suite.RECURSION]


@pytest.mark.parametrize("kwargs", [
    {"suite": "everything"},
    {"max_order": 0},
    {"numeric_points": 0},
    {"numeric_tolerance": 1.5},
    {"workers": 0},
    {"grid_sizes": [51]},
    {"grid_sizes": [3, 5]},
    {"r4_threshold": 0},
    {"r4_convention": "sideways"},
    {"include": ["words3"]},
])
def test_invalid_values(kwargs):
    with pytest.raises(ConfigError):
        SuiteConfig(**kwargs)


@pytest.mark.parametrize("suite", ["hamiltonian", "all"])
def test_hamiltonian_parameters_come_together(suite):
    with pytest.raises(ConfigError, match="c0"):
        SuiteConfig(suite=suite, theta="1", xi="w0")
    config = SuiteConfig(suite=suite, theta="1", xi="w0", c0="0")
    assert config.custom_hamiltonian


def test_hamiltonian_parameters_are_ignored_elsewhere():
    assert SuiteConfig(suite="symmetry", theta="1").theta == "1"


def test_includes():
    config = SuiteConfig(include=["r4", "convergence"])
    assert config.includes(Extra.R4)
    assert not config.includes(Extra.WORDS2)


def test_from_dict_rejects_unknown_keys():
    with pytest.raises(ConfigError, match="colour"):
        SuiteConfig.from_dict({"suite": "symmetry", "colour": "blue"})


def test_load_shipped_configuration():
    config = SuiteConfig.load(DEFAULT_CONFIG)
    assert config.suite == Suite.ALL
    assert config.grid_sizes == [51, 101, 201]


def test_load_applies_overrides(tmp_path):
    path = tmp_path / "suite.json"
    path.write_text(json.dumps({"suite": "recursion", "seed": 3}))
    config = SuiteConfig.load(path, {"seed": 11, "workers": None, "include": ["words2"]})
    assert config.suite == Suite.RECURSION
    assert config.seed == 11
    assert config.workers == 1
    assert config.includes(Extra.WORDS2)


def test_load_without_a_file():
    assert SuiteConfig.load(None, {"suite": "solutions"}).suite == Suite.SOLUTIONS


@pytest.mark.parametrize("content", ["not json", "[1, 2]"])
def test_load_rejects_bad_files(tmp_path, content):
    path = tmp_path / "suite.json"
    path.write_text(content)
    with pytest.raises(ConfigError):
        SuiteConfig.load(path)


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        SuiteConfig.load(tmp_path / "missing.json")
