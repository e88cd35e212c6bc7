import pytest

from src.compiler import InertiaVariant
from src.config import AblationSpec, Settings, load_settings
from src.errors import ConfigurationError


def test_defaults():
    settings = load_settings()
    assert settings == Settings()
    assert settings.inference.exact_cap == 20
    assert settings.inference.map_cap == 24
    assert settings.inference.uniform_cap == 16
    assert settings.policy.variant == InertiaVariant.HI
    assert settings.policy.sigma_soft
    assert settings.learning.method == "dn"
    assert settings.threshold == 0.5


def test_yaml_file(tmp_path):
    path = tmp_path / "settings.yaml"
    path.write_text("seed: 7\ninference:\n  samples: 5000\npolicy:\n  variant: SI_h\nlearning:\n  epochs: 30\n")
    settings = load_settings(path)
    assert settings.seed == 7
    assert settings.inference.samples == 5000
    assert settings.inference.burn_in == 100
    assert settings.policy.variant == InertiaVariant.SI_H
    assert settings.learning.epochs == 30


def test_overrides_win_and_skip_none(tmp_path):
    path = tmp_path / "settings.yaml"
    path.write_text("seed: 7\ninference:\n  samples: 5000\n")
    settings = load_settings(path, {"seed": None, "inference": {"samples": 10, "burn_in": None}, "threads": 2})
    assert settings.seed == 7
    assert settings.threads == 2
    assert settings.inference.samples == 10
    assert settings.inference.burn_in == 100


def test_policy_settings_build_policy():
    policy = load_settings(overrides={"policy": {"variant": "SI_eq", "shared_weight": 2.0}}).policy.to_policy()
    assert policy.variant == InertiaVariant.SI_EQ
    assert policy.shared_weight == 2.0


@pytest.mark.parametrize(
    "overrides",
    [
        {"seed": -1},
        {"threshold": -0.1},
        {"inference": {"samples": 0}},
        {"inference": {"noise": 1.5}},
        {"learning": {"method": "sgd"}},
        {"policy": {"variant": "soft"}},
        {"ablation": {"lengths": [0]}},
        {"ablation": {"start_probability": 1.0}},
    ],
)
def test_invalid_values(overrides):
    with pytest.raises(ConfigurationError):
        load_settings(overrides=overrides)


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_settings(tmp_path / "absent.yaml")


def test_top_level_must_be_mapping(tmp_path):
    path = tmp_path / "settings.yaml"
    path.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigurationError):
        load_settings(path)


def test_empty_file_gives_defaults(tmp_path):
    path = tmp_path / "settings.yaml"
    path.write_text("")
    assert load_settings(path) == Settings()


def test_ablation_defaults():
    spec = AblationSpec()
    assert spec.lengths == [10, 20]
    assert spec.min_entities == 2
