import io

import pytest

from owx2proto import TranslateConfig, load_config
from owx2proto.cli import run
from owx2proto.config import ConfigError, config_from_mapping
from conftest import CLOUD_CONFIG, CLOUD_OWX


def test_fixture_config():
    cfg = load_config(CLOUD_CONFIG)
    assert cfg.package == "owl.generated"
    assert cfg.strategy == "hash"
    assert cfg.property_modes == {"ex:has": "embed", "ex:hasMultiple": "reference_plural"}


def test_defaults():
    assert config_from_mapping({}) == TranslateConfig()


@pytest.mark.parametrize("data, fragment", [
    ({"strategy": "random"}, "strategy"),
    ({"group_gap": -1}, "group_gap"),
    ({"group_gap": True}, "group_gap"),
    ({"property_modes": {"ex:p": "inline"}}, "mode"),
    ({"property_modes": ["ex:p"]}, "mapping"),
    ({"colour": "blue"}, "unknown configuration keys"),
    ({"syntax": "proto2"}, "proto3"),
])
def test_invalid_configs(data, fragment):
    with pytest.raises(ConfigError, match=fragment):
        config_from_mapping(data)


def test_malformed_yaml(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("package: [unclosed\n")
    with pytest.raises(ConfigError):
        load_config(path)


def test_cli_config_errors(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("strategy: random\n")
    out = tmp_path / "g.proto"
    assert run(["generate", str(CLOUD_OWX), "-o", str(out), "--config", str(bad)], io.StringIO(), io.StringIO()) == 2
    missing = ["generate", str(CLOUD_OWX), "-o", str(out), "--config", str(tmp_path / "none.yaml")]
    assert run(missing, io.StringIO(), io.StringIO()) == 4
    assert not out.exists()


def test_unknown_mode_key_warns(cloud_doc):
    from owx2proto import translate

    _, diags = translate(cloud_doc, TranslateConfig(property_modes={"ex:ghost": "embed"}))
    assert [d.code for d in diags] == ["UNUSED_CONFIG"]
