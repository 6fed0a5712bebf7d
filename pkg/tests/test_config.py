import pytest
from loguru import logger

from src.core.config import RunConfig, get_settings, parse_domain, parse_grid
from src.core.errors import ConfigError


def test_defaults():
    config = RunConfig()
    assert config.potential == "logdet"
    assert config.domain == (0.0, 1.0, 1.0, 2.0)
    assert config.grid == (65, 65)
    assert config.formats == ["json"]
    assert config.tolerance("residual") == 1e-4
    assert sorted(config.tolerances) == ["closedness", "divergence", "harmonic", "identity", "identity_h2", "newton", "residual"]


def test_serialize_round_trip():
    logger.info("Testing the canonical config text...")
    config = RunConfig(potential="power:0.25", domain="0:1,1:3", grid="33x17", base="0.5:2", formats="svg,json")
    text = config.serialize()
    assert "grid=33x17\n" in text
    assert "tol.residual=0.0001\n" in text
    lines = text.splitlines()
    assert lines == sorted(lines)
    again = RunConfig.parse(text)
    assert again == config
    assert again.config_hash() == config.config_hash()
    assert again.formats == ["json", "svg"]
    assert again.base == (0.5, 2.0)


def test_file_text_carries_schema_and_hash(tmp_path):
    config = RunConfig(grid="17x17", tolerances={"identity_h2": 0.5})
    text = config.to_file_text()
    first, rest = text.split("\n", 1)
    assert first == f"# schema=config/1 config_hash={config.config_hash()}"
    assert rest == config.serialize()
    assert "tol.identity_h2=0.5\n" in rest
    assert RunConfig.parse(text) == config
    path = tmp_path / "config.txt"
    path.write_text(text)
    assert RunConfig.load(str(path)).config_hash() == config.config_hash()


def test_hash_tracks_content():
    a = RunConfig()
    b = RunConfig.from_flat({"tol.residual": "1e-3"})
    assert len(a.config_hash()) == 16
    assert a.config_hash() != b.config_hash()
    assert b.tolerance("residual") == 1e-3
    assert b.tolerance("newton") == a.tolerance("newton")


def test_json_config():
    config = RunConfig.parse('{"potential": "affine", "grid": [9, 9], "tolerances": {"residual": 0.01}}')
    assert config.potential == "affine"
    assert config.grid == (9, 9)
    assert config.tolerance("residual") == 0.01


def test_load_dotenv_style_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# worked example\npotential=logdet\nseed1=H\nseed2=logr\ngrid=17x17\ntol.closedness=1e-8\n")
    config = RunConfig.load(str(path))
    assert config.grid == (17, 17)
    assert config.tolerance("closedness") == 1e-8
    with pytest.raises(ConfigError):
        RunConfig.load(str(tmp_path / "missing.cfg"))


@pytest.mark.parametrize(
    "flat",
    [
        {"colour": "blue"},
        {"domain": "0:1"},
        {"domain": "1:0,1:2"},
        {"grid": "2x2"},
        {"grid": "ax3"},
        {"domain": "0:1,0:1"},          # r = 0 is outside I for logdet
        {"potential": "cubic"},
        {"formats": "json,pdf"},
        {"refine": "0"},
        {"tol.residual": "abc"},
        {"tol.residual": "-1"},
        {"tol.speed": "1"},
    ],
)
def test_invalid_configs(flat):
    with pytest.raises(ConfigError):
        RunConfig.from_flat(flat)


def test_malformed_text():
    with pytest.raises(ConfigError):
        RunConfig.parse("potential logdet\n")
    with pytest.raises(ConfigError):
        RunConfig.parse("{not json")


def test_parsers():
    assert parse_domain("-1:1,0.5:2") == (-1.0, 1.0, 0.5, 2.0)
    assert parse_grid("33X65") == (33, 65)


def test_settings_from_environment(monkeypatch):
    monkeypatch.setenv("JOYCE_TOL_RESIDUAL", "1e-6")
    monkeypatch.setenv("JOYCE_NEWTON_MAXITER", "50")
    s = get_settings()
    assert s.tol_residual == 1e-6
    assert s.newton_maxiter == 50
    assert s.tolerances()["residual"] == 1e-6
