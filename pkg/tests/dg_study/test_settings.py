"""Tests for settings files, key=value study files and logging setup."""
import json
import logging
from pathlib import Path
from typing import Generator

import pytest

from dg_solver.errors import ConfigError
from dg_study.settings import (
    DEFAULT_SETTINGS,
    configure_logging,
    load_key_value_file,
    load_settings,
    parse_number,
    parse_number_list,
)


SHIPPED_CONFIG = Path(__file__).resolve().parents[2] / "config" / "default_config.json"


@pytest.fixture
def restore_logging() -> Generator[None, None, None]:
    """Put the root logger back the way pytest configured it."""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    for handler in root.handlers:
        if handler not in handlers:
            handler.close()
    root.handlers[:] = handlers
    root.setLevel(level)


def test_defaults_without_file() -> None:
    """Test load_settings(None) returns an independent copy of the defaults."""
    settings = load_settings()
    assert settings == DEFAULT_SETTINGS
    settings["solver"]["blowup_threshold"] = 1.0
    assert DEFAULT_SETTINGS["solver"]["blowup_threshold"] == 1e12


def test_shipped_config_matches_defaults() -> None:
    """Test config/default_config.json mirrors DEFAULT_SETTINGS."""
    assert json.loads(SHIPPED_CONFIG.read_text()) == DEFAULT_SETTINGS


def test_settings_merge_over_defaults(tmp_path: Path) -> None:
    """Test a partial file only overrides the keys it names."""
    path = tmp_path / "settings.json"
    path.write_text(json.dumps({"solver": {"blowup_threshold": 1e6}, "logging": {"level": "DEBUG"}}))
    settings = load_settings(str(path))
    assert settings["solver"] == {"blowup_threshold": 1e6, "max_start_substeps": 10000}
    assert settings["logging"]["level"] == "DEBUG"
    assert settings["study"]["workers"] == 1


def test_settings_errors(tmp_path: Path) -> None:
    """Test missing, malformed and non-object settings files."""
    with pytest.raises(ConfigError, match="not found"):
        load_settings(str(tmp_path / "absent.json"))
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ConfigError, match="Invalid JSON"):
        load_settings(str(broken))
    listing = tmp_path / "list.json"
    listing.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        load_settings(str(listing))


def test_configure_logging_with_file(tmp_path: Path, restore_logging: None) -> None:
    """Test the file handler and the debug switch."""
    log_file = tmp_path / "study.log"
    settings = load_settings()
    settings["logging"]["file"] = str(log_file)
    configure_logging(settings, debug=True)
    assert logging.getLogger().level == logging.DEBUG
    logging.getLogger("dg_study").debug("cell finished")
    for handler in logging.getLogger().handlers:
        handler.flush()
    assert "dg_study - DEBUG - cell finished" in log_file.read_text()


def test_configure_logging_level_from_settings(restore_logging: None) -> None:
    """Test the level is read from the settings when not debugging."""
    settings = load_settings()
    settings["logging"]["level"] = "warning"
    configure_logging(settings)
    assert logging.getLogger().level == logging.WARNING


def test_key_value_file(tmp_path: Path) -> None:
    """Test comments, blank lines, dashes and values containing '='."""
    path = tmp_path / "study.cfg"
    path.write_text(
        "# Burgers space study\n"
        "\n"
        "problem = burgers\n"
        "--mode=space\n"
        "resolutions = 1/2, 1/4\n"
        "out = a=b.csv\n"
    )
    assert load_key_value_file(str(path)) == {
        "problem": "burgers",
        "mode": "space",
        "resolutions": "1/2, 1/4",
        "out": "a=b.csv",
    }


def test_key_value_file_errors(tmp_path: Path) -> None:
    """Test malformed lines report their line number."""
    path = tmp_path / "bad.cfg"
    path.write_text("problem = burgers\nmode space\n")
    with pytest.raises(ConfigError, match=":2:"):
        load_key_value_file(str(path))
    with pytest.raises(ConfigError):
        load_key_value_file(str(tmp_path / "absent.cfg"))


@pytest.mark.parametrize("text, expected", [
    ("0.25", 0.25),
    ("1/32", 0.03125),
    ("2^-10", 2.0 ** -10),
    (" 1e-4 ", 1e-4),
    ("2e-5", 2e-5),
])
def test_parse_number(text: str, expected: float) -> None:
    """Test decimal, fraction and power-of-two notation."""
    assert parse_number(text) == expected


@pytest.mark.parametrize("text", ["", "abc", "1/0", "2^x", "2^5000", "10^400"])
def test_parse_number_rejects_garbage(text: str) -> None:
    """Test invalid numbers raise ConfigError."""
    with pytest.raises(ConfigError):
        parse_number(text)


def test_parse_number_list() -> None:
    """Test comma-separated lists."""
    assert parse_number_list("1/2,1/4, 0.125") == [0.5, 0.25, 0.125]
    with pytest.raises(ConfigError):
        parse_number_list(" , ")
