"""
Settings - JSON settings, key=value study files and logging setup.

Version: 1.0 (2025-03-13)
"""
from typing import Any, Dict, List, Optional
from fractions import Fraction
import copy
import json
import logging
import sys

from dg_solver.errors import ConfigError


DEFAULT_SETTINGS: Dict[str, Any] = {
    "solver": {
        "blowup_threshold": 1e12,
        "max_start_substeps": 10000,
    },
    "study": {
        "workers": 1,
    },
    "logging": {
        "level": "INFO",
        "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        "file": None,
    },
}


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_settings(path: Optional[str] = None) -> Dict[str, Any]:
    """Load a JSON settings file over the built-in defaults.

    Args:
        path: Settings file shaped like config/default_config.json, or None

    Returns:
        The merged settings

    Raises:
        ConfigError: If the file is missing or not a JSON object
    """
    if path is None:
        return copy.deepcopy(DEFAULT_SETTINGS)
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except FileNotFoundError:
        raise ConfigError(f"Settings file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"Invalid JSON in settings file {path}: {str(e)}")
    if not isinstance(data, dict):
        raise ConfigError(f"Settings file {path} must contain a JSON object")
    return _merge(DEFAULT_SETTINGS, data)


def configure_logging(settings: Dict[str, Any], debug: bool = False) -> None:
    """Configure the root logger from the logging section of the settings."""
    section = settings.get("logging", {})
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if section.get("file"):
        handlers.append(logging.FileHandler(section["file"]))
    level = logging.DEBUG if debug else getattr(logging, str(section.get("level", "INFO")).upper(), logging.INFO)
    logging.basicConfig(
        level=level,
        format=section.get("format", DEFAULT_SETTINGS["logging"]["format"]),
        handlers=handlers,
        force=True,
    )


def load_key_value_file(path: str) -> Dict[str, str]:
    """Read a key=value study configuration file.

    Blank lines and lines starting with '#' are skipped. Keys are flag names
    without the leading dashes.

    Raises:
        ConfigError: If the file cannot be read or a line has no '='
    """
    options: Dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as handle:
            lines = handle.readlines()
    except OSError as e:
        raise ConfigError(f"Cannot read config file {path}: {str(e)}")
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{number}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{path}:{number}: empty key")
        options[key.lstrip("-")] = value
    return options


def parse_number(text: str) -> float:
    """Parse a float, a fraction such as 1/32, or a power of two such as 2^-10."""
    text = text.strip()
    try:
        if "^" in text:
            base, exponent = text.split("^", 1)
            return float(base) ** float(exponent)
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError, OverflowError):
        raise ConfigError(f"Invalid number: {text!r}")


def parse_number_list(text: str) -> List[float]:
    """Parse a comma-separated list of numbers."""
    items = [item for item in text.split(",") if item.strip()]
    if not items:
        raise ConfigError("Expected a nonempty comma-separated list")
    return [parse_number(item) for item in items]
