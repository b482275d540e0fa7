"""
Config Loader Module

Loads the packaged defaults from `core/defaults.yaml`, reads optional user
config files, and merges them with CLI overrides. Precedence is
CLI flags > user config file > packaged defaults.
"""

import hashlib
import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import yaml

from core.utils import ConfigError

logger = logging.getLogger(__name__)


class ConfigLoader:
    """Loads and merges configuration sections."""

    def __init__(self, defaults_path: Optional[str] = None):
        """
        Initialize the config loader.

        Args:
            defaults_path: Path to the defaults YAML. If None, uses core/defaults.yaml.
        """
        if defaults_path is None:
            defaults_path = Path(__file__).parent / "defaults.yaml"

        self.defaults_path = Path(defaults_path)
        self._defaults: Optional[Dict[str, Any]] = None

    def _load_defaults(self) -> Dict[str, Any]:
        """Load the defaults file once."""
        if self._defaults is not None:
            return self._defaults

        if not self.defaults_path.exists():
            raise ConfigError(f"Defaults file not found: {self.defaults_path}")

        try:
            with open(self.defaults_path, "r", encoding="utf-8") as f:
                self._defaults = yaml.safe_load(f) or {}
            logger.debug(f"Loaded defaults from {self.defaults_path}")
            return self._defaults
        except yaml.YAMLError as e:
            raise ConfigError(f"Invalid YAML in defaults file: {e}")

    def section(self, name: str) -> Dict[str, Any]:
        """Return a copy of one defaults section."""
        defaults = self._load_defaults()
        if name not in defaults:
            raise ConfigError(f"Unknown config section '{name}'")
        return dict(defaults[name])

    def map_defaults(self, map_kind: str) -> Dict[str, Any]:
        maps = self.section("maps")
        if map_kind not in maps:
            raise ConfigError(
                f"Unknown map '{map_kind}'. Available maps: {', '.join(sorted(maps))}"
            )
        return dict(maps[map_kind])

    def resolve(
        self,
        name: str,
        file_values: Optional[Mapping[str, Any]] = None,
        cli_values: Optional[Mapping[str, Any]] = None,
    ) -> Dict[str, Any]:
        """
        Merge one section across layers.

        Args:
            name: Section name in the defaults file
            file_values: Values read from a user config file (may be None)
            cli_values: Explicit CLI values; None entries mean "not given"

        Returns:
            The resolved section

        Raises:
            ConfigError: If a key is not present in the defaults section
        """
        resolved = self.section(name)
        for layer_name, layer in (("config file", file_values), ("flags", cli_values)):
            for key, value in (layer or {}).items():
                if value is None:
                    continue
                if key not in resolved:
                    raise ConfigError(
                        f"Unknown key '{key}' in {layer_name} for section '{name}'"
                    )
                resolved[key] = value
        return resolved


def read_config_file(path: Optional[str]) -> Dict[str, Any]:
    """
    Read a user config file.

    The file is YAML. Lines of the form `key=value` are accepted too and are
    rewritten to `key: value` before parsing, so flat text configs work.
    """
    if not path:
        return {}
    config_path = Path(path)
    if not config_path.exists():
        raise ConfigError(f"Config file not found: {config_path}")

    lines = []
    for raw in config_path.read_text(encoding="utf-8").splitlines():
        stripped = raw.strip()
        if stripped and not stripped.startswith("#") and "=" in stripped and ":" not in stripped:
            key, value = stripped.split("=", 1)
            raw = f"{key.strip()}: {value.strip()}"
        lines.append(raw)

    try:
        data = yaml.safe_load("\n".join(lines)) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid config file {config_path}: {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {config_path} must hold a mapping")
    logger.info(f"Loaded config file {config_path}")
    return data


def derive_seed(component: str, seed: int) -> int:
    """Derive an independent sub-seed from (component, seed) by hashing."""
    digest = hashlib.sha256(f"{component}:{seed}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") & ((1 << 63) - 1)


_loader: Optional[ConfigLoader] = None


def get_loader() -> ConfigLoader:
    """Get the global config loader instance."""
    global _loader
    if _loader is None:
        _loader = ConfigLoader()
    return _loader


def load_defaults() -> Dict[str, Any]:
    """The packaged defaults, parsed once per process."""
    return get_loader()._load_defaults()


def resolve_config(
    section: str,
    file_values: Optional[Mapping[str, Any]] = None,
    cli_values: Optional[Mapping[str, Any]] = None,
) -> Dict[str, Any]:
    """Resolve one section with the global loader; see `ConfigLoader.resolve`."""
    return get_loader().resolve(section, file_values, cli_values)
