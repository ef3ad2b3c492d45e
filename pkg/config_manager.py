"""
Configuration Manager for the nonlocal fermion entanglement toolkit

This module handles two layers of configuration:
- application settings (settings.json next to the code): worker count,
  log level, solver policies and output preferences
- experiment configs (recipes): lattice, models, sweep, fits and outputs
  of one run, with command-line overrides on top
"""

import copy
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from errors import ConfigError, EntanglementError
from holography import MetricParams
from lattice import LatticeSpec
from models import ModelSpec
from resource_manager import _get_base_path, find_recipe
from scaling import FitForm

logger = logging.getLogger(__name__)


class ConfigManager:
    """Manages application settings."""

    def __init__(self, config_file: Optional[str] = None):
        import constants

        self._config_file = config_file or constants.SETTINGS_FILE
        self._base_path = _get_base_path()
        self._config_data = {}

        self._config_path = Path(self._config_file)
        if not self._config_path.is_absolute():
            self._config_path = self._base_path / self._config_path

        self._load_config()

    def _load_config(self):
        """Load settings from file, falling back to defaults."""
        try:
            if self._config_path.exists():
                with open(self._config_path, 'r', encoding='utf-8') as f:
                    self._config_data = json.load(f)
            else:
                self._initialize_defaults()
        except (OSError, ValueError) as e:
            logger.warning("Failed to load settings from %s: %s", self._config_path, e)
            self._initialize_defaults()

    def _initialize_defaults(self):
        """Initialize settings with default values from constants."""
        import constants

        self._config_data = {
            'run': {
                'workers': constants.DEFAULT_WORKERS,
                'log_level': constants.DEFAULT_LOG_LEVEL,
                'multiplet_policy': 'whole',
                'bdg_method': 'auto',
            },
            'output': {
                'directory': constants.DEFAULT_OUTPUT_DIR,
                'precision': constants.CSV_PRECISION,
                'bits': False,
            },
            'plot': {
                'format': constants.PLOT_FORMAT,
                'logx': False,
            },
        }

    def save_config(self):
        """Save settings to file."""
        try:
            with open(self._config_path, 'w', encoding='utf-8') as f:
                json.dump(self._config_data, f, indent=2, ensure_ascii=False)
        except OSError as e:
            logger.warning("Failed to save settings to %s: %s", self._config_path, e)

    def get(self, section: str, key: str, default: Any = None) -> Any:
        """Get a setting."""
        return self._config_data.get(section, {}).get(key, default)

    def set(self, section: str, key: str, value: Any, auto_save: bool = True):
        """Set a setting."""
        if section not in self._config_data:
            self._config_data[section] = {}

        self._config_data[section][key] = value

        if auto_save:
            self.save_config()

    def get_section(self, section: str) -> Dict[str, Any]:
        """Get an entire settings section."""
        return self._config_data.get(section, {})

    def as_dict(self) -> Dict[str, Any]:
        """Copy of every settings section."""
        return copy.deepcopy(self._config_data)

    def update(self, assignments: Sequence[str]):
        """Apply "section.key=value" assignments and save once.

        Only the run, output and plot sections are accepted; values are read
        as JSON when possible.
        """
        import constants

        for item in assignments:
            key, sep, value = item.partition("=")
            section, dot, name = key.strip().partition(".")
            if not sep or not dot or not name:
                raise ConfigError(f"setting {item!r} is not of the form section.key=value")
            if section not in constants.SETTINGS_SECTIONS:
                raise ConfigError(f"unknown settings section {section!r}; expected one of "
                                  f"{', '.join(constants.SETTINGS_SECTIONS)}")
            self.set(section, name, _coerce(value), auto_save=False)
        self.save_config()

    def reset_to_defaults(self):
        """Reset settings to default values."""
        self._initialize_defaults()
        self.save_config()


# Global instance
_config_manager = None


def get_config_manager() -> ConfigManager:
    """Get the global settings manager instance."""
    global _config_manager
    if _config_manager is None:
        _config_manager = ConfigManager()
    return _config_manager


# Convenience functions
def get_run_settings() -> Dict[str, Any]:
    """Get run settings."""
    return get_config_manager().get_section('run')


def get_output_settings() -> Dict[str, Any]:
    """Get output settings."""
    return get_config_manager().get_section('output')


def get_plot_settings() -> Dict[str, Any]:
    """Get plot settings."""
    return get_config_manager().get_section('plot')


@dataclass
class FitRequest:
    form: FitForm
    window: Optional[List[float]] = None
    chord: bool = False

    def to_dict(self) -> dict:
        return {"form": self.form.value, "window": self.window, "chord": self.chord}


@dataclass
class HolographyRequest:
    params: Optional[MetricParams] = None
    fit: bool = True
    window: Optional[List[float]] = None


@dataclass
class ExperimentConfig:
    """One run: a lattice, one or more models, subregion sizes and requested analyses."""
    name: str
    lattice: LatticeSpec
    models: List[ModelSpec]
    sweep: List[int] = field(default_factory=list)
    fits: List[FitRequest] = field(default_factory=list)
    crossover: bool = False
    holography: Optional[HolographyRequest] = None
    plot: Dict[str, Any] = field(default_factory=dict)
    output: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None
    workers: Optional[int] = None
    raw: Dict[str, Any] = field(default_factory=dict)

    @property
    def model(self) -> ModelSpec:
        return self.models[0]


def _parse_sweep(data: Any) -> List[int]:
    if data is None:
        return []
    if isinstance(data, list):
        return [int(v) for v in data]
    if isinstance(data, dict):
        if "L" in data:
            return [int(v) for v in data["L"]]
        if "range" in data:
            start, stop = data["range"][:2]
            step = data["range"][2] if len(data["range"]) > 2 else 1
            return list(range(int(start), int(stop) + 1, int(step)))
        if "start" in data:
            return list(range(int(data["start"]), int(data["stop"]) + 1, int(data.get("step", 1))))
    raise ConfigError(f"cannot read sweep specification {data!r}")


def parse_experiment(data: Dict[str, Any], name: str = "experiment") -> ExperimentConfig:
    """Validate a raw config dict into an ExperimentConfig."""
    if not isinstance(data, dict):
        raise ConfigError("experiment config must be a JSON object")
    lattice_data = data.get("lattice")
    if not lattice_data:
        raise ConfigError("experiment config has no lattice")
    try:
        lattice = LatticeSpec(tuple(lattice_data["extent"]), s_weight=lattice_data.get("s_weight"))
        model_data = data.get("models")
        if model_data is None and "model" in data:
            model_data = [data["model"]]
        if not model_data:
            raise ConfigError("experiment config names no model")
        models = [ModelSpec(**m) for m in model_data]
        fits = [FitRequest(FitForm.parse(f["form"]), f.get("window"), bool(f.get("chord", False)))
                for f in data.get("fits", [])]
        holography = None
        if "holography" in data:
            h = data["holography"]
            params = MetricParams(**h["params"]) if h.get("params") else None
            holography = HolographyRequest(params, bool(h.get("fit", True)), h.get("window"))
        config = ExperimentConfig(
            name=str(data.get("name", name)),
            lattice=lattice,
            models=models,
            sweep=_parse_sweep(data.get("sweep")),
            fits=fits,
            crossover=bool(data.get("crossover", False)),
            holography=holography,
            plot=dict(data.get("plot", {})),
            output=dict(data.get("output", {})),
            seed=None if data.get("seed") is None else int(data["seed"]),
            workers=None if data.get("workers") is None else int(data["workers"]),
            raw=copy.deepcopy(data),
        )
    except EntanglementError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"invalid experiment config: {e}")
    return config


def read_config_file(source: str) -> Dict[str, Any]:
    """Raw dict from a config path or bundled recipe name."""
    path = Path(source)
    if not path.exists():
        found = find_recipe(source)
        if found is None:
            raise ConfigError(f"no config file or bundled recipe named {source!r}")
        path = Path(found)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except ValueError as e:
        raise ConfigError(f"{path}: not valid JSON ({e})")
    data.setdefault("name", path.stem)
    return data


def _coerce(value: str) -> Any:
    try:
        return json.loads(value)
    except ValueError:
        return value


def apply_overrides(data: Dict[str, Any], assignments: Sequence[str] = (), **flags) -> Dict[str, Any]:
    """Return a copy of a raw config with dotted-key assignments and flag values applied.

    ``assignments`` are strings "section.key=value"; values are read as JSON
    when possible. Keyword flags: alpha (every model), extent, seed, workers.
    """
    data = copy.deepcopy(data)
    for item in assignments:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, value = item.split("=", 1)
        parts = key.strip().split(".")
        node = data
        for part in parts[:-1]:
            if part == "model" and "models" in node and "model" not in node:
                node = node["models"][0]
                continue
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {key!r} does not address a config section")
        node[parts[-1]] = _coerce(value)

    if flags.get("alpha") is not None:
        if "model" in data:
            data["model"]["alpha"] = flags["alpha"]
        for model in data.get("models", []):
            model["alpha"] = flags["alpha"]
    if flags.get("extent") is not None:
        data.setdefault("lattice", {})["extent"] = list(flags["extent"])
    for key in ("seed", "workers"):
        if flags.get(key) is not None:
            data[key] = flags[key]
    return data


def load_experiment_config(source: str, assignments: Sequence[str] = (), **flags) -> ExperimentConfig:
    """Read, override and validate an experiment config."""
    data = apply_overrides(read_config_file(source), assignments, **flags)
    return parse_experiment(data, name=Path(source).stem)


def effective_config(config: ExperimentConfig) -> Dict[str, Any]:
    """The merged config as written into output headers."""
    data = copy.deepcopy(config.raw)
    data["lattice"] = config.lattice.to_dict()
    data.pop("model", None)
    data["models"] = [m.to_dict() for m in config.models]
    data["sweep"] = {"L": config.sweep}
    data["fits"] = [f.to_dict() for f in config.fits]
    if config.holography is not None:
        data["holography"] = {
            "params": None if config.holography.params is None else config.holography.params.to_dict(),
            "fit": config.holography.fit,
            "window": config.holography.window,
        }
    data["run"] = dict(get_run_settings())
    return data
