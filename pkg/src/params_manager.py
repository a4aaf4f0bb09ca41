# src/params_manager.py
import dataclasses
import json
import logging
import os
import sys
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import yaml

from errors import ParamsError
from models import MAX_ELEMENT_WIDTH, MAX_TABLE_WIDTH

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RedactionParams:
    """All knobs of the redaction pipeline; the seed is passed separately."""
    gamma_min: int = 2
    gamma_max: int = 4
    gamma_a_max: float = 0.1
    gamma_b_max: float = 0.1
    cpi_fraction: float = 1.0
    coverage: float = 1.0
    d_max: int = 2
    w_fi: float = 1 / 3
    w_fo: float = 1 / 3
    w_h: float = 1 / 3
    entropy_samples: int = 1024
    randomize_mapping: bool = True
    randomize_elements: bool = True
    randomize_interconnect: bool = True
    converted_csb_randomizable: bool = True

    @property
    def is_baseline(self) -> bool:
        return not (self.randomize_mapping or self.randomize_elements or self.randomize_interconnect)

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)


PARAM_FIELDS = {f.name: f for f in dataclasses.fields(RedactionParams)}


def _coerce(key: str, value: Any) -> Any:
    kind = PARAM_FIELDS[key].type
    kind = {"int": int, "float": float, "bool": bool}.get(kind, kind)
    if kind is bool:
        if isinstance(value, bool):
            return value
        text = str(value).strip().lower()
        if text in ("1", "true", "yes", "on"):
            return True
        if text in ("0", "false", "no", "off"):
            return False
        raise ParamsError(f"{key}: {value!r} is not a boolean")
    try:
        if kind is int:
            if isinstance(value, float) and not value.is_integer():
                raise ValueError
            return int(value)
        return float(value)
    except (TypeError, ValueError):
        raise ParamsError(f"{key}: {value!r} is not a valid {kind.__name__}") from None


class ParamsManager:
    """
    Parameter manager for the redaction pipeline.
    Merges defaults, a named preset, a parameter file and command-line overrides.
    """
    DEFAULTS_FILENAME = "default_params.json"
    PRESETS_FILENAME = "variant_presets.yaml"

    def __init__(self):
        self.params = self._load_default_params()
        self.preset: Optional[str] = None
        self.last_error = ""

    def _load_default_params(self) -> Dict[str, Any]:
        """Loads the defaults from default_params.json."""
        fallback = RedactionParams().to_dict()
        default_params_path = self._get_resource_path(self.DEFAULTS_FILENAME)

        if os.path.exists(default_params_path):
            try:
                with open(default_params_path, 'r', encoding='utf-8') as f:
                    loaded = json.load(f)
                for key, value in loaded.items():
                    if key in PARAM_FIELDS:
                        fallback[key] = _coerce(key, value)
                    else:
                        logger.warning("ignoring unknown default parameter %s", key)
            except (json.JSONDecodeError, ParamsError) as e:
                logger.warning("could not load %s: %s", self.DEFAULTS_FILENAME, e)

        return fallback

    def _get_resource_path(self, relative_path: str) -> str:
        """
        Gets the path to a resource.
        In frozen (PyInstaller) mode, data files sit next to the executable or in _MEIPASS.
        """
        if getattr(sys, 'frozen', False):
            base_path = os.path.dirname(sys.executable)
            full_path = os.path.join(base_path, relative_path)
            if os.path.exists(full_path):
                return full_path
            temp_path = getattr(sys, '_MEIPASS', None)
            if temp_path:
                temp_full_path = os.path.join(temp_path, relative_path)
                if os.path.exists(temp_full_path):
                    return temp_full_path
            return full_path
        base_path = os.path.dirname(os.path.abspath(__file__))
        return os.path.join(base_path, relative_path)

    # --- presets ---
    def _load_presets(self) -> Dict[str, Any]:
        path = self._get_resource_path(self.PRESETS_FILENAME)
        try:
            with open(path, 'r', encoding='utf-8') as f:
                return yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as e:
            raise ParamsError(f"could not load presets: {e}") from None

    def preset_names(self) -> List[str]:
        return list(self._load_presets().get("presets", {}))

    def family(self, name: str) -> List[str]:
        families = self._load_presets().get("families", {})
        if name not in families:
            raise ParamsError(f"unknown preset family {name!r}; known: {', '.join(families)}")
        return list(families[name])

    def apply_preset(self, name: str) -> None:
        presets = self._load_presets().get("presets", {})
        if name not in presets:
            raise ParamsError(f"unknown preset {name!r}; known: {', '.join(presets)}")
        self.update_params(presets[name] or {})
        self.preset = name

    # --- parameter files ---
    def load_file(self, path: str) -> None:
        """
        Reads a parameter file: ``key = value`` lines with ``#`` comments,
        or a YAML mapping when the extension is .yaml/.yml.
        """
        try:
            with open(path, 'r', encoding='utf-8') as f:
                text = f.read()
        except OSError as e:
            raise ParamsError(f"cannot read parameter file {path}: {e}") from None

        if path.lower().endswith(('.yaml', '.yml')):
            try:
                loaded = yaml.safe_load(text) or {}
            except yaml.YAMLError as e:
                raise ParamsError(f"{path}: {e}") from None
            if not isinstance(loaded, dict):
                raise ParamsError(f"{path}: expected a mapping of parameter names")
            self.update_params(loaded)
            return

        values = {}
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue
            if '=' not in line:
                raise ParamsError(f"{path}:{number}: expected 'key = value'")
            key, value = (part.strip() for part in line.split('=', 1))
            values[key] = value
        self.update_params(values)

    # --- access ---
    def set_param(self, key: str, value: Any) -> None:
        if key not in PARAM_FIELDS:
            raise ParamsError(f"unknown parameter {key!r}")
        self.params[key] = _coerce(key, value)

    def set_from_assignment(self, assignment: str) -> None:
        """Applies one ``key=value`` override (the CLI's --set)."""
        if '=' not in assignment:
            raise ParamsError(f"--set expects key=value, got {assignment!r}")
        key, value = assignment.split('=', 1)
        self.set_param(key.strip(), value.strip())

    def update_params(self, new_params: Dict[str, Any]) -> None:
        for key, value in new_params.items():
            self.set_param(key, value)

    def reset_to_defaults(self) -> None:
        self.params = self._load_default_params()
        self.preset = None

    # --- validation ---
    def validate(self) -> bool:
        """Checks the merged parameters; see get_last_error on failure."""
        try:
            self.build()
        except ParamsError as e:
            self.last_error = str(e)
            return False
        self.last_error = ""
        return True

    def get_last_error(self) -> str:
        return getattr(self, 'last_error', "")

    def build(self) -> RedactionParams:
        p = RedactionParams(**self.params)
        if not 2 <= p.gamma_min <= p.gamma_max <= MAX_TABLE_WIDTH:
            raise ParamsError(f"need 2 <= gamma_min <= gamma_max <= {MAX_TABLE_WIDTH}, "
                              f"got {p.gamma_min}, {p.gamma_max}")
        for key in ("gamma_a_max", "gamma_b_max", "cpi_fraction", "coverage"):
            if not 0.0 <= getattr(p, key) <= 1.0:
                raise ParamsError(f"{key} must lie in [0, 1]")
        if not 0 <= p.d_max <= MAX_ELEMENT_WIDTH:
            raise ParamsError(f"d_max must lie in [0, {MAX_ELEMENT_WIDTH}]")
        weights = (p.w_fi, p.w_fo, p.w_h)
        if min(weights) < 0 or sum(weights) == 0:
            raise ParamsError("rcf weights must be non-negative and not all zero")
        if p.entropy_samples < 1:
            raise ParamsError("entropy_samples must be at least 1")
        return p
