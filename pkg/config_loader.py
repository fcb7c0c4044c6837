"""
Loading of run configuration: figure presets from YAML and flat key=value
run files with [state], [bath], [search] and [output] sections.

Layers are merged in order (preset, then file, then command-line flags) and
the result is validated as a RunConfig.
"""

from __future__ import annotations

import configparser
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from bound_search import SearchConfig
from channels import OhmicBathParams, SgadBathParams
from config import settings
from errors import ConfigError
from utils import parse_angle, parse_half_integer

logger = logging.getLogger(__name__)

SECTIONS = ("state", "bath", "search", "output")
OBSERVABLES = ("r_m", "r_phi", "r_t", "r_s", "p_up")


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class StateSection(_Section):
    kind: Literal["wigner-dicke", "coherent", "four-level", "mixed"] = "coherent"
    j: float = 0.5
    m: Optional[float] = None
    theta: float = 0.0
    phi: float = 0.0
    r_alpha: Optional[float] = Field(default=None, ge=0)
    r_beta: Optional[float] = Field(default=None, ge=0)
    r_gamma: Optional[float] = Field(default=None, ge=0)
    r_delta: Optional[float] = Field(default=None, ge=0)
    theta_alpha: float = 0.0
    theta_beta: float = 0.0
    theta_gamma: float = 0.0
    auto_normalize: bool = False

    @field_validator("theta", "phi", "theta_alpha", "theta_beta", "theta_gamma", mode="before")
    @classmethod
    def parse_angles(cls, v: Any) -> float:
        return parse_angle(v)

    @field_validator("j", "m", mode="before")
    @classmethod
    def parse_spin(cls, v: Any) -> Optional[float]:
        return None if v is None else parse_half_integer(v)


class BathSection(_Section):
    channel: Optional[Literal["pd", "sgad"]] = None
    temperature: float = Field(default=0.0, ge=0)
    gamma0: Optional[float] = None
    omega_c: Optional[float] = None
    omega: float = Field(default=1.0, gt=0)
    r: float = Field(default=0.0, ge=0)
    a: float = Field(default=0.0, ge=0)
    phi: float = 0.0
    regime: Literal["zeroT", "highT"] = "highT"

    @field_validator("phi", mode="before")
    @classmethod
    def parse_phase(cls, v: Any) -> float:
        return parse_angle(v)

    def ohmic_params(self) -> OhmicBathParams:
        return OhmicBathParams(gamma0=self.gamma0, omega_c=self.omega_c, T=self.temperature, r=self.r, a=self.a)

    def sgad_params(self) -> SgadBathParams:
        return SgadBathParams(gamma0=self.gamma0, omega=self.omega, T=self.temperature, r=self.r, Phi=self.phi)


class SearchSection(_Section):
    system: Literal["qubit", "spin32"] = "qubit"
    target: Literal["rphi-max", "mu"] = "mu"
    mu: float = Field(default_factory=lambda: settings.mu_qubit, gt=0)
    grid_density: Optional[int] = None
    multistarts: Optional[int] = None
    local_tol: Optional[float] = None
    exclusion_eps: Optional[float] = None
    seed: Optional[int] = None
    n_quad: Optional[int] = None
    verify_samples: Optional[int] = None

    def search_config(self) -> SearchConfig:
        overrides = self.model_dump(exclude={"system", "target", "mu"}, exclude_none=True)
        return SearchConfig(**overrides)


class OutputSection(_Section):
    sweep: Literal["time", "alpha", "alpha-time", "alpha-beta"] = "time"
    n_grid: int = Field(default_factory=lambda: settings.phase_grid, ge=8)
    t_min: float = Field(default=0.0, ge=0)
    t_max: float = Field(default=1.0, gt=0)
    n_times: int = Field(default=100, ge=2)
    t: Optional[float] = Field(default=None, ge=0)
    n_alpha: int = Field(default=64, ge=2)
    n_beta: int = Field(default=64, ge=1)
    snapshots: int = Field(default=0, ge=0)
    observables: List[str] = Field(default_factory=lambda: list(OBSERVABLES))
    trace: bool = False

    @field_validator("observables", mode="before")
    @classmethod
    def split_observables(cls, v: Any) -> List[str]:
        items = [item.strip() for item in v.split(",")] if isinstance(v, str) else list(v)
        unknown = sorted(set(items) - set(OBSERVABLES))
        if unknown:
            raise ValueError(f"Unknown observables {unknown}; choose from {OBSERVABLES}")
        return items


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    state: StateSection = Field(default_factory=StateSection)
    bath: BathSection = Field(default_factory=BathSection)
    search: SearchSection = Field(default_factory=SearchSection)
    output: OutputSection = Field(default_factory=OutputSection)

    @classmethod
    def from_layers(cls, *layers: Optional[Mapping[str, Mapping[str, Any]]]) -> "RunConfig":
        """Merge section dictionaries; later layers win key by key."""
        merged: Dict[str, Dict[str, Any]] = {section: {} for section in SECTIONS}
        for layer in layers:
            if not layer:
                continue
            for section, values in layer.items():
                if section not in merged:
                    raise ConfigError(f"Unknown config section [{section}]")
                merged[section].update({k: v for k, v in values.items() if v is not None})
        try:
            return cls.model_validate(merged)
        except ValidationError as exc:
            logger.error("Invalid run configuration: %s", exc)
            raise ConfigError(str(exc)) from exc


class FigurePreset(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    figure: str
    description: str = ""
    sections: Dict[str, Dict[str, Any]] = Field(default_factory=dict)

    def run_config(self, *layers: Optional[Mapping[str, Mapping[str, Any]]]) -> RunConfig:
        return RunConfig.from_layers(self.sections, *layers)


class PresetLoader:
    """Reads the figure presets shipped as YAML."""

    def load_presets(self, presets_path: Path) -> Dict[str, FigurePreset]:
        """
        Load figure presets from a YAML file.

        Args:
            presets_path: The path to the YAML presets file.

        Returns:
            Presets keyed by name, in file order.

        Raises:
            FileNotFoundError: If the presets file does not exist.
            ValueError: If the YAML content is not in the expected format.
        """
        logger.info("Loading figure presets from %s", presets_path)
        try:
            with open(presets_path, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f)

            if not isinstance(data, list):
                raise ValueError("YAML content should be a list of presets.")

            presets: Dict[str, FigurePreset] = {}
            for item in data:
                if not isinstance(item, dict) or "name" not in item or "figure" not in item:
                    raise ValueError("Each preset must be a mapping with 'name' and 'figure'.")
                sections = {key: item[key] for key in SECTIONS if key in item}
                extra = set(item) - set(SECTIONS) - {"name", "figure", "description"}
                if extra:
                    raise ValueError(f"Preset '{item['name']}' has unknown keys {sorted(extra)}")
                preset = FigurePreset(
                    name=item["name"],
                    figure=item["figure"],
                    description=item.get("description", ""),
                    sections=sections,
                )
                # fail early on presets that would not validate at dispatch time
                preset.run_config()
                presets[preset.name] = preset

            logger.info("Successfully loaded %d presets.", len(presets))
            return presets
        except FileNotFoundError:
            logger.error("Presets file not found at: %s", presets_path)
            raise
        except yaml.YAMLError as e:
            logger.error("Error parsing YAML file %s: %s", presets_path, e)
            raise ValueError(f"Malformed YAML in {presets_path}: {e}") from e
        except (ValueError, ConfigError) as e:
            logger.error("Invalid format in YAML file %s: %s", presets_path, e)
            raise


def load_run_config(config_path: Path) -> Dict[str, Dict[str, str]]:
    """Parse a key=value run file into raw sections, rejecting unknown sections and keys."""
    parser = configparser.ConfigParser(interpolation=None, default_section="__unused__")
    try:
        with open(config_path, "r", encoding="utf-8") as f:
            parser.read_file(f)
    except configparser.Error as exc:
        raise ConfigError(f"Malformed config file {config_path}: {exc}") from exc

    known = {
        "state": StateSection.model_fields,
        "bath": BathSection.model_fields,
        "search": SearchSection.model_fields,
        "output": OutputSection.model_fields,
    }
    sections: Dict[str, Dict[str, str]] = {}
    for section in parser.sections():
        if section not in known:
            raise ConfigError(f"Unknown config section [{section}] in {config_path}")
        values = dict(parser.items(section))
        unknown = sorted(set(values) - set(known[section]))
        if unknown:
            raise ConfigError(f"Unknown keys {unknown} in section [{section}] of {config_path}")
        sections[section] = values
    logger.info("Loaded run config %s with sections %s", config_path, sorted(sections))
    return sections
