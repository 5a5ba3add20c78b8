"""Scenario files: INI settings validated into pydantic models"""
import logging
import os
from enum import Enum
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator
from PySide6.QtCore import QSettings

from ..core.attractor import DesignMethod
from ..core.errors import ScenarioError
from ..core.shape import RescaleMode
from ..core.swarm import Proposal
from ..utils.constants import (
    AUTO_EPSILON,
    DEFAULT_BETA,
    DEFAULT_DESIGN_METHOD,
    DEFAULT_EPSILON,
    DEFAULT_HARMONIC,
    DEFAULT_MODE,
    DEFAULT_ORDER,
    DEFAULT_OUTPUT_DIR,
    DEFAULT_PERCENTILE,
    DEFAULT_PROPOSAL,
    DEFAULT_RESCALE,
    DEFAULT_ROBOTS,
    DEFAULT_SEED,
    DEFAULT_STEPS,
    DEFAULT_STRIDE,
    DEFAULT_THREADS,
    DEFAULT_TOLERANCE,
    DEFAULT_WINDOW,
    PATH_SETTINGS,
    SCENARIO_KEYS,
    SETTINGS_RUN_GROUP,
)

logger = logging.getLogger(__name__)


class Mode(str, Enum):
    EIGEN = 'eigen'
    DYNAMICS = 'dynamics'
    SWARM_UNWEIGHTED = 'swarm-unweighted'
    SWARM_WEIGHTED = 'swarm-weighted'
    RECONSTRUCT = 'reconstruct'


def _join_words(value):
    # QSettings turns comma-separated values into lists
    if isinstance(value, (list, tuple)):
        return ' '.join(str(v).strip() for v in value)
    return value


class _Section(BaseModel):
    model_config = ConfigDict(extra='forbid')


class ScenarioSection(_Section):
    mode: Mode = Mode(DEFAULT_MODE)
    environment: str | None = None
    harmonic: int = Field(DEFAULT_HARMONIC, ge=1)  # 1-based


class DesignSection(_Section):
    method: DesignMethod = DesignMethod(DEFAULT_DESIGN_METHOD)
    order: int = Field(DEFAULT_ORDER, ge=1)
    beta: float = Field(DEFAULT_BETA, gt=-1.0, le=1.0)
    epsilon: Literal['auto'] | float = DEFAULT_EPSILON

    @field_validator('epsilon')
    @classmethod
    def _epsilon_range(cls, value):
        if value != AUTO_EPSILON and not 0.0 < value < 1.0:
            raise ValueError('epsilon must lie in (0, 1) or be "auto"')
        return value


class SwarmSection(_Section):
    robots: int = Field(DEFAULT_ROBOTS, ge=1)
    seed: int = Field(DEFAULT_SEED, ge=0)
    steps: int = Field(DEFAULT_STEPS, ge=0)
    stride: int = Field(DEFAULT_STRIDE, ge=0)
    start: str | None = None  # 'i' on lines, 'row col' on grids, 0-based
    proposal: Proposal = Proposal(DEFAULT_PROPOSAL)
    per_robot_dump: bool = False

    @field_validator('start', mode='before')
    @classmethod
    def _join_start(cls, value):
        return _join_words(value)


class DynamicsSection(_Section):
    tolerance: float = Field(DEFAULT_TOLERANCE, gt=0.0)
    window: int = Field(DEFAULT_WINDOW, ge=1)
    max_steps: int | None = Field(None, ge=0)  # None: per-mode default
    snapshots: list[int] = Field(default_factory=list)

    @field_validator('snapshots', mode='before')
    @classmethod
    def _split_steps(cls, value):
        value = _join_words(value)
        if isinstance(value, str):
            return [int(token) for token in value.split()]
        return value


class ShapeSection(_Section):
    path: str | None = None
    percentile: float = Field(DEFAULT_PERCENTILE, gt=0.0, le=1.0)
    count: int | None = Field(None, ge=1)
    threshold: float | None = None
    rescale: RescaleMode = RescaleMode(DEFAULT_RESCALE)


class OutputSection(_Section):
    directory: str = DEFAULT_OUTPUT_DIR
    pgm: bool = False


class RuntimeSection(_Section):
    threads: int = Field(DEFAULT_THREADS, ge=1)
    allow_partial: bool = False
    exact_dynamics: bool = False


class Scenario(_Section):
    scenario: ScenarioSection = Field(default_factory=ScenarioSection)
    design: DesignSection = Field(default_factory=DesignSection)
    swarm: SwarmSection = Field(default_factory=SwarmSection)
    dynamics: DynamicsSection = Field(default_factory=DynamicsSection)
    shape: ShapeSection = Field(default_factory=ShapeSection)
    output: OutputSection = Field(default_factory=OutputSection)
    runtime: RuntimeSection = Field(default_factory=RuntimeSection)

    @property
    def mode(self):
        return self.scenario.mode

    @property
    def harmonic_index(self):
        """0-based index of the configured harmonic"""
        return self.scenario.harmonic - 1


def read_settings(path):
    """Raw nested dict of an INI file, with input paths made absolute"""
    if not os.path.isfile(path):
        raise ScenarioError(f"Scenario file not found: {path}")

    settings = QSettings(path, QSettings.Format.IniFormat)
    if settings.status() != QSettings.Status.NoError:
        raise ScenarioError(f"Cannot parse scenario file {path}")

    unknown = sorted(key for key in settings.allKeys()
                     if key not in SCENARIO_KEYS and not key.startswith(f"{SETTINGS_RUN_GROUP}/"))
    if unknown:
        raise ScenarioError(f"Unknown settings in {path}: {', '.join(unknown)}")

    base_dir = os.path.dirname(os.path.abspath(path))
    data = {}
    for key in SCENARIO_KEYS:
        if not settings.contains(key):
            continue
        value = settings.value(key)
        if key in PATH_SETTINGS and value and not os.path.isabs(value):
            value = os.path.normpath(os.path.join(base_dir, value))
        group, name = key.split('/')
        data.setdefault(group, {})[name] = value
    return data


def merge_layers(*layers):
    """Later layers win, section by section"""
    merged = {}
    for layer in layers:
        for group, values in (layer or {}).items():
            merged.setdefault(group, {}).update({k: v for k, v in values.items() if v is not None})
    return merged


def build_scenario(*layers):
    try:
        return Scenario.model_validate(merge_layers(*layers))
    except ValidationError as e:
        raise ScenarioError(f"Invalid scenario:\n{e}") from e


def load_scenario(path):
    return build_scenario(read_settings(path))


def _to_text(value):
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, (list, tuple)):
        return ' '.join(str(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_scenario(scenario, path, run_info=None):
    """Write a scenario (and optional [run] facts) that load_scenario reads back"""
    if os.path.exists(path):
        os.remove(path)
    settings = QSettings(path, QSettings.Format.IniFormat)
    for key in SCENARIO_KEYS:
        group, name = key.split('/')
        value = getattr(getattr(scenario, group), name)
        if value is None:
            continue
        if key in PATH_SETTINGS:
            value = os.path.abspath(value)
        settings.setValue(key, _to_text(value))
    for name, value in (run_info or {}).items():
        settings.setValue(f"{SETTINGS_RUN_GROUP}/{name}", _to_text(value))
    settings.sync()
    if settings.status() != QSettings.Status.NoError:
        raise ScenarioError(f"Could not write scenario file {path}")
