"""
Experiment configuration: validated model and the flat key-value file format
"""

from pathlib import Path
from typing import Any, Dict, List, Union
import logging

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from config.settings import (CV_CONFIG, ENCODER_CONFIG, GFMM_CONFIG, HYBRID_CONFIG, MIXED_CONFIG, PATHS,
                             REPORT_CONFIG, STATS_CONFIG)
from core.encoders import ENCODER_KINDS, canonical_kind
from core.exceptions import ConfigError, EncoderError
from core.hyperbox import TIE_BREAK_MODES
from core.numeric_learners import NUMERIC_ALGORITHMS, SIMILARITY_KINDS
from utils.key_value import parse_key_value_text

logger = logging.getLogger(__name__)

MIXED_ALGORITHMS = ("m1", "m2")
HYBRID_ALGORITHMS = ("hybrid-a", "hybrid-b")
ALGORITHMS = NUMERIC_ALGORITHMS + MIXED_ALGORITHMS + HYBRID_ALGORITHMS
NO_ENCODER = "none"

_LIST_FIELDS = ("datasets", "algorithms", "encoders", "theta", "eta", "beta_fraction", "hybrid_base")


class ExperimentConfig(BaseModel):
    """
    One experiment: datasets x algorithms x encoders x theta (x eta | beta | base),
    each evaluated with repeated k-fold cross-validation.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    datasets: List[str] = Field(min_length=1)
    data_dir: str = PATHS["data_dir"]
    schema_dir: str = PATHS["schema_dir"]
    algorithms: List[str] = Field(default_factory=lambda: ["onln"], min_length=1)
    encoders: List[str] = Field(default_factory=lambda: ["label"])
    theta: List[float] = Field(default_factory=lambda: list(GFMM_CONFIG["theta_grid"]), min_length=1)
    gamma: float = Field(default=GFMM_CONFIG["gamma"], gt=0)
    sigma: float = Field(default=GFMM_CONFIG["sigma"], ge=0, le=1)
    similarity: str = GFMM_CONFIG["similarity"]
    eta: List[float] = Field(default_factory=lambda: list(MIXED_CONFIG["eta_grid"]))
    beta_fraction: List[float] = Field(default_factory=lambda: list(MIXED_CONFIG["beta_fractions"]))
    hybrid_base: List[str] = Field(default_factory=lambda: list(HYBRID_CONFIG["bases"]))
    hybrid_seed: int = HYBRID_CONFIG["seed"]
    tree_max_depth: int = Field(default=HYBRID_CONFIG["tree_max_depth"], ge=0)
    target_m: float = Field(default=ENCODER_CONFIG["target.m"], ge=0)
    target_z: float = Field(default=ENCODER_CONFIG["target.z"], gt=0)
    catboost_z: float = Field(default=ENCODER_CONFIG["catboost.z"], gt=0)
    cv_k: int = Field(default=CV_CONFIG["k"], ge=2)
    cv_repeats: int = Field(default=CV_CONFIG["repeats"], ge=1)
    seed: int = CV_CONFIG["seed"]
    output_dir: str = PATHS["output_dir"]
    tie_break: str = GFMM_CONFIG["tie_break"]
    alpha: float = Field(default=STATS_CONFIG["alpha"], gt=0, lt=1)
    jobs: int = Field(default=1, ge=1)
    report_xlsx: bool = REPORT_CONFIG["xlsx"]
    report_save_models: bool = REPORT_CONFIG["save_models"]

    @field_validator(*_LIST_FIELDS, mode="before")
    @classmethod
    def _split_lists(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [item.strip() for item in value.split(",") if item.strip()]
        return value

    @field_validator("algorithms")
    @classmethod
    def _known_algorithms(cls, value: List[str]) -> List[str]:
        value = [item.lower() for item in value]
        unknown = [item for item in value if item not in ALGORITHMS]
        if unknown:
            raise ValueError(f"unknown algorithm(s) {unknown}, expected some of {ALGORITHMS}")
        return value

    @field_validator("encoders")
    @classmethod
    def _known_encoders(cls, value: List[str]) -> List[str]:
        canonical = []
        for item in value:
            if item.lower() == NO_ENCODER:
                canonical.append(NO_ENCODER)
                continue
            try:
                canonical.append(canonical_kind(item))
            except EncoderError as e:
                raise ValueError(str(e)) from e
        return canonical

    @field_validator("hybrid_base")
    @classmethod
    def _known_bases(cls, value: List[str]) -> List[str]:
        unknown = [item for item in value if item not in NUMERIC_ALGORITHMS]
        if unknown:
            raise ValueError(f"unknown hybrid base learner(s) {unknown}, expected some of {NUMERIC_ALGORITHMS}")
        return value

    @field_validator("theta")
    @classmethod
    def _theta_range(cls, value: List[float]) -> List[float]:
        if any(not 0 < theta <= 1 for theta in value):
            raise ValueError(f"every theta must lie in (0, 1], got {value}")
        return value

    @field_validator("eta", "beta_fraction")
    @classmethod
    def _unit_range(cls, value: List[float]) -> List[float]:
        if any(not 0 <= item <= 1 for item in value):
            raise ValueError(f"values must lie in [0, 1], got {value}")
        return value

    @field_validator("similarity")
    @classmethod
    def _known_similarity(cls, value: str) -> str:
        if value not in SIMILARITY_KINDS:
            raise ValueError(f"unknown similarity '{value}', expected one of {SIMILARITY_KINDS}")
        return value

    @field_validator("tie_break")
    @classmethod
    def _known_tie_break(cls, value: str) -> str:
        if value not in TIE_BREAK_MODES:
            raise ValueError(f"unknown tie-break mode '{value}', expected one of {TIE_BREAK_MODES}")
        return value

    @model_validator(mode="after")
    def _grid_complete(self) -> "ExperimentConfig":
        if any(algorithm in NUMERIC_ALGORITHMS for algorithm in self.algorithms) and not self.encoders:
            raise ValueError("numeric learners need at least one encoder")
        if "m1" in self.algorithms and not self.eta:
            raise ValueError("m1 needs at least one eta value")
        if "m2" in self.algorithms and not self.beta_fraction:
            raise ValueError("m2 needs at least one beta fraction")
        if any(algorithm in HYBRID_ALGORITHMS for algorithm in self.algorithms) and not self.hybrid_base:
            raise ValueError("hybrid schemes need at least one base learner")
        return self

    def encoder_hyperparams(self, kind: str) -> Dict[str, float]:
        if kind == "target":
            return {"m": self.target_m, "z": self.target_z}
        if kind == "catboost":
            return {"z": self.catboost_z}
        return {}

    def with_overrides(self, **overrides: Any) -> "ExperimentConfig":
        """Copy with the given (non-None) fields replaced and re-validated."""
        values = self.model_dump()
        values.update({key: value for key, value in overrides.items() if value is not None})
        return build_config(values)


def build_config(values: Dict[str, Any]) -> ExperimentConfig:
    """
    Validate raw settings.

    Raises:
        ConfigError: With every validation problem in one message
    """
    try:
        return ExperimentConfig(**values)
    except ValidationError as e:
        problems = "; ".join(f"{'.'.join(str(part) for part in error['loc']) or 'config'}: {error['msg']}"
                             for error in e.errors())
        raise ConfigError(f"invalid experiment configuration: {problems}") from e


def parse_config_text(text: str, source: str = "<config>") -> ExperimentConfig:
    """
    Parse ``key = value`` lines. ``#`` starts a comment; list values are
    comma separated; dotted keys (``cv.k``) map to underscored fields.
    """
    try:
        entries = parse_key_value_text(text, source)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    values: Dict[str, Any] = {}
    for key, value, number in entries:
        field = key.lower().replace(".", "_").replace("-", "_")
        if field not in ExperimentConfig.model_fields:
            raise ConfigError(f"{source}:{number}: unknown key '{key}'")
        if field in values:
            logger.warning(f"Config key '{key}' repeated on line {number} of {source}; the last value wins")
        values[field] = value
    return build_config(values)


def parse_config_file(path: Union[str, Path]) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read configuration file {path}: {e}") from e
    config = parse_config_text(text, str(path))
    logger.info(f"Loaded experiment configuration from {path}: {len(config.datasets)} dataset(s), "
                f"{len(config.algorithms)} algorithm(s), {len(config.encoders)} encoder(s)")
    return config
