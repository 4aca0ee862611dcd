"""Experiment configuration, validated with pydantic and read from JSON."""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path
from typing import Literal, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..errors import ConfigurationError
from ..fio import parse_phase
from ..modspace import parse_exponent
from ..weights import parse_weight

__all__ = ["ExperimentConfig", "RunConfig", "HessianSpec", "load_config", "config_hash", "KINDS"]

KINDS = ("boundedness_M1_Minf", "boundedness_Mp", "schatten_membership", "kernel_continuity")

# integrated frequency axis of the amplitude norm that goes with each Hessian block
CASE_BLOCKS = {1: "zeta_zeta", 2: "x_zeta", 3: "y_zeta"}

# weight slot -> arity
WEIGHT_ARITY = {"omega1": 2, "omega2": 2, "omega_amp": 6, "omega": 4, "v1": 1, "v2": 2}

DEFAULT_TOLERANCES = {
    "drift": 2.0,
    "cross_check": 1e-8,
    "weight_cap": 1e6,
}

Exponent = Union[float, int, str]


class HessianSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    case: Literal[1, 2, 3] = 3
    blocks: list[str] | None = None
    d: float = Field(0.5, gt=0)


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    experiment_id: str = Field(min_length=1)
    kind: str
    N_list: list[int] = Field(default_factory=lambda: [32, 64])
    corpus_seed: int = 0
    phases: list[Union[str, dict]] = Field(
        default_factory=lambda: [f"linear_plus_sin(epsilon={e})" for e in (0.0, 0.1, 0.3)])
    weights: dict[str, str] = Field(default_factory=dict)
    exponents: list[Union[Exponent, list[Exponent]]] = Field(default_factory=list)
    controls: list[list[Exponent]] = Field(default_factory=list)
    hessian: HessianSpec = Field(default_factory=HessianSpec)
    tolerances: dict[str, float] = Field(default_factory=dict)
    n_signals: int = Field(8, ge=1)
    n_symbols: int = Field(6, ge=1)
    n_amplitudes: int = Field(3, ge=1)
    amplitude_grid: int = 16
    zero_amplitude: bool = False

    @model_validator(mode="before")
    @classmethod
    def _single_phase(cls, data):
        if isinstance(data, dict) and "phase" in data:
            data = dict(data)
            phase = data.pop("phase")
            data.setdefault("phases", phase if isinstance(phase, list) else [phase])
        return data

    @field_validator("kind")
    @classmethod
    def _check_kind(cls, v):
        if v not in KINDS:
            raise ValueError(f"unknown experiment kind {v!r}; known: {list(KINDS)}")
        return v

    @field_validator("N_list")
    @classmethod
    def _check_sizes(cls, v):
        if not v:
            raise ValueError("N_list must not be empty")
        for n in v:
            if n < 16 or n % 2:
                raise ValueError(f"grid sizes must be even and >= 16, got {n}")
        return v

    @field_validator("amplitude_grid")
    @classmethod
    def _check_amp_grid(cls, v):
        if v < 8 or v % 2:
            raise ValueError(f"amplitude grid must be even and >= 8, got {v}")
        return v

    @field_validator("phases")
    @classmethod
    def _check_phases(cls, v):
        if not v:
            raise ValueError("at least one phase is required")
        for p in v:
            parse_phase(p)
        return v

    @field_validator("weights")
    @classmethod
    def _check_weights(cls, v):
        for slot, desc in v.items():
            if slot not in WEIGHT_ARITY:
                raise ValueError(f"unknown weight slot {slot!r}; known: {sorted(WEIGHT_ARITY)}")
            parse_weight(desc, WEIGHT_ARITY[slot])
        return v

    @field_validator("exponents", "controls")
    @classmethod
    def _check_exponents(cls, v):
        for e in v:
            for p in (e if isinstance(e, list) else [e]):
                parse_exponent(p)
        return v

    @field_validator("tolerances")
    @classmethod
    def _check_tolerances(cls, v):
        unknown = set(v) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ValueError(f"unknown tolerance keys {sorted(unknown)}")
        return v

    def tolerance(self, key: str) -> float:
        return float(self.tolerances.get(key, DEFAULT_TOLERANCES[key]))

    def weight(self, slot: str):
        return parse_weight(self.weights.get(slot, "1"), WEIGHT_ARITY[slot])

    def exponent_pairs(self, default) -> list[tuple[float, float]]:
        out = []
        for e in self.exponents or default:
            if isinstance(e, list):
                if len(e) != 2:
                    raise ConfigurationError(f"exponent pair must have two entries, got {e}")
                out.append((parse_exponent(e[0]), parse_exponent(e[1])))
            else:
                p = parse_exponent(e)
                out.append((p, p))
        return out

    def blocks(self) -> list[str]:
        if self.hessian.blocks:
            return list(self.hessian.blocks)
        if self.kind == "boundedness_M1_Minf":
            return [CASE_BLOCKS[self.hessian.case]]
        if self.kind == "boundedness_Mp":
            return ["full"]
        if self.kind == "schatten_membership":
            return ["y_zeta", "full"]
        return ["y_zeta"]


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    experiments: list[ExperimentConfig] = Field(default_factory=list)
    output_dir: str = "reports"
    workers: int = Field(1, ge=1)

    @field_validator("experiments")
    @classmethod
    def _unique_ids(cls, v):
        ids = [e.experiment_id for e in v]
        dup = {i for i in ids if ids.count(i) > 1}
        if dup:
            raise ValueError(f"duplicate experiment ids {sorted(dup)}")
        return v


def load_config(source) -> RunConfig:
    """Read a run config from a path, JSON text or dict. Problems raise ConfigurationError."""
    if isinstance(source, (str, Path)) and not str(source).lstrip().startswith("{"):
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {source}: {exc}") from exc
    else:
        text = source
    if isinstance(text, str):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config is not valid JSON: {exc}") from exc
    else:
        data = text
    if not isinstance(data, dict):
        raise ConfigurationError("config must be a JSON object")
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigurationError(str(exc)) from exc


def config_hash(cfg: ExperimentConfig) -> str:
    text = json.dumps(cfg.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def is_interior(p: float) -> bool:
    return 1 < p < math.inf
