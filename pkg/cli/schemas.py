"""Pydantic models validating merged run options before dispatch."""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from cli.core.config import (
    DEFAULT_EPS_REL,
    DEFAULT_FORMAT,
    DEFAULT_HBAR,
    DEFAULT_N_MAX_HARD,
    DEFAULT_P_MAX,
)
from cli.core.dual_eval import WeightForm
from cli.core.exceptions import DomainError
from cli.core.ordering import NumberPoly
from cli.models.partition import TailPolicy
from cli.models.spin_spec import parse_spin

DEFAULT_N_LIST = (64, 128, 256, 512, 1024, 2048, 4096)


class Command(str, Enum):
    PARTITION = "partition"
    FIGURE2 = "figure2"
    CONVERGE = "converge"
    SPIN = "spin"
    SYMBOL = "symbol"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class PartitionMethod(str, Enum):
    DUAL_H = "dual-h"
    DUAL_H_OFFDIAG = "dual-H"
    WRONG_I = "wrong-I"
    WRONG_II = "wrong-II"
    WRONG_III = "wrong-III"
    ORACLE = "oracle"
    DYSON = "dyson"
    SPIN_Z = "spin-z"
    SPIN_X = "spin-x"


class SpinFamily(str, Enum):
    X = "x"
    Z = "z"


def _split(raw: str) -> list[str]:
    return [part.strip() for part in raw.split(",") if part.strip()]


class RunConfig(BaseModel):
    """Every option of every command, with its documented default."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    command: Command

    # output and tail
    output: Path | None = None
    format: OutputFormat | None = None
    eps_rel: float = Field(default=DEFAULT_EPS_REL, gt=0, lt=1)
    n_max: int = Field(default=DEFAULT_N_MAX_HARD, ge=1)
    p_max: int = Field(default=DEFAULT_P_MAX, ge=0)

    # single-mode models
    method: PartitionMethod = PartitionMethod.DUAL_H
    q: int = Field(default=1, ge=0, le=64)
    beta_g: float = Field(default=1.0, gt=0)
    n_slices: int | None = Field(default=None, ge=1)
    weight_form: WeightForm = WeightForm.LINEAR
    couplings: dict[int, float] | None = None

    # lattice and spin models
    beta: float = Field(default=1.0, gt=0)
    J: float = 1.0
    n_tot: int = Field(default=1, ge=0)
    onsite_g: float = 0.0
    S: str = "1/2"
    family: SpinFamily = SpinFamily.X
    omega: float = 1.0
    hbar: float = Field(default=DEFAULT_HBAR, gt=0)
    f: str = "0,1"

    # tables
    n_table: int = Field(default=60, ge=0)
    n_list: tuple[int, ...] = DEFAULT_N_LIST
    q_max: int = Field(default=12, ge=0, le=12)

    @field_validator("couplings", mode="before")
    @classmethod
    def parse_couplings(cls, v: Any) -> Any:
        """Accept ``"1:1.0,2:0.5"`` as well as a mapping."""
        if not isinstance(v, str):
            return v
        out: dict[int, float] = {}
        for part in _split(v):
            power, sep, value = part.partition(":")
            if not sep:
                raise ValueError(f"coupling {part!r} must look like q:g")
            out[int(power)] = float(value)
        if not out:
            raise ValueError("couplings must name at least one power")
        return out

    @field_validator("couplings")
    @classmethod
    def check_couplings(cls, v: dict[int, float] | None) -> dict[int, float] | None:
        if v is not None and any(q < 0 for q in v):
            raise ValueError("coupling powers must be non-negative")
        return v

    @field_validator("S", mode="before")
    @classmethod
    def normalise_spin(cls, v: Any) -> str:
        try:
            return str(parse_spin(str(v)))
        except DomainError as exc:
            raise ValueError(str(exc)) from exc

    @field_validator("f", mode="before")
    @classmethod
    def check_polynomial(cls, v: Any) -> str:
        text = str(v)
        try:
            [Fraction(c) for c in _split(text)]
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"f must list rational coefficients, got {text!r}") from exc
        if not _split(text):
            raise ValueError("f needs at least one coefficient")
        return text

    @field_validator("n_list", mode="before")
    @classmethod
    def parse_n_list(cls, v: Any) -> Any:
        if isinstance(v, str):
            return tuple(int(p) for p in _split(v))
        if isinstance(v, int):
            return (v,)
        return v

    @field_validator("n_list")
    @classmethod
    def check_n_list(cls, v: tuple[int, ...]) -> tuple[int, ...]:
        if not v:
            raise ValueError("N list must not be empty")
        if any(n < 1 for n in v):
            raise ValueError("every N must be >= 1")
        if any(b <= a for a, b in zip(v, v[1:], strict=False)):
            raise ValueError("N list must be strictly increasing")
        return v

    @model_validator(mode="after")
    def check_method(self) -> RunConfig:
        expands = self.method in (PartitionMethod.DYSON, PartitionMethod.SPIN_X)
        if self.command is Command.SPIN:
            expands = self.family is SpinFamily.X
        if expands and self.p_max % 2:
            raise ValueError("p_max must be even for jump expansions")
        return self

    def output_format(self) -> OutputFormat:
        """Tables default to CSV, everything else to JSON."""
        if self.format is not None:
            return self.format
        if self.command in (Command.FIGURE2, Command.CONVERGE):
            return OutputFormat.CSV
        return OutputFormat(DEFAULT_FORMAT)

    def tail_policy(self) -> TailPolicy:
        return TailPolicy(eps_rel=self.eps_rel, n_min=0, n_max_hard=self.n_max)

    def polynomial(self) -> NumberPoly:
        """``f`` as a polynomial in ħm; coefficients listed from the constant term up."""
        return NumberPoly.from_coefficients(Fraction(c) for c in _split(self.f))

    def spin(self) -> Fraction:
        return parse_spin(self.S)
