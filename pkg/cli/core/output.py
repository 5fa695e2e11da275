"""Deterministic CSV/JSON rendering and atomic file output."""

from __future__ import annotations

import json
import math
import os
import re
import tempfile
from collections.abc import Mapping, Sequence
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any

import click
import numpy as np
import pandas as pd

FLOAT_FORMAT = ".17g"
CSV_FLOAT_FORMAT = f"%{FLOAT_FORMAT}"

# Finite floats travel through json.dumps as NUL-delimited markers (escaped to \u0000)
# and are formatted afterwards.
_FLOAT_MARK = "\x00f{}\x00"
_FLOAT_MARK_RE = re.compile(r'"\\u0000f(\d+)\\u0000"')


def format_float(number: float) -> str:
    """17 significant digits, always readable back as a float."""
    text = format(number, FLOAT_FORMAT)
    return text if any(c in text for c in ".en") else f"{text}.0"


def _jsonable(value: Any, floats: list[float] | None = None) -> Any:
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, bool | str) or value is None:
        return value
    if isinstance(value, int | np.integer):
        return int(value)
    if isinstance(value, float | np.floating):
        number = float(value)
        if not math.isfinite(number):
            return str(number)
        if floats is None:
            return number
        floats.append(number)
        return _FLOAT_MARK.format(len(floats) - 1)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v, floats) for k, v in value.items()}
    if isinstance(value, Sequence | np.ndarray):
        return [_jsonable(v, floats) for v in value]
    return str(value)


def _dumps(value: Any, **kwargs: Any) -> str:
    floats: list[float] = []
    text = json.dumps(_jsonable(value, floats), sort_keys=True, ensure_ascii=False, **kwargs)
    return _FLOAT_MARK_RE.sub(lambda m: format_float(floats[int(m.group(1))]), text)


def render_json(payload: Mapping[str, Any]) -> str:
    """One JSON object, keys sorted, floats at 17 significant digits, non-finite as strings."""
    return _dumps(payload, indent=2) + "\n"


def flatten(record: Mapping[str, Any], prefix: str = "") -> dict[str, Any]:
    """Collapse nested mappings into dotted column names; lists become JSON text."""
    flat: dict[str, Any] = {}
    for key in sorted(record):
        name = f"{prefix}{key}"
        value = record[key]
        if isinstance(value, Mapping):
            flat.update(flatten(value, f"{name}."))
        elif isinstance(value, list | tuple):
            flat[name] = _dumps(value)
        else:
            flat[name] = _jsonable(value)
    return flat


def render_csv(rows: Sequence[Mapping[str, Any]], columns: Sequence[str]) -> str:
    """Header plus one line per row; floats at 17 significant digits, LF endings."""
    frame = pd.DataFrame(list(rows), columns=list(columns))
    return str(frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n"))


def write_output(text: str, output: Path | None) -> None:
    """Print to stdout, or write ``output`` through a temp file and an atomic rename."""
    if output is None:
        click.echo(text, nl=False)
        return
    output.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{output.name}.", dir=output.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, output)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
