"""JSON reading and writing with versioned, deterministic output."""

from __future__ import annotations

import json
from pathlib import Path

from .schwarz import _jsonable

FORMAT_VERSION = 1


def dumps(obj) -> str:
    """Sorted, indented JSON; floats use repr so output is byte-stable."""
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path: Path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
    return path


def read_json(path: Path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def to_complex(v) -> complex:
    """[re, im] pair or a real number."""
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError(f"expected [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    return complex(v)
