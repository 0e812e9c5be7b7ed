"""Canonical JSON reading/writing.

All artifacts are written through these helpers so that identical inputs
produce byte-identical files: keys keep construction order, floats go
through ``float()`` (numpy scalars included), indentation is fixed and
every file ends with a newline.
"""

from __future__ import annotations

import json
import os
from typing import Any, Iterable, Iterator


def _default(obj: Any):
    # numpy scalars and anything with .item() degrade to plain Python numbers
    if hasattr(obj, "item"):
        return obj.item()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def dumps(obj: Any, *, indent: int | None = 2) -> str:
    return json.dumps(obj, indent=indent, ensure_ascii=False, default=_default)


def dump_json(path: str | os.PathLike, obj: Any) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))
        fh.write("\n")


def load_json(path: str | os.PathLike) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def dump_jsonl(path: str | os.PathLike, records: Iterable[Any]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(dumps(record, indent=None))
            fh.write("\n")


def load_jsonl(path: str | os.PathLike) -> Iterator[Any]:
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)
