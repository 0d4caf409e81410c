"""Result files: exact rationals, schema tags and locked writes"""

import csv
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, FrozenSet, Iterable, Sequence, Union

from filelock import FileLock

from ..exceptions import ConfigError

PathLike = Union[str, Path]

SCHEMAS: Dict[str, FrozenSet[str]] = {
    "entwit.bounds/1": frozenset({"schema", "graph", "partition", "c_min", "c_max", "witnesses"}),
    "entwit.simulation/1": frozenset({"schema", "graph", "record", "verdicts"}),
    "entwit.verify/1": frozenset({"schema", "graph", "checks", "passed"}),
    "entwit.intactness/1": frozenset({"schema", "graph", "noise", "report"}),
}


def format_rational(value: Fraction) -> str:
    """``num/den (decimal)``, e.g. ``5/4 (1.25)``"""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator} ({float(value):.6g})"


def rational_dict(value: Fraction) -> Dict[str, int]:
    value = Fraction(value)
    return {"num": value.numerator, "den": value.denominator}


def validate_payload(payload: Dict[str, Any]) -> None:
    """Check the schema tag is known and every required key is present"""
    tag = payload.get("schema")
    if tag not in SCHEMAS:
        raise ConfigError(f"unknown output schema {tag!r}")
    missing = SCHEMAS[tag] - payload.keys()
    if missing:
        raise ConfigError(f"payload for {tag} is missing {', '.join(sorted(missing))}")


def dumps(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_json(path: PathLike, payload: Dict[str, Any]) -> None:
    validate_payload(payload)
    path = Path(path)
    with FileLock(str(path) + ".lock"):
        path.write_text(dumps(payload))


def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    path = Path(path)
    with FileLock(str(path) + ".lock"):
        with open(path, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                if len(row) != len(header):
                    raise ConfigError(f"csv row has {len(row)} fields, header has {len(header)}")
                writer.writerow(row)
