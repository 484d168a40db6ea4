"""JSON documents for instances and matchings.

Instance::

    {"patients": ["i1", "i2"],
     "categories": [{"id": "c1", "reserve": 1,
                     "priority": ["i1", "__BETA__", "i2", "__ETA__"]}]}

Matching::

    {"assignments": {"i1": "c2", "i2": "c1"}}

Unmatched patients are left out of ``assignments``. Output is canonical:
sorted keys, two-space indent, trailing newline.
"""

from __future__ import annotations

import json
from collections.abc import Mapping
from typing import Any

from .model import Instance, Matching, validate_instance, validate_matching

__all__ = [
    "ParseError",
    "dumps",
    "instance_to_doc",
    "parse_instance",
    "serialize_instance",
    "parse_matching",
    "serialize_matching",
]


class ParseError(ValueError):
    code = "PARSE_ERROR"

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"PARSE_ERROR: {message}{where}")
        self.line = line
        self.column = column


def dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _load(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None


def _expect(cond: bool, message: str) -> None:
    if not cond:
        raise ParseError(message)


def instance_to_doc(instance: Instance) -> dict[str, Any]:
    return {
        "patients": list(instance.patients),
        "categories": [
            {"id": c.id, "reserve": c.reserve, "priority": list(c.priority.ranking)} for c in instance.categories
        ],
    }


def parse_instance(text: str) -> Instance:
    doc = _load(text)
    _expect(isinstance(doc, dict), "instance document must be a JSON object")
    extra = set(doc) - {"patients", "categories"}
    _expect(not extra, f"unexpected keys {sorted(extra)}")
    patients = doc.get("patients", [])
    categories = doc.get("categories", [])
    _expect(isinstance(patients, list) and all(isinstance(p, str) for p in patients), "patients must be a list of strings")
    _expect(isinstance(categories, list), "categories must be a list")
    for k, c in enumerate(categories):
        _expect(isinstance(c, dict), f"category #{k} must be an object")
        _expect(set(c) == {"id", "reserve", "priority"}, f"category #{k} needs exactly id, reserve, priority")
        _expect(isinstance(c["id"], str), f"category #{k} id must be a string")
        _expect(isinstance(c["reserve"], int) and not isinstance(c["reserve"], bool), f"category {c['id']!r} reserve must be an integer")
        _expect(
            isinstance(c["priority"], list) and all(isinstance(t, str) for t in c["priority"]),
            f"category {c['id']!r} priority must be a list of strings",
        )
    return validate_instance(doc)


def serialize_instance(instance: Instance) -> str:
    return dumps(instance_to_doc(instance))


def parse_matching(text: str, instance: Instance | None = None) -> Matching:
    doc = _load(text)
    _expect(isinstance(doc, dict) and set(doc) == {"assignments"}, 'matching document must be {"assignments": {...}}')
    assignments = doc["assignments"]
    _expect(
        isinstance(assignments, dict) and all(isinstance(v, str) for v in assignments.values()),
        "assignments must map patient ids to category ids",
    )
    m = Matching(assignments)
    return validate_matching(instance, m) if instance is not None else m


def serialize_matching(matching: Mapping[str, str]) -> str:
    return dumps({"assignments": dict(matching)})
