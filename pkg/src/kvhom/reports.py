"""Deterministic JSON reports: verdicts, provenance and a schema version."""

import json
from fractions import Fraction

from .algebra import Verdict
from .poly import Poly
from .scalars import GaussianRational, fmt

__all__ = ["SCHEMA_VERSION", "jsonable", "verdict_json", "Report", "dumps"]

SCHEMA_VERSION = "1.0"


def jsonable(x):
    """Plain JSON data from scalars, Polys, tuples, sets and dataclass-like objects."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, (Fraction, GaussianRational)):
        return fmt(x)
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, Poly):
        return x.format()
    if isinstance(x, Verdict):
        return verdict_json(x)
    if isinstance(x, dict):
        return {str(k) if not isinstance(k, tuple) else ",".join(map(str, k)): jsonable(v)
                for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(jsonable(v) for v in x)
    if hasattr(x, "to_json"):
        return jsonable(x.to_json())
    return repr(x)


def verdict_json(v):
    return {"name": v.name, "ok": bool(v.ok), "witness": jsonable(v.witness),
            "detail": jsonable(v.detail or {})}


class Report:
    """Accumulates verdicts and sections; serializes byte-deterministically."""

    def __init__(self, command, config, conventions=None):
        self.command = command
        self.config = dict(config)
        self.conventions = dict(conventions or {})
        self.truncation = {}
        self.verdicts = []
        self.sections = {}

    def add(self, verdict, prefix=None):
        if prefix:
            verdict = Verdict(f"{prefix}.{verdict.name}", verdict.ok, verdict.witness,
                              verdict.detail)
        self.verdicts.append(verdict)
        return verdict

    def extend(self, verdicts, prefix=None):
        for v in verdicts:
            self.add(v, prefix)

    def section(self, name, data):
        self.sections[name] = data

    def flag_truncation(self, name, lost):
        self.truncation[name] = bool(lost)

    @property
    def ok(self):
        return all(v.ok for v in self.verdicts)

    def to_json(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "ok": self.ok,
            "verdicts": [verdict_json(v) for v in self.verdicts],
            "provenance": {"config": jsonable(self.config),
                           "conventions": jsonable(self.conventions),
                           "truncation_loss": jsonable(self.truncation)},
            "sections": jsonable(self.sections),
        }

    def dumps(self):
        return dumps(self.to_json())


def dumps(doc):
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=True) + "\n"
