"""JSON encoding for every value type that crosses the CLI boundary.

Rationals travel as ``"num/den"`` strings (``"3"`` for integers) so that no
precision is lost and output is byte-stable.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .characters import Character
from .markers import AtLeast, Infinity, Interval
from .measure import ArcSet, CellSet
from .modulus import AnySequence, sequence_from_json
from .tower import RadicInteger
from .solenoid import SolenoidPoint
from .filtration import StepFunction
from .ultrametric import UltraBall


def frac_str(x) -> str:
    return str(Fraction(x))


def parse_frac(text) -> Fraction:
    return Fraction(str(text).strip())


def encode(value: Any) -> Any:
    """Turn library values into plain JSON-compatible data."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, Fraction):
        return frac_str(value)
    if isinstance(value, Interval):
        return {"lower": frac_str(value.lower), "upper": frac_str(value.upper)}
    if isinstance(value, Infinity):
        return "inf"
    if isinstance(value, AtLeast):
        return {"at_least": value.level}
    if isinstance(value, UltraBall):
        return {"level": value.level, "cell": value.cell}
    if hasattr(value, "to_json"):
        return value.to_json()
    if isinstance(value, dict):
        return {str(k): encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    return value


def dumps(value: Any) -> str:
    return json.dumps(encode(value), sort_keys=True)


def radic_from_json(obj: dict) -> RadicInteger:
    return RadicInteger(sequence_from_json(obj["seq"]), int(obj["depth"]), int(obj["residue"]))


def point_from_json(obj: dict) -> SolenoidPoint:
    return SolenoidPoint(sequence_from_json(obj["seq"]), int(obj["depth"]), parse_frac(obj["t"]))


def cells_from_json(obj: dict, seq: AnySequence) -> CellSet | ArcSet:
    level = int(obj["level"])
    if "residues" in obj:
        return CellSet(seq, level, frozenset(int(c) for c in obj["residues"]))
    return ArcSet(seq, level, tuple((parse_frac(s), parse_frac(e)) for s, e in obj["arcs"]))


def character_from_json(obj: dict, seq: AnySequence) -> Character:
    return Character(seq, int(obj["level"]), int(obj["n"]))


def step_from_json(obj: dict) -> StepFunction:
    return StepFunction(sequence_from_json(obj["seq"]), int(obj["depth"]),
                        tuple(parse_frac(v) for v in obj["values"]))


def balls_from_json(items: list, seq: AnySequence) -> list[UltraBall]:
    return [UltraBall(int(b["level"]), int(b["cell"]), seq) for b in items]
