"""Exact r-adic integers, solenoids and the metrics, measures and characters on them."""

from .markers import INF, AtLeast, Infinity, Interval
from .modulus import CappedSequence, CapExceeded, ModulusSequence, parse_sequence
from .tower import RadicInteger, embed_int, rho
from .solenoid import SolenoidPoint, map_A, metric_D, metric_Delta, metric_d, point

__all__ = [
    "INF", "AtLeast", "Infinity", "Interval",
    "CappedSequence", "CapExceeded", "ModulusSequence", "parse_sequence",
    "RadicInteger", "embed_int", "rho",
    "SolenoidPoint", "map_A", "metric_D", "metric_Delta", "metric_d", "point",
]
