"""Flat ``key = value`` configuration files.

One assignment per line. ``#`` starts a comment; blank lines are ignored.
Keys are case-sensitive and may contain dots (``left.N``). Every problem is
raised as :class:`~gibbslab.errors.ConfigError` carrying the line number and
the field name.

Example scenario file::

    # two different gases at equal T and P
    left.species  = A
    left.N        = 10000
    left.V        = 1.0
    right.species = B
    right.N       = 10000
    right.V       = 1.0
    T             = 1.0
    policy        = by-species
"""
import math

from .errors import ConfigError

__all__ = ["REQUIRED", "Field", "parse_assignments", "load_config", "SCENARIO_FIELDS", "DEMON_FIELDS"]

REQUIRED = object()


def _integer(text):
    value = float(text) if any(c in text for c in ".eE") else int(text)
    if isinstance(value, float):
        if not value.is_integer():
            raise ValueError(f"{text!r} is not an integer")
        value = int(value)
    return value


def _real(text):
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"{text!r} is not a finite number")
    return value


def _boolean(text):
    key = text.lower()
    if key in ("true", "yes", "on", "1"):
        return True
    if key in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"{text!r} is not a boolean")


def _reals(text):
    return [_real(t.strip()) for t in text.split(",") if t.strip()]


def _text(text):
    if not text:
        raise ValueError("empty value")
    return text


class Field:
    """Type and default of one configuration key."""

    def __init__(self, parse, default=REQUIRED, doc=""):
        self.parse = parse
        self.default = default
        self.doc = doc


SCENARIO_FIELDS = {
    "left.species": Field(_text, doc="species tag of the left gas"),
    "left.N": Field(_integer, doc="particle number, left"),
    "left.V": Field(_real, doc="volume, left"),
    "left.T": Field(_real, None, "temperature, left (defaults to T)"),
    "right.species": Field(_text, doc="species tag of the right gas"),
    "right.N": Field(_integer, doc="particle number, right"),
    "right.V": Field(_real, doc="volume, right"),
    "right.T": Field(_real, None, "temperature, right (defaults to T)"),
    "T": Field(_real, 1.0, "temperature of both sides"),
    "policy": Field(_text, "by-species", "by-species | by-origin | none"),
    "convention": Field(_text, "distinguishable",
                        "distinguishable | corrected-boltzmann | bose | fermi"),
    "states_per_volume": Field(_real, 1e6, "one-particle states per unit volume"),
    "similarity": Field(_real, 0.0, "species similarity label; never affects results"),
}

DEMON_FIELDS = {
    "n_per_side": Field(_integer, 500, "particles per half"),
    "box_width": Field(_real, 1.0),
    "box_height": Field(_real, 1.0),
    "T": Field(_real, 1.0, "wall temperature"),
    "membrane_speed": Field(_real, None, "absolute speed; overrides speed_factor"),
    "speed_factor": Field(_real, 0.005, "membrane speed in units of sqrt(T)"),
    "quasi_static_limit": Field(_real, 0.01, "largest allowed speed_factor"),
    "thermal_walls": Field(_boolean, True),
    "mixing_time": Field(_real, None, "defaults to 20 box-crossing times"),
    "species_left": Field(_text, "A"),
    "species_right": Field(_text, "A"),
    "ladder": Field(_reals, [], "comma-separated speed factors to run as a ladder"),
    "replicas": Field(_integer, 1, "replicas per ladder rung"),
    "fluctuation_samples": Field(_integer, 0, "left-count samples after mixing"),
    "fluctuation_interval": Field(_real, 2.0, "time between left-count samples"),
    "seed": Field(_integer, None, "RNG seed; the --seed flag takes precedence"),
}


def parse_assignments(text):
    """Split a config text into ``{key: (raw_value, line_number)}``."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: missing key", line=lineno)
        if key in out:
            raise ConfigError(f"line {lineno}: {key!r} given twice (first on line {out[key][1]})",
                              line=lineno, field=key)
        out[key] = (value, lineno)
    return out


def load_config(text, fields):
    """Parse ``text`` against ``fields`` and return a dict with every field resolved."""
    assignments = parse_assignments(text)
    resolved = {}
    for key, (value, lineno) in assignments.items():
        if key not in fields:
            raise ConfigError(f"line {lineno}: unknown field {key!r}", line=lineno, field=key)
        try:
            resolved[key] = fields[key].parse(value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}",
                              line=lineno, field=key) from None
    for key, spec in fields.items():
        if key not in resolved:
            if spec.default is REQUIRED:
                raise ConfigError(f"missing required field {key!r}", field=key)
            resolved[key] = spec.default
    return resolved
