"""Bounded, ordered real-valued search spaces.

A point in a space (a *parameter vector*) is a 1-D float64 numpy array whose
length equals the space dimension. Vectors returned by this package are
marked read-only.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ConfigError, DimensionMismatch, DuplicateName, InvalidBounds

__all__ = [
    "ParamSpec",
    "ParamSpace",
    "define_space",
    "default_e2e_space",
    "clamp",
    "as_vector",
    "load_space",
    "E2E_DESCRIPTIONS",
]


@dataclass(frozen=True)
class ParamSpec:
    """One named real parameter with inclusive bounds ``[lower, upper]``.

    ``default`` is the baseline value; it is allowed to sit outside the
    bounds and is never used for sampling.
    """

    name: str
    lower: float
    upper: float
    default: float
    description: str = ""

    def __post_init__(self):
        if not self.name or not isinstance(self.name, str):
            raise ConfigError(f"parameter name must be a non-empty string, got {self.name!r}")
        for field in ("lower", "upper", "default"):
            value = float(getattr(self, field))
            if not math.isfinite(value):
                raise InvalidBounds(f"{self.name}: {field} must be finite, got {value}")
            object.__setattr__(self, field, value)
        if not self.lower < self.upper:
            raise InvalidBounds(f"{self.name}: lower ({self.lower}) must be < upper ({self.upper})")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def to_dict(self) -> dict:
        d = {"name": self.name, "lower": self.lower, "upper": self.upper, "default": self.default}
        if self.description:
            d["description"] = self.description
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "ParamSpec":
        try:
            return cls(
                name=d["name"],
                lower=d["lower"],
                upper=d["upper"],
                default=d.get("default", 0.5 * (float(d["lower"]) + float(d["upper"]))),
                description=d.get("description", ""),
            )
        except KeyError as exc:
            raise ConfigError(f"parameter entry missing field {exc}") from None


class ParamSpace:
    """Immutable ordered collection of :class:`ParamSpec`."""

    __slots__ = ("_specs", "_lower", "_upper", "_index")

    def __init__(self, specs: Iterable[ParamSpec]):
        specs = tuple(specs)
        if not specs:
            raise ConfigError("a parameter space needs at least one parameter")
        index = {}
        for i, s in enumerate(specs):
            if s.name in index:
                raise DuplicateName(f"duplicate parameter name {s.name!r}")
            index[s.name] = i
        self._specs = specs
        self._index = index
        self._lower = _frozen(np.array([s.lower for s in specs]))
        self._upper = _frozen(np.array([s.upper for s in specs]))

    @property
    def specs(self) -> tuple[ParamSpec, ...]:
        return self._specs

    @property
    def dimension(self) -> int:
        return len(self._specs)

    @property
    def names(self) -> list[str]:
        return [s.name for s in self._specs]

    @property
    def lower(self) -> np.ndarray:
        return self._lower

    @property
    def upper(self) -> np.ndarray:
        return self._upper

    @property
    def defaults(self) -> np.ndarray:
        return _frozen(np.array([s.default for s in self._specs]))

    def __len__(self) -> int:
        return len(self._specs)

    def __iter__(self):
        return iter(self._specs)

    def __getitem__(self, key):
        if isinstance(key, str):
            return self._specs[self._index[key]]
        return self._specs[key]

    def __eq__(self, other):
        return isinstance(other, ParamSpace) and self._specs == other._specs

    def __hash__(self):
        return hash(self._specs)

    def __repr__(self):
        return f"ParamSpace({', '.join(self.names)})"

    def contains(self, v: Sequence[float]) -> bool:
        v = as_vector(v, self)
        return bool(np.all(v >= self._lower) and np.all(v <= self._upper))

    def to_dict(self, v: Sequence[float]) -> dict[str, float]:
        """Map a vector onto ``{name: value}`` in declaration order."""
        v = as_vector(v, self)
        return {name: float(x) for name, x in zip(self.names, v)}

    def from_dict(self, values: Mapping[str, float]) -> np.ndarray:
        missing = [n for n in self.names if n not in values]
        if missing:
            raise DimensionMismatch(f"missing values for {missing}")
        return _frozen(np.array([float(values[n]) for n in self.names]))

    def to_json(self) -> list[dict]:
        return [s.to_dict() for s in self._specs]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    a.flags.writeable = False
    return a


def as_vector(v: Sequence[float], space: ParamSpace) -> np.ndarray:
    """Coerce ``v`` to a float64 array, checking its length against ``space``."""
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != space.dimension:
        raise DimensionMismatch(
            f"vector of shape {arr.shape} does not match space dimension {space.dimension}"
        )
    return arr


def define_space(specs: Sequence[ParamSpec | Mapping | tuple]) -> ParamSpace:
    """Build a space from specs, dicts, or ``(name, lower, upper[, default])`` tuples."""
    specs = [
        s if isinstance(s, ParamSpec)
        else ParamSpec.from_dict(dict(zip(("name", "lower", "upper", "default"), s))) if isinstance(s, tuple)
        else ParamSpec.from_dict(s)
        for s in specs
    ]
    return ParamSpace(specs)


# Table of the six transfer-learning hyperparameters tuned by the GA, with the
# original pipeline's values as defaults.
E2E_DESCRIPTIONS = {
    "pos-cls-weight": "weight of positive class",
    "neg-cls-weight": "weight of negative class",
    "weight-decay": "stage 1",
    "weight-decay2": "stage 2",
    "init-learningrate": "learning rate for stage 1",
    "all-layer-multiplier": "multiplier for stages other than stage 1",
}

_E2E_DEFAULTS = {
    "pos-cls-weight": 1.0,
    "neg-cls-weight": 1.0,
    "weight-decay": 0.0001,
    "weight-decay2": 0.0001,
    "init-learningrate": 0.01,
    "all-layer-multiplier": 0.1,
}

# GA-found values reported alongside the defaults.
GA_E2E_REPORTED = {
    "pos-cls-weight": 0.948,
    "neg-cls-weight": 0.319,
    "weight-decay": 0.269,
    "weight-decay2": 0.225,
    "init-learningrate": 0.0008,
    "all-layer-multiplier": 0.475,
}


def default_e2e_space() -> ParamSpace:
    """The six-parameter box ``[0, 0.999]^6`` with the original defaults."""
    return ParamSpace(
        ParamSpec(name, 0.0, 0.999, _E2E_DEFAULTS[name], desc)
        for name, desc in E2E_DESCRIPTIONS.items()
    )


def clamp(v: Sequence[float], space: ParamSpace) -> np.ndarray:
    """Project each coordinate of ``v`` onto its ``[lower, upper]`` interval."""
    v = as_vector(v, space)
    return _frozen(np.minimum(np.maximum(v, space.lower), space.upper))


def load_space(path: str | Path) -> ParamSpace:
    """Read a space from a JSON file holding a list of parameter objects.

    The file may also be an object with a ``"space"`` key.
    """
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, Mapping):
        data = data.get("space")
    if not isinstance(data, list):
        raise ConfigError(f"{path}: expected a list of parameter definitions")
    return define_space(data)
