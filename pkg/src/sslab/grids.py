"""Rectangular evaluation grids with a deterministic traversal order."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = ["EvaluationGrid"]


@dataclass(frozen=True)
class EvaluationGrid:
    """A rectangular set of (x, t) sample points.

    Traversal order is row-major with t as the outer index and x as the
    inner index; every consumer (solvers, writers, plotters) iterates in
    that order so output artifacts do not depend on scheduling.
    """

    x_values: tuple[float, ...]
    t_values: tuple[float, ...]

    def __post_init__(self) -> None:
        xs = tuple(float(v) for v in self.x_values)
        ts = tuple(float(v) for v in self.t_values)
        if not xs or not ts:
            raise ValidationError("grid must contain at least one x and one t value")
        for v in xs + ts:
            if not math.isfinite(v):
                raise ValidationError("grid values must be finite")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValidationError("x values must be strictly ascending")
        object.__setattr__(self, "x_values", xs)
        object.__setattr__(self, "t_values", ts)

    @classmethod
    def from_ranges(cls, x_min: float, x_max: float, x_step: float,
                    t_values: tuple[float, ...]) -> "EvaluationGrid":
        """Build a grid from an inclusive x range with uniform step."""
        if not (math.isfinite(x_step) and x_step > 0.0):
            raise ValidationError("x_step must be a positive finite number")
        if x_max < x_min:
            raise ValidationError("x_max must be >= x_min")
        count = int(round((x_max - x_min) / x_step)) + 1
        xs = tuple(x_min + i * x_step for i in range(count))
        return cls(x_values=xs, t_values=tuple(t_values))

    @property
    def shape(self) -> tuple[int, int]:
        """(number of t rows, number of x columns)."""
        return (len(self.t_values), len(self.x_values))

    @property
    def size(self) -> int:
        return len(self.t_values) * len(self.x_values)

    def x_array(self) -> np.ndarray:
        return np.asarray(self.x_values, dtype=float)

    def t_array(self) -> np.ndarray:
        return np.asarray(self.t_values, dtype=float)

    def points(self) -> list[tuple[int, int, float, float]]:
        """All (t_index, x_index, x, t) tuples in traversal order."""
        return [
            (k, i, x, t)
            for k, t in enumerate(self.t_values)
            for i, x in enumerate(self.x_values)
        ]
