"""State vectors and evaluatable transformations on C^n."""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, NonFiniteEvaluation


def as_state(z, dim: int | None = None) -> np.ndarray:
    """Coerce `z` to a finite 1-D complex128 vector, checking its dimension."""
    arr = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    if arr.ndim != 1:
        raise DimensionMismatch(f"state must be a vector, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {arr.shape[0]}")
    if not np.isfinite(arr).all():
        raise NonFiniteEvaluation("state vector has non-finite components")
    return arr


def zero_state(dim: int) -> np.ndarray:
    return np.zeros(dim, dtype=np.complex128)


def basis_state(dim: int, index: int) -> np.ndarray:
    e = np.zeros(dim, dtype=np.complex128)
    e[index] = 1.0
    return e


def random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Standard complex Gaussian vector (each component CN(0, 1))."""
    return (rng.standard_normal(dim) + 1j * rng.standard_normal(dim)) / np.sqrt(2.0)


@dataclass
class Transformation:
    """An evaluatable map z -> T(z) on C^n.

    The evaluator must be deterministic and safe to call from several
    threads at once. `source` carries the defining expression text when the
    map was compiled from a file. `ground_truth` is generator bookkeeping
    (the kind and matrix an instance was built from); analysis code never
    reads it.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    dimension: int
    source: str | None = None
    ground_truth: dict | None = None

    def __post_init__(self):
        if self.dimension < 1:
            raise DimensionMismatch("dimension must be at least 1")

    def __call__(self, z) -> np.ndarray:
        zv = as_state(z, self.dimension)
        out = np.asarray(self.evaluator(zv), dtype=np.complex128)
        if out.shape != (self.dimension,):
            raise DimensionMismatch(
                f"evaluator returned shape {out.shape}, expected ({self.dimension},)"
            )
        if not np.isfinite(out).all():
            raise NonFiniteEvaluation("evaluator returned non-finite components")
        return out
