"""Real Euclidean analogue: scalar-product preservation and orthogonal
matrix reconstruction.

A differentiable map on R^n with T(u).T(v) = u.v for all pairs has a
Jacobian that is constant, invertible and orthogonal, so T is the linear
map given by its Jacobian at the origin. Unlike the complex case there is
no phase freedom: Jacobians at distinct points must agree entrywise.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    DimensionMismatch,
    NonFiniteEvaluation,
    NotIsometry,
    NotOrthogonal,
    OriginNotFixed,
    ReconstructionMismatch,
)
from .wirtinger import real_jacobian


def as_real_vector(u, dim: int | None = None) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(u, dtype=np.float64))
    if arr.ndim != 1:
        raise DimensionMismatch(f"expected a vector, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {arr.shape[0]}")
    if not np.isfinite(arr).all():
        raise NonFiniteEvaluation("vector has non-finite components")
    return arr


@dataclass
class RealTransformation:
    """A deterministic, dimension-preserving map on R^n."""

    evaluator: Callable[[np.ndarray], np.ndarray]
    dimension: int

    def __call__(self, u) -> np.ndarray:
        uv = as_real_vector(u, self.dimension)
        out = np.asarray(self.evaluator(uv), dtype=np.float64)
        if out.shape != (self.dimension,):
            raise DimensionMismatch(
                f"evaluator returned shape {out.shape}, expected ({self.dimension},)"
            )
        if not np.isfinite(out).all():
            raise NonFiniteEvaluation("evaluator returned non-finite components")
        return out


@dataclass
class IsometryReport:
    pairs_tested: int
    max_deviation: float
    tolerance: float
    passed: bool
    deviations: list[float] = field(default_factory=list)


def check_isometry(
    transform: RealTransformation,
    num_pairs: int = 100,
    seed: int = 0,
    tol: float = 1e-8,
) -> IsometryReport:
    """Max of |T(u).T(v) - u.v| over seeded pairs (plus zero and parallel specials)."""
    if num_pairs < 1:
        raise ValueError("num_pairs must be at least 1")
    n = transform.dimension
    rng = np.random.default_rng(seed)
    anchor = rng.standard_normal(n)
    pairs = [(np.zeros(n), np.zeros(n)), (np.zeros(n), anchor), (anchor, anchor)]
    pairs += [
        (rng.standard_normal(n), rng.standard_normal(n)) for _ in range(num_pairs)
    ]
    deviations = [
        abs(float(transform(u) @ transform(v)) - float(u @ v)) for u, v in pairs
    ]
    worst = max(deviations)
    return IsometryReport(
        pairs_tested=len(pairs),
        max_deviation=worst,
        tolerance=float(tol),
        passed=worst < tol,
        deviations=deviations,
    )


def reconstruct_orthogonal(
    transform: RealTransformation,
    step: float = 1e-5,
    tol: float = 1e-8,
    num_pairs: int = 100,
    seed: int = 0,
    origin_tol: float = 1e-9,
) -> np.ndarray:
    """Recover the orthogonal matrix of a scalar-product-preserving map.

    The matrix is the central-difference Jacobian at the origin, verified
    three ways: O^T O = I within `tol`; |T(v) - O v| / |v| < tol at 50
    seeded points; Jacobians at two further points agree with O entrywise
    within `tol` (no scalar freedom in the real case).
    """
    report = check_isometry(transform, num_pairs=num_pairs, seed=seed, tol=tol)
    if not report.passed:
        raise NotIsometry(
            f"max scalar-product deviation {report.max_deviation:.3g} "
            f"exceeds {tol:g}",
            report=report,
        )
    n = transform.dimension
    origin_norm = float(np.linalg.norm(transform(np.zeros(n))))
    if origin_norm > origin_tol:
        raise OriginNotFixed(f"|T(0)| = {origin_norm:.3g} exceeds {origin_tol:g}")

    matrix = real_jacobian(transform, np.zeros(n), step)
    residual = float(np.abs(matrix.T @ matrix - np.eye(n)).max())
    if residual >= tol:
        raise NotOrthogonal(f"|O^T O - I| = {residual:.3g} exceeds {tol:g}")

    rng = np.random.default_rng([seed, 1])
    for _ in range(50):
        v = rng.standard_normal(n)
        rec = float(np.linalg.norm(transform(v) - matrix @ v) / np.linalg.norm(v))
        if rec >= tol:
            raise ReconstructionMismatch(
                f"origin Jacobian misses the map by {rec:.3g} relative (tol {tol:g})"
            )
    for _ in range(2):
        v = rng.standard_normal(n)
        drift = float(np.abs(real_jacobian(transform, v, step) - matrix).max())
        if drift >= tol:
            raise ReconstructionMismatch(
                f"Jacobian is not constant: entrywise drift {drift:.3g} (tol {tol:g})"
            )
    return matrix
