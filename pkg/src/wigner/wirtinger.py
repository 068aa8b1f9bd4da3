"""Numerical Wirtinger calculus for maps on C^n.

A map T is viewed as a function of the real coordinates x = Re z and
y = Im z. The complex derivative pair is assembled from central finite
differences in each real direction:

    d_z    = (d/dx - i d/dy) / 2
    d_zbar = (d/dx + i d/dy) / 2

Column nu of each matrix differentiates with respect to coordinate nu;
row nu is output component nu. A map is analytic at a point exactly when
its d_zbar block vanishes there, which is what `analyticity_test`
measures. Central differences are second order, so evaluators need to be
smooth enough for that (no attempt is made to handle weaker regularity,
and no one-sided stencils are provided).

Richardson refinement re-evaluates the stencil at halved steps and
cancels the leading truncation terms; each level raises the error order
by two for sufficiently smooth maps.
"""

from dataclasses import dataclass

import numpy as np

from .states import Transformation, as_state, basis_state

DEFAULT_STEP = 1e-5


@dataclass
class WirtingerJacobian:
    """The pair (d_z T, d_zbar T) at a point, with the step that produced it."""

    d_z: np.ndarray
    d_zbar: np.ndarray
    at: np.ndarray
    step: float

    @property
    def dimension(self) -> int:
        return self.d_z.shape[0]

    @property
    def d_z_norm(self) -> float:
        """Max-norm of the d_z block."""
        return float(np.abs(self.d_z).max())

    @property
    def d_zbar_norm(self) -> float:
        """Max-norm of the d_zbar block."""
        return float(np.abs(self.d_zbar).max())


def wirtinger_jacobian(
    transform: Transformation, at, step: float = DEFAULT_STEP
) -> WirtingerJacobian:
    """Both Wirtinger matrices of `transform` at `at` by central differences.

    Uses 4n evaluations: +-step along each real axis and +-i*step along each
    imaginary axis. Entries are accurate to O(step^2) for thrice
    differentiable maps. Raises NonFiniteEvaluation if any probe returns
    NaN/Inf and DimensionMismatch if the evaluator changes dimension.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    z = as_state(at, transform.dimension)
    n = transform.dimension
    d_z = np.empty((n, n), dtype=np.complex128)
    d_zbar = np.empty((n, n), dtype=np.complex128)
    for nu in range(n):
        e = basis_state(n, nu)
        df_dx = (transform(z + step * e) - transform(z - step * e)) / (2.0 * step)
        df_dy = (transform(z + 1j * step * e) - transform(z - 1j * step * e)) / (
            2.0 * step
        )
        d_z[:, nu] = 0.5 * (df_dx - 1j * df_dy)
        d_zbar[:, nu] = 0.5 * (df_dx + 1j * df_dy)
    return WirtingerJacobian(d_z=d_z, d_zbar=d_zbar, at=z, step=float(step))


def richardson_refine(
    transform: Transformation, at, base_step: float, levels: int
) -> WirtingerJacobian:
    """Richardson-extrapolated Jacobian pair.

    `levels` in 1..4; each level halves the step once more and cancels the
    next even-order truncation term (error order 2*(levels+1) for smooth
    maps). Costs (levels+1) plain Jacobians.
    """
    if not 1 <= levels <= 4:
        raise ValueError("levels must be between 1 and 4")
    if base_step <= 0:
        raise ValueError("base_step must be positive")
    ladder = [
        wirtinger_jacobian(transform, at, base_step / 2.0**k)
        for k in range(levels + 1)
    ]
    pairs = [(j.d_z, j.d_zbar) for j in ladder]
    for m in range(1, levels + 1):
        weight = 4.0**m
        pairs = [
            tuple((weight * fine - coarse) / (weight - 1.0) for fine, coarse in zip(hi, lo))
            for lo, hi in zip(pairs[:-1], pairs[1:])
        ]
    d_z, d_zbar = pairs[0]
    return WirtingerJacobian(
        d_z=d_z, d_zbar=d_zbar, at=ladder[0].at, step=float(base_step)
    )


@dataclass
class AnalyticityReport:
    """Per-point analyticity verdicts plus the aggregate."""

    per_point: list[bool]
    residuals: list[float]
    tolerance: float

    @property
    def analytic(self) -> bool:
        return all(self.per_point)


def analyticity_test(
    transform: Transformation, points, tol: float, step: float = DEFAULT_STEP
) -> AnalyticityReport:
    """True at a point iff the max-norm of d_zbar there is below `tol`."""
    points = list(points)
    if not points:
        raise ValueError("points must be non-empty")
    if tol <= 0:
        raise ValueError("tol must be positive")
    residuals = [
        wirtinger_jacobian(transform, p, step).d_zbar_norm for p in points
    ]
    return AnalyticityReport(
        per_point=[r < tol for r in residuals],
        residuals=residuals,
        tolerance=float(tol),
    )


def real_jacobian(transform, at: np.ndarray, step: float = DEFAULT_STEP) -> np.ndarray:
    """Central-difference Jacobian of a real map (x-direction probing only).

    `transform` is any callable with a `dimension` attribute mapping real
    vectors to real vectors; shared by the real Euclidean analysis.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    n = transform.dimension
    at = np.asarray(at, dtype=np.float64)
    jac = np.empty((n, n), dtype=np.float64)
    for nu in range(n):
        e = np.zeros(n, dtype=np.float64)
        e[nu] = 1.0
        jac[:, nu] = (transform(at + step * e) - transform(at - step * e)) / (
            2.0 * step
        )
    return jac
