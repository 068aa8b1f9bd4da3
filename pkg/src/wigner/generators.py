"""Deterministic generators: Haar unitaries, dressed symmetries, adversaries,
and the fuzz corpus manifest.

Generated transformations carry their ground truth (kind and matrix) in
`Transformation.ground_truth` for the harness to compare against after
classification; analysis code never reads it.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotUnitaryInput, SchemaError
from .states import Transformation

SYMMETRY_KINDS = ("linear", "antilinear")
ADVERSARY_KINDS = ("scaling", "shear", "norm_warp", "rank_deficient")

MAX_DRESSING_DEGREE = 4

# manifest entries evolve dressing seeds away from the matrix seed
_DRESSING_SEED_OFFSET = 500009


def haar_unitary(n: int, seed: int) -> np.ndarray:
    """Haar-distributed n x n unitary via QR of a complex Ginibre matrix.

    Columns are rescaled so the R diagonal is real positive, which removes
    the QR phase ambiguity and makes the distribution exactly Haar.
    Deterministic per seed.
    """
    if n < 1:
        raise DimensionMismatch("dimension must be at least 1")
    rng = np.random.default_rng(seed)
    ginibre = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(ginibre)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def haar_orthogonal(n: int, seed: int) -> np.ndarray:
    """Real counterpart of `haar_unitary` (sign-fixed QR of a real Gaussian)."""
    if n < 1:
        raise DimensionMismatch("dimension must be at least 1")
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diagonal(r))


@dataclass(frozen=True)
class DressingSpec:
    """A smooth real phase alpha(z), polynomial in the 2n real coordinates.

    Represented as a sum of ridge terms: alpha(z) = sum_r p_r(d_r . x)
    where x = (Re z, Im z), each d_r is a unit direction and p_r a dense
    univariate polynomial of the given degree with coefficients drawn
    uniform in [-1, 1], evaluated in Horner form. Unit directions keep the
    ridge variable O(1) regardless of dimension.
    """

    degree: int
    directions: np.ndarray  # (ridges, 2n), unit rows
    coefficients: np.ndarray  # (ridges, degree + 1), ascending powers
    seed: int

    @classmethod
    def random(cls, n: int, degree: int, seed: int, ridges: int = 2) -> "DressingSpec":
        if not 0 <= degree <= MAX_DRESSING_DEGREE:
            raise ValueError(f"degree must be in 0..{MAX_DRESSING_DEGREE}")
        rng = np.random.default_rng(seed)
        directions = rng.uniform(-1.0, 1.0, size=(ridges, 2 * n))
        norms = np.linalg.norm(directions, axis=1, keepdims=True)
        directions = directions / np.where(norms < 1e-12, 1.0, norms)
        coefficients = rng.uniform(-1.0, 1.0, size=(ridges, degree + 1))
        return cls(degree=degree, directions=directions, coefficients=coefficients, seed=seed)

    def __call__(self, z: np.ndarray) -> float:
        x = np.concatenate([z.real, z.imag])
        ridge = self.directions @ x
        total = 0.0
        for r in range(self.coefficients.shape[0]):
            total += np.polyval(self.coefficients[r, ::-1], ridge[r])
        return float(total)


def make_symmetry(kind: str, matrix, dressing=None) -> Transformation:
    """Build z -> exp(i*alpha(z)) * U z (linear) or ... * U conj(z) (antilinear).

    `dressing` is any callable z -> real alpha (a DressingSpec, typically),
    or None for no dressing. The matrix must be unitary within 1e-10.
    """
    if kind not in SYMMETRY_KINDS:
        raise ValueError(f"kind must be one of {SYMMETRY_KINDS}, got {kind!r}")
    u = np.asarray(matrix, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimensionMismatch(f"matrix must be square, got shape {u.shape}")
    n = u.shape[0]
    residual = float(np.abs(u.conj().T @ u - np.eye(n)).max())
    if residual > 1e-10:
        raise NotUnitaryInput(f"|U*U - I| = {residual:.3g} exceeds 1e-10")

    if kind == "linear":
        if dressing is None:
            evaluator = lambda z: u @ z
        else:
            evaluator = lambda z: np.exp(1j * dressing(z)) * (u @ z)
    else:
        if dressing is None:
            evaluator = lambda z: u @ np.conj(z)
        else:
            evaluator = lambda z: np.exp(1j * dressing(z)) * (u @ np.conj(z))

    degree = getattr(dressing, "degree", None)
    return Transformation(
        evaluator=evaluator,
        dimension=n,
        ground_truth={"kind": kind, "matrix": u, "dressing_degree": degree},
    )


def make_adversary(kind: str, n: int, seed: int) -> Transformation:
    """A smooth map that provably violates modulus preservation.

    scaling (2z), norm_warp (z*(1+|z|^2)) and rank_deficient (projection
    onto the first coordinate) are fixed maps; only the shear strength
    varies with the seed. shear and rank_deficient need n >= 2.
    """
    if kind not in ADVERSARY_KINDS:
        raise ValueError(f"kind must be one of {ADVERSARY_KINDS}, got {kind!r}")
    if n < 1:
        raise DimensionMismatch("dimension must be at least 1")
    if kind in ("shear", "rank_deficient") and n < 2:
        raise DimensionMismatch(f"{kind} needs dimension >= 2")

    if kind == "scaling":
        evaluator = lambda z: 2.0 * z
    elif kind == "shear":
        strength = 0.5 + np.random.default_rng(seed).uniform(0.0, 1.0)
        shear = np.eye(n, dtype=np.complex128)
        shear[0, 1] = strength
        evaluator = lambda z: shear @ z
    elif kind == "norm_warp":
        evaluator = lambda z: z * (1.0 + float(np.vdot(z, z).real))
    else:  # rank_deficient
        def evaluator(z):
            out = np.zeros_like(z)
            out[0] = z[0]
            return out

    return Transformation(evaluator=evaluator, dimension=n, ground_truth={"kind": kind})


def is_symmetry_kind(kind: str) -> bool:
    return kind in SYMMETRY_KINDS


def default_manifest() -> list[dict]:
    """Built-in fuzz corpus: 40 dressed symmetries (dims 2-8) + 10 adversaries."""
    entries = []
    for i in range(40):
        entries.append(
            {
                "kind": "linear" if i < 20 else "antilinear",
                "n": 2 + i % 7,
                "seed": 9000 + i,
                "dressing_degree": i % 4,
            }
        )
    for j in range(10):
        entries.append(
            {
                "kind": ADVERSARY_KINDS[j % 4],
                "n": 2 + j % 7,
                "seed": 77000 + j,
            }
        )
    return entries


def validate_manifest(obj) -> list[dict]:
    """Check a parsed manifest against the corpus schema.

    The manifest is a non-empty JSON list of entries {kind, n, seed,
    dressing_degree?}; dressing_degree applies to symmetry kinds only and
    defaults to 0. Raises SchemaError with the offending index.
    """
    if not isinstance(obj, list) or not obj:
        raise SchemaError("manifest must be a non-empty list of entries")
    known = SYMMETRY_KINDS + ADVERSARY_KINDS
    entries = []
    for idx, raw in enumerate(obj):
        if not isinstance(raw, dict):
            raise SchemaError(f"entry {idx} is not an object")
        kind = raw.get("kind")
        if kind not in known:
            raise SchemaError(f"entry {idx}: unknown kind {kind!r}")
        n = raw.get("n")
        if not isinstance(n, int) or n < 1:
            raise SchemaError(f"entry {idx}: n must be a positive integer")
        if kind in ("shear", "rank_deficient") and n < 2:
            raise SchemaError(f"entry {idx}: {kind} needs n >= 2")
        seed = raw.get("seed")
        if not isinstance(seed, int):
            raise SchemaError(f"entry {idx}: seed must be an integer")
        degree = raw.get("dressing_degree", 0)
        if kind in SYMMETRY_KINDS:
            if not isinstance(degree, int) or not 0 <= degree <= MAX_DRESSING_DEGREE:
                raise SchemaError(
                    f"entry {idx}: dressing_degree must be in 0..{MAX_DRESSING_DEGREE}"
                )
        entries.append({"kind": kind, "n": n, "seed": seed, "dressing_degree": degree})
    return entries


def transformation_from_entry(entry: dict) -> Transformation:
    """Instantiate a validated manifest entry."""
    kind = entry["kind"]
    n = entry["n"]
    seed = entry["seed"]
    if kind in SYMMETRY_KINDS:
        matrix = haar_unitary(n, seed)
        degree = entry.get("dressing_degree", 0)
        dressing = (
            DressingSpec.random(n, degree, seed + _DRESSING_SEED_OFFSET)
            if degree > 0
            else None
        )
        return make_symmetry(kind, matrix, dressing)
    return make_adversary(kind, n, seed)
