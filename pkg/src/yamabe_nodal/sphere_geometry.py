"""Points, distances, volumes and the stereographic chart on the round sphere Sⁿ.

Points live in ambient coordinates of ℝ^{n+1}. For n ≥ 3 the ambient space is
read as ℂ × ℂ × ℝ^{n−3}, flattened as (Re z₁, Im z₁, Re z₂, Im z₂, x...).
Charts are transient: stereographic coordinates are produced on demand and
never stored as a point type.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import null_space
from scipy.special import gamma

from yamabe_nodal.errors import DimensionError, SingularityError

logger = logging.getLogger(__name__)

# Angular distance below which two points count as the same point.
SAME_POINT_TOL = 1e-9

MIN_DIMENSION = 3


@dataclass(frozen=True, eq=False)
class SpherePoint:
    """A unit vector in ℝ^{n+1}, renormalized on construction."""

    coords: NDArray[np.float64]

    def __post_init__(self) -> None:
        arr = np.asarray(self.coords, dtype=np.float64).reshape(-1)
        if arr.size - 1 < MIN_DIMENSION:
            raise DimensionError(
                "Sphere dimension must be at least 3", {"n": arr.size - 1})
        norm = float(np.linalg.norm(arr))
        if not math.isfinite(norm) or norm == 0.0:
            raise DimensionError("Cannot normalize a zero or non-finite vector",
                                 {"coords": arr.tolist()})
        arr = arr / norm
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    @classmethod
    def from_complex(cls, z1: complex, z2: complex, x: ArrayLike = ()) -> "SpherePoint":
        """Build a point from the (z₁, z₂, x) ∈ ℂ × ℂ × ℝ^{n−3} splitting."""
        tail = np.asarray(x, dtype=np.float64).reshape(-1)
        return cls(np.concatenate([[z1.real, z1.imag, z2.real, z2.imag], tail]))

    @classmethod
    def basis(cls, n: int, index: int) -> "SpherePoint":
        """The coordinate vector e_index of ℝ^{n+1}."""
        vec = np.zeros(n + 1)
        vec[index] = 1.0
        return cls(vec)

    @property
    def n(self) -> int:
        return int(self.coords.size) - 1

    def is_close(self, other: "SpherePoint", tol: float = SAME_POINT_TOL) -> bool:
        return chord_length(self, other) < tol

    def __repr__(self) -> str:
        return f"SpherePoint({np.array2string(self.coords, precision=6)})"


@dataclass(frozen=True)
class SphereConstants:
    """Dimension-dependent constants of the critical problem on Sⁿ."""

    n: int
    omega_n: float
    omega_nm1: float
    a_n: float
    two_star: float
    c_n: float

    @classmethod
    def for_dimension(cls, n: int) -> "SphereConstants":
        _check_dimension(n)
        omega_n = sphere_volume(n)
        return cls(
            n=n,
            omega_n=omega_n,
            omega_nm1=sphere_volume(n - 1),
            a_n=n * (n - 2) / 4.0,
            two_star=2.0 * n / (n - 2),
            c_n=(n - 2) / 4.0 * omega_n,
        )


def _check_dimension(n: int) -> None:
    if n < MIN_DIMENSION:
        raise DimensionError("Sphere dimension must be at least 3", {"n": n})


def _check_same_dimension(p: SpherePoint, q: SpherePoint) -> None:
    if p.coords.size != q.coords.size:
        raise DimensionError("Points live in different dimensions",
                             {"p_dim": p.n, "q_dim": q.n})


def chord_length(p: SpherePoint, q: SpherePoint) -> float:
    """Euclidean distance |p − q| in ℝ^{n+1}."""
    _check_same_dimension(p, q)
    return float(np.linalg.norm(p.coords - q.coords))


def chordal_gap(p: SpherePoint, q: SpherePoint) -> float:
    """1 − cos d_g(p, q), computed as ½|p − q|² to keep precision near p = q."""
    return 0.5 * chord_length(p, q) ** 2


def geodesic_distance(p: SpherePoint, q: SpherePoint) -> float:
    """d_g(p, q) = arccos⟨p, q⟩ with the inner product clamped to [−1, 1]."""
    _check_same_dimension(p, q)
    chord = float(np.linalg.norm(p.coords - q.coords))
    # arccos loses half the digits near 0 and π; the chord form does not
    if chord < 1.0:
        return 2.0 * math.asin(chord / 2.0)
    inner = float(np.clip(np.dot(p.coords, q.coords), -1.0, 1.0))
    if inner < -0.5:
        anti = float(np.linalg.norm(p.coords + q.coords))
        return math.pi - 2.0 * math.asin(min(anti / 2.0, 1.0))
    return math.acos(inner)


@lru_cache(maxsize=64)
def sphere_volume(k: int) -> float:
    """vol(S^k) = 2π^{(k+1)/2} / Γ((k+1)/2)."""
    if k < 1:
        raise DimensionError("Sphere volume needs k ≥ 1", {"k": k})
    return float(2.0 * math.pi ** ((k + 1) / 2.0) / gamma((k + 1) / 2.0))


def sphere_measure(k: int) -> float:
    """Like sphere_volume but with the counting measure on S⁰ (two points)."""
    if k == 0:
        return 2.0
    return sphere_volume(k)


def sphere_volume_recursive(k: int) -> float:
    """vol(S^k) from the slicing recursion vol(S^k) = vol(S^{k−1}) ∫₀^π sin^{k−1} r dr.

    The sin-power integrals use Wallis' product, so this is independent of
    the Gamma-function closed form and serves as its oracle.
    """
    if k < 1:
        raise DimensionError("Sphere volume needs k ≥ 1", {"k": k})
    volume = 2.0  # S⁰
    for j in range(1, k + 1):
        volume *= _sin_power_integral(j - 1)
    return volume


def _sin_power_integral(p: int) -> float:
    """∫₀^π sin^p r dr by the Wallis recursion I_p = (p−1)/p · I_{p−2}."""
    value = math.pi if p % 2 == 0 else 2.0
    for j in range(2 if p % 2 == 0 else 3, p + 1, 2):
        value *= (j - 1) / j
    return value


def tangent_basis(pole: SpherePoint) -> NDArray[np.float64]:
    """Orthonormal basis of pole^⊥ as the columns of an (n+1) × n matrix."""
    return np.asarray(null_space(pole.coords.reshape(1, -1)), dtype=np.float64)


def stereographic_forward(pole: SpherePoint, q: SpherePoint) -> NDArray[np.float64]:
    """σ(q) ∈ ℝⁿ, the stereographic projection from ``pole``.

    |σ(q)| = cot(d_g(pole, q)/2): the antipode goes to the origin and the
    pole itself is the point at infinity.
    """
    _check_same_dimension(pole, q)
    if chord_length(pole, q) < SAME_POINT_TOL:
        raise SingularityError("Stereographic projection is singular at its pole",
                               {"pole": pole.coords.tolist()})
    s = float(np.dot(pole.coords, q.coords))
    tangential = q.coords - s * pole.coords
    # 1 − s via the chord keeps precision when q approaches the pole
    denom = 0.5 * chord_length(pole, q) ** 2
    return np.asarray(tangent_basis(pole).T @ tangential / denom, dtype=np.float64)


def stereographic_inverse(pole: SpherePoint, x: ArrayLike) -> SpherePoint:
    """σ⁻¹(x) = (2y + (|x|² − 1)·pole)/(|x|² + 1), y the embedded tangent vector."""
    vec = np.asarray(x, dtype=np.float64).reshape(-1)
    if vec.size != pole.n:
        raise DimensionError("Chart vector has the wrong length",
                             {"expected": pole.n, "got": vec.size})
    y = tangent_basis(pole) @ vec
    r2 = float(np.dot(vec, vec))
    return SpherePoint((2.0 * y + (r2 - 1.0) * pole.coords) / (r2 + 1.0))


def conformal_factor(x: ArrayLike) -> float:
    """4/(1 + |x|²)², the pullback (σ⁻¹)*g = conformal_factor · ḡ."""
    vec = np.asarray(x, dtype=np.float64).reshape(-1)
    return 4.0 / (1.0 + float(np.dot(vec, vec))) ** 2


def chart_volume_element(x: ArrayLike) -> float:
    """(2/(1 + |x|²))ⁿ, the Riemannian volume density in the stereographic chart."""
    vec = np.asarray(x, dtype=np.float64).reshape(-1)
    return (2.0 / (1.0 + float(np.dot(vec, vec)))) ** vec.size
