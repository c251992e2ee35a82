"""Concentrating bubbles u_β and the signed superposition w_β.

u_{c,β}(q) = (β²−1)^{(n−2)/4} (β − ⟨c, q⟩)^{−(n−2)/2} is a positive solution
of the Yamabe equation on Sⁿ for every β > 1, concentrating at c as β ↓ 1.
Everything here is written in terms of the gap 1 − cos d = ½|c − q|², which
keeps full precision next to the center.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from yamabe_nodal.errors import DegenerateBubbleError, DimensionError
from yamabe_nodal.quadrature import QuadratureRule, integrate_zonal
from yamabe_nodal.sphere_geometry import SphereConstants, SpherePoint
from yamabe_nodal.symmetry_group import SignedOrbit

logger = logging.getLogger(__name__)

# Below this β − 1 the peak (β−1)^{−(n−2)/4} is not evaluated.
MIN_BETA_GAP = 1e-8


def check_beta(beta: float) -> None:
    if not math.isfinite(beta) or beta <= 1.0:
        raise DegenerateBubbleError("Bubble parameter must satisfy β > 1", {"beta": beta})
    if beta - 1.0 < MIN_BETA_GAP:
        raise DegenerateBubbleError("β − 1 is too small to evaluate in double precision",
                                    {"beta_minus_one": beta - 1.0, "minimum": MIN_BETA_GAP})


def amplitude(n: int, beta: float) -> float:
    """(β² − 1)^{(n−2)/4}."""
    return float(((beta - 1.0) * (beta + 1.0)) ** ((n - 2) / 4.0))


def profile_from_gap(n: int, beta: float, gap: ArrayLike) -> NDArray[np.float64]:
    """u_β as a function of gap = 1 − cos d, vectorized."""
    g = np.asarray(gap, dtype=np.float64)
    return amplitude(n, beta) * ((beta - 1.0) + g) ** (-(n - 2) / 2.0)


def radial_profile(n: int, beta: float, r: ArrayLike) -> NDArray[np.float64]:
    """u_β at geodesic distance r from the center."""
    rr = np.asarray(r, dtype=np.float64)
    return profile_from_gap(n, beta, 2.0 * np.sin(rr / 2.0) ** 2)


@dataclass(frozen=True)
class Bubble:
    """u_{center,β} on Sⁿ."""

    n: int
    center: SpherePoint
    beta: float

    def __post_init__(self) -> None:
        check_beta(self.beta)
        if self.center.n != self.n:
            raise DimensionError("Bubble center lives in the wrong dimension",
                                 {"n": self.n, "center_n": self.center.n})

    @property
    def amplitude(self) -> float:
        return amplitude(self.n, self.beta)

    @property
    def peak(self) -> float:
        """((β+1)/(β−1))^{(n−2)/4}, the value at the center."""
        return float(((self.beta + 1.0) / (self.beta - 1.0)) ** ((self.n - 2) / 4.0))

    @property
    def trough(self) -> float:
        """((β−1)/(β+1))^{(n−2)/4}, the value at the antipode."""
        return float(((self.beta - 1.0) / (self.beta + 1.0)) ** ((self.n - 2) / 4.0))

    def gaps(self, points: NDArray[np.float64]) -> NDArray[np.float64]:
        diff = points - self.center.coords
        return np.asarray(0.5 * np.einsum("ij,ij->i", diff, diff), dtype=np.float64)

    def values(self, points: NDArray[np.float64]) -> NDArray[np.float64]:
        """u_β at each row of ``points``."""
        return profile_from_gap(self.n, self.beta, self.gaps(points))

    def gradients(self, points: NDArray[np.float64]) -> NDArray[np.float64]:
        """Tangential gradients ∇_g u_β as ambient vectors, one row per point.

        With s = ⟨c, q⟩: ∇_g u = ((n−2)/2) A (β − s)^{−n/2} (c − s q).
        """
        s = points @ self.center.coords
        base = (self.beta - 1.0) + self.gaps(points)
        scale = 0.5 * (self.n - 2) * self.amplitude * base ** (-self.n / 2.0)
        tangent = self.center.coords[None, :] - s[:, None] * points
        return np.asarray(scale[:, None] * tangent, dtype=np.float64)


def bubble_value(b: Bubble, q: SpherePoint) -> float:
    if q.n != b.n:
        raise DimensionError("Point and bubble dimensions differ", {"n": b.n, "q_n": q.n})
    return float(b.values(q.coords[None, :])[0])


def bubble_radial_derivative(b: Bubble, r: float) -> float:
    """∂u_β/∂r = −((n−2)/2) (β²−1)^{(n−2)/4} sin r (β − cos r)^{−n/2}."""
    if not 0.0 <= r <= math.pi:
        raise DimensionError("Radius must lie in [0, π]", {"r": r})
    base = (b.beta - 1.0) + 2.0 * math.sin(r / 2.0) ** 2
    return -0.5 * (b.n - 2) * b.amplitude * math.sin(r) * base ** (-b.n / 2.0)


@dataclass(frozen=True)
class NodalAnsatz:
    """w_β = Σ_j u_{p_j,β} − Σ_j u_{q_j,β} over a free signed orbit."""

    n: int
    beta: float
    orbit: SignedOrbit

    def __post_init__(self) -> None:
        check_beta(self.beta)
        if not self.orbit.is_free:
            raise DimensionError("The ansatz needs a free orbit",
                                 {"cardinality": self.orbit.cardinality})
        if self.orbit.n != self.n:
            raise DimensionError("Orbit lives in the wrong dimension",
                                 {"n": self.n, "orbit_n": self.orbit.n})

    @property
    def m(self) -> int:
        return self.orbit.m

    @property
    def bubbles(self) -> list[Bubble]:
        return [Bubble(self.n, c, self.beta)
                for c in self.orbit.plus_points + self.orbit.minus_points]

    @property
    def signs(self) -> NDArray[np.float64]:
        return self.orbit.signs()

    def gaps(self, points: NDArray[np.float64]) -> NDArray[np.float64]:
        """½|c_i − q|² for each point (rows) and center (columns)."""
        centers = self.orbit.centers()
        out = np.empty((points.shape[0], centers.shape[0]), dtype=np.float64)
        for k, c in enumerate(centers):
            diff = points - c
            out[:, k] = 0.5 * np.einsum("ij,ij->i", diff, diff)
        return out

    def components(self, points: NDArray[np.float64]) -> NDArray[np.float64]:
        """u_{c_i,β}(q) for each point (rows) and center (columns)."""
        return profile_from_gap(self.n, self.beta, self.gaps(points))

    def values(self, points: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.asarray(self.components(points) @ self.signs, dtype=np.float64)

    def gradients(self, points: NDArray[np.float64]) -> NDArray[np.float64]:
        """∇_g w_β as ambient tangent vectors, signed sum of bubble gradients."""
        centers = self.orbit.centers()
        s = points @ centers.T
        base = (self.beta - 1.0) + self.gaps(points)
        coeff = (0.5 * (self.n - 2) * amplitude(self.n, self.beta)
                 * base ** (-self.n / 2.0)) * self.signs[None, :]
        along = coeff @ centers
        radial = np.einsum("ij,ij->i", coeff, s)
        return np.asarray(along - radial[:, None] * points, dtype=np.float64)


def ansatz_value(w: NodalAnsatz, q: SpherePoint) -> float:
    if q.n != w.n:
        raise DimensionError("Point and ansatz dimensions differ", {"n": w.n, "q_n": q.n})
    return float(w.values(q.coords[None, :])[0])


@dataclass
class SolutionIdentityReport:
    """∫u_β^{2*} against ω_n and ‖u_β‖² against a_n ω_n."""

    n: int
    beta: float
    mass: float
    norm_sq: float
    omega_n: float
    a_n: float
    tolerance: float

    @property
    def mass_rel_error(self) -> float:
        return abs(self.mass - self.omega_n) / self.omega_n

    @property
    def norm_rel_error(self) -> float:
        target = self.a_n * self.omega_n
        return abs(self.norm_sq - target) / target

    @property
    def ok(self) -> bool:
        return self.mass_rel_error <= self.tolerance and self.norm_rel_error <= self.tolerance


def solution_identity_check(
    b: Bubble,
    quad: QuadratureRule,
    tolerance: float = 1e-6,
) -> SolutionIdentityReport:
    """Check J_n(u_β) = c_n through ∫u^{2*} = ω_n and ‖u‖² = a_n ω_n."""
    const = SphereConstants.for_dimension(b.n)
    rule = quad.concentrated(b.beta - 1.0)
    n, beta = b.n, b.beta

    def mass_density(r: NDArray[np.float64]) -> NDArray[np.float64]:
        return radial_profile(n, beta, r) ** const.two_star

    def energy_density(r: NDArray[np.float64]) -> NDArray[np.float64]:
        base = (beta - 1.0) + 2.0 * np.sin(r / 2.0) ** 2
        du = -0.5 * (n - 2) * amplitude(n, beta) * np.sin(r) * base ** (-n / 2.0)
        return du**2 + const.a_n * radial_profile(n, beta, r) ** 2

    mass = integrate_zonal(n, mass_density, rule)
    norm_sq = integrate_zonal(n, energy_density, rule)
    report = SolutionIdentityReport(n=n, beta=beta, mass=mass, norm_sq=norm_sq,
                                    omega_n=const.omega_n, a_n=const.a_n, tolerance=tolerance)
    logger.debug(f"solution identity n={n} β={beta}: mass err {report.mass_rel_error:.2e}, "
                 f"norm err {report.norm_rel_error:.2e}")
    return report

