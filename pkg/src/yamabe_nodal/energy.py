"""Energy of the Nehari-scaled ansatz and the certification of J_n < 2m·c_n.

Norms on Sⁿ:
    ‖u‖² = ∫ |∇_g u|² + a_n u² dV,      |u|_{2*} = (∫ a_n |u|^{2*} dV)^{1/2*}

Y_n(u) = ‖u‖²/|u|²_{2*} and, after scaling u onto the Nehari manifold,
J_n(t u) = (1/n) Y_n(u)^{n/2}.

‖w_β‖² is computed from the pairing identity ‖w‖² = a_n Σ s_i s_j ∫u_i u_j^{2*−1},
which reduces it to one bizonal integral per distinct angle between centers.
The direct gradient quadrature is kept as an independent cross-check.
"""

import logging
import math
from collections.abc import Callable, Sequence

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel

from yamabe_nodal.bubble_ansatz import NodalAnsatz, profile_from_gap, radial_profile
from yamabe_nodal.criterion import mu_pair
from yamabe_nodal.errors import QuadratureError, YamabeError
from yamabe_nodal.quadrature import (
    QuadratureKind,
    QuadratureRule,
    ball_restricted_zonal,
    bizonal_gap,
    integrate_bizonal,
    integrate_mc_batch,
    integrate_product_grid,
    integrate_zonal,
)
from yamabe_nodal.sphere_geometry import SphereConstants, SpherePoint, sphere_volume
from yamabe_nodal.symmetry_group import (
    SignedOrbit,
    acts_simply_transitively,
    ansatz_orbit,
    build_swap_group,
)

logger = logging.getLogger(__name__)

# Relative disagreement allowed between the two H¹ computations.
NORM_AGREEMENT_TOL = 5e-3

ANGLE_DIGITS = 10

Density = Callable[[NDArray[np.float64], NDArray[np.float64]], NDArray[np.float64]]


class EnergyReport(BaseModel):
    """J_n(t_β w_β) for one (n, m, β) against the bound 2m·c_n."""

    n: int
    m: int
    beta: float
    h1_norm_sq: float
    h1_norm_sq_direct: float | None
    lp_mass: float
    nehari_t: float
    quotient: float
    energy: float
    bound: float
    certified: bool
    nodal_floor_ok: bool

    @property
    def norm_agreement(self) -> float | None:
        if self.h1_norm_sq_direct is None:
            return None
        return abs(self.h1_norm_sq - self.h1_norm_sq_direct) / self.h1_norm_sq


# ═══════════════════════════════════════════════════════════════════════
# Scalar identities
# ═══════════════════════════════════════════════════════════════════════


def _check_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0 or not math.isfinite(value):
            raise QuadratureError(f"{name} must be positive and finite", {name: value})


def nehari_scale(h1_sq: float, lp_mass_val: float, n: int) -> float:
    """t with ‖tw‖² = |tw|^{2*}_{2*}: t = (h1/(a_n·mass))^{1/(2*−2)}."""
    _check_positive(h1_sq=h1_sq, lp_mass=lp_mass_val)
    const = SphereConstants.for_dimension(n)
    return float((h1_sq / (const.a_n * lp_mass_val)) ** (1.0 / (const.two_star - 2.0)))


def yamabe_quotient(h1_sq: float, lp_mass_val: float, n: int) -> float:
    """Y_n = ‖w‖²/(a_n ∫|w|^{2*})^{2/2*}."""
    _check_positive(h1_sq=h1_sq, lp_mass=lp_mass_val)
    const = SphereConstants.for_dimension(n)
    return float(h1_sq / (const.a_n * lp_mass_val) ** (2.0 / const.two_star))


def energy_from_quotient(quotient: float, n: int) -> float:
    return float(quotient ** (n / 2.0) / n)


def functional_value(t: float, h1_sq: float, lp_mass_val: float, n: int) -> float:
    """J_n(tw) = ½t²‖w‖² − (1/2*) t^{2*} a_n ∫|w|^{2*}, straight from the definition."""
    const = SphereConstants.for_dimension(n)
    return (0.5 * t**2 * h1_sq
            - t**const.two_star * const.a_n * lp_mass_val / const.two_star)


def energy_bound(n: int, m: int) -> float:
    """2m·c_n."""
    return 2 * m * SphereConstants.for_dimension(n).c_n


def quotient_constant(n: int, m: int) -> float:
    """C_{n,m} = (2^{n+1}a_nω_{n−1}/n)(2m a_nω_n)^{(2−n)/n}."""
    const = SphereConstants.for_dimension(n)
    return (2.0 ** (n + 1) * const.a_n * const.omega_nm1 / n
            * (2 * m * const.a_n * const.omega_n) ** ((2.0 - n) / n))


def norm_slope_coefficient(n: int, m: int, base: SpherePoint | None = None) -> float:
    """(2^{n+1}a_nω_{n−1}/n)(μ_p − μ̂_p), the (β−1)^{(n−2)/2} coefficient of ‖w_β‖²."""
    const = SphereConstants.for_dimension(n)
    mu, mu_hat = mu_pair(ansatz_orbit(n, m, base), n)
    return 2.0 ** (n + 1) * const.a_n * const.omega_nm1 / n * (mu - mu_hat)


def mass_lower_bound(n: int, m: int, beta: float) -> float:
    """2mω_n + (2^{n+2}/(n−2))ω_{n−1}(μ_p − μ̂_p)(β−1)^{(n−2)/2}, leading orders only."""
    const = SphereConstants.for_dimension(n)
    mu, mu_hat = mu_pair(ansatz_orbit(n, m), n)
    return (2 * m * const.omega_n
            + 2.0 ** (n + 2) / (n - 2) * const.omega_nm1 * (mu - mu_hat)
            * (beta - 1.0) ** ((n - 2) / 2.0))


# ═══════════════════════════════════════════════════════════════════════
# ‖w‖² by the pairing identity
# ═══════════════════════════════════════════════════════════════════════


def pair_integral(n: int, beta: float, theta: float, quad: QuadratureRule) -> float:
    """∫ u_{q,β} u_{p,β}^{2*−1} dV for centers at angle θ."""
    const = SphereConstants.for_dimension(n)
    rule = quad.concentrated(beta - 1.0)
    if theta < 10.0**-ANGLE_DIGITS:
        return integrate_zonal(n, lambda r: radial_profile(n, beta, r) ** const.two_star, rule)

    def integrand(r: NDArray[np.float64], psi: NDArray[np.float64]) -> NDArray[np.float64]:
        peaked = radial_profile(n, beta, r) ** (const.two_star - 1.0)
        return peaked * profile_from_gap(n, beta, bizonal_gap(r, psi, theta))

    return integrate_bizonal(n, theta, integrand, rule)


def _center_angles(orbit: SignedOrbit) -> NDArray[np.float64]:
    centers = orbit.centers()
    diff = centers[:, None, :] - centers[None, :, :]
    chord = np.linalg.norm(diff, axis=-1)
    return np.asarray(2.0 * np.arcsin(np.clip(chord / 2.0, 0.0, 1.0)))


def h1_norm_sq_pairing(w: NodalAnsatz, quad: QuadratureRule) -> float:
    """a_n Σ_{i,j} s_i s_j ∫ u_i u_j^{2*−1}, one pair integral per distinct angle."""
    const = SphereConstants.for_dimension(w.n)
    angles = _center_angles(w.orbit)
    signs = w.signs
    weights: dict[float, float] = {}
    first_pair: dict[float, tuple[int, int]] = {}
    for i in range(len(signs)):
        for j in range(len(signs)):
            key = round(float(angles[i, j]), ANGLE_DIGITS)
            weights[key] = weights.get(key, 0.0) + signs[i] * signs[j]
            first_pair.setdefault(key, (i, j))

    terms = []
    for key, weight in sorted(weights.items()):
        if weight == 0.0:
            continue
        # the rounded key can exceed π for antipodal centers
        i, j = first_pair[key]
        theta = min(float(angles[i, j]), math.pi)
        try:
            value = pair_integral(w.n, w.beta, theta, quad)
        except YamabeError as exc:
            raise QuadratureError(f"Pair integral failed: {exc.message}",
                                  {**exc.context, "theta": theta, "pair": (i, j)}) from exc
        terms.append(weight * value)
    logger.debug(f"pairing: {len(weights)} distinct angles for 2m={len(signs)} centers")
    return const.a_n * math.fsum(terms)


# ═══════════════════════════════════════════════════════════════════════
# Direct quadrature of ∫|w|^{2*} and ‖w‖²
# ═══════════════════════════════════════════════════════════════════════


def _cell_representatives(orbit: SignedOrbit) -> list[tuple[int, int]]:
    """(center index, multiplicity) pairs covering all cells.

    When the order-2m swap group permutes the centers simply transitively and
    flips w with φ, all cells carry the same integral.
    """
    k = orbit.cardinality
    if acts_simply_transitively(build_swap_group(orbit.n, orbit.m), orbit):
        return [(0, k)]
    logger.debug("configuration is not swap-transitive, integrating every cell")
    return [(i, 1) for i in range(k)]


def _integrate_density(w: NodalAnsatz, density: Density, quad: QuadratureRule
                       ) -> tuple[float, float]:
    """∫ density over Sⁿ and its standard error (0 for grid rules).

    ``density`` receives the points and the bubble components at them.
    """
    if quad.kind == QuadratureKind.MONTE_CARLO:
        return integrate_mc_batch(w.n, lambda pts: density(pts, w.components(pts)), quad)

    const = SphereConstants.for_dimension(w.n)
    rule = quad.concentrated(w.beta - 1.0)
    centers = w.orbit.centers()
    parts = []
    for index, multiplicity in _cell_representatives(w.orbit):

        def cell(points: NDArray[np.float64], index: int = index) -> NDArray[np.float64]:
            comps = w.components(points)
            powers = comps**const.two_star
            chi = powers[:, index] / powers.sum(axis=1)
            return np.asarray(chi * density(points, comps))

        value = integrate_product_grid(w.n, cell, rule, SpherePoint(centers[index]), centers)
        parts.append(multiplicity * value)
    return math.fsum(parts), 0.0


def lp_mass_with_error(w: NodalAnsatz, quad: QuadratureRule) -> tuple[float, float]:
    two_star = SphereConstants.for_dimension(w.n).two_star
    signs = w.signs

    def density(points: NDArray[np.float64], comps: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.asarray(np.abs(comps @ signs) ** two_star)

    return _integrate_density(w, density, quad)


def lp_mass(w: NodalAnsatz, quad: QuadratureRule) -> float:
    """∫ |w_β|^{2*} dV."""
    return lp_mass_with_error(w, quad)[0]


def h1_norm_sq_direct_with_error(w: NodalAnsatz, quad: QuadratureRule) -> tuple[float, float]:
    a_n = SphereConstants.for_dimension(w.n).a_n
    signs = w.signs

    def density(points: NDArray[np.float64], comps: NDArray[np.float64]) -> NDArray[np.float64]:
        grad = w.gradients(points)
        values = comps @ signs
        return np.asarray(np.einsum("ij,ij->i", grad, grad) + a_n * values**2)

    return _integrate_density(w, density, quad)


def h1_norm_sq_direct(w: NodalAnsatz, quad: QuadratureRule) -> float:
    """∫ |∇_g w|² + a_n w² dV with pointwise gradients."""
    return h1_norm_sq_direct_with_error(w, quad)[0]


def constant_h1_norm_sq(n: int, quad: QuadratureRule) -> float:
    """‖1‖² = a_n ω_n, integrated like any other zonal density."""
    a_n = SphereConstants.for_dimension(n).a_n
    return integrate_zonal(n, lambda r: np.full_like(r, a_n), quad)


# ═══════════════════════════════════════════════════════════════════════
# Reports and sweeps
# ═══════════════════════════════════════════════════════════════════════


def energy_report(
    n: int,
    m: int,
    beta: float,
    quad: QuadratureRule,
    cross_check: bool = True,
    base: SpherePoint | None = None,
) -> EnergyReport:
    """Assemble the energy of t_β w_β at the base point p = (1, 0, 0)."""
    const = SphereConstants.for_dimension(n)
    w = NodalAnsatz(n=n, beta=beta, orbit=ansatz_orbit(n, m, base))
    grid = quad if quad.kind != QuadratureKind.MONTE_CARLO else QuadratureRule()

    h1 = h1_norm_sq_pairing(w, grid)
    h1_direct = h1_norm_sq_direct(w, quad) if cross_check else None
    mass = lp_mass(w, quad)
    t = nehari_scale(h1, mass, n)
    quotient = yamabe_quotient(h1, mass, n)
    energy = energy_from_quotient(quotient, n)
    bound = energy_bound(n, m)

    report = EnergyReport(
        n=n, m=m, beta=beta,
        h1_norm_sq=h1,
        h1_norm_sq_direct=h1_direct,
        lp_mass=mass,
        nehari_t=t,
        quotient=quotient,
        energy=energy,
        bound=bound,
        certified=energy < bound,
        nodal_floor_ok=energy > 2.0 * const.c_n,
    )
    agreement = report.norm_agreement
    if agreement is not None and agreement > NORM_AGREEMENT_TOL:
        logger.warning(f"n={n} m={m} β={beta}: H¹ norms disagree by {agreement:.2%}")
    if not report.nodal_floor_ok:
        logger.warning(f"n={n} m={m} β={beta}: energy {energy:.6g} below the nodal floor 2c_n")
    logger.info(f"n={n} m={m} β={beta:.6g}: J={energy:.8g} bound={bound:.8g} "
                f"certified={report.certified}")
    return report


def default_beta_grid(count: int = 12, low: float = 1e-3, high: float = 0.5) -> list[float]:
    """β with β − 1 log-spaced over [low, high], descending toward 1."""
    return [1.0 + float(e) for e in np.geomspace(high, low, count)]


class SweepResult(BaseModel):
    n: int
    m: int
    reports: list[EnergyReport]
    best_beta: float
    best_energy: float
    certified: bool
    leading_slope: float
    expected_slope: float


def quotient_slope(report: EnergyReport) -> float:
    """(Y_n(w_β) − (2m a_n ω_n)^{2/n})/(β−1)^{(n−2)/2}."""
    const = SphereConstants.for_dimension(report.n)
    threshold = (2 * report.m * const.a_n * const.omega_n) ** (2.0 / report.n)
    return (report.quotient - threshold) / (report.beta - 1.0) ** ((report.n - 2) / 2.0)


def energy_sweep(
    n: int,
    m: int,
    quad: QuadratureRule,
    betas: Sequence[float] | None = None,
    cross_check: bool = False,
) -> SweepResult:
    """Energy reports over a β grid; certified if any β gives J_n < 2m·c_n."""
    grid = sorted(betas or default_beta_grid(), reverse=True)
    reports = [energy_report(n, m, b, quad, cross_check=cross_check) for b in grid]
    best = min(reports, key=lambda r: r.energy)
    mu, mu_hat = mu_pair(ansatz_orbit(n, m), n)
    return SweepResult(
        n=n,
        m=m,
        reports=reports,
        best_beta=best.beta,
        best_energy=best.energy,
        certified=any(r.certified for r in reports),
        leading_slope=quotient_slope(reports[-1]),
        expected_slope=-quotient_constant(n, m) * (mu - mu_hat),
    )


def richardson_limit(step_ratio: float, values: Sequence[float]) -> float:
    """Richardson extrapolation of values ordered coarse to fine, first-order error."""
    if not values:
        raise QuadratureError("Richardson extrapolation needs at least one value")
    last_level = list(values)
    for level in range(1, len(values)):
        mult = step_ratio**level
        last_level = [(mult * high - low) / (mult - 1.0)
                      for low, high in zip(last_level[:-1], last_level[1:])]
    return last_level[0]


class SlopeReport(BaseModel):
    n: int
    m: int
    epsilons: list[float]
    slopes: list[float]
    extrapolated: float
    expected: float

    @property
    def rel_error(self) -> float:
        return abs(self.extrapolated - self.expected) / abs(self.expected)


def norm_expansion_slope(
    n: int,
    m: int,
    quad: QuadratureRule,
    epsilons: Sequence[float] = (0.008, 0.004, 0.002),
) -> SlopeReport:
    """(‖w_β‖² − 2m a_n ω_n)/(β−1)^{(n−2)/2}, extrapolated to β ↓ 1.

    ``epsilons`` are the values of β − 1, coarse to fine with a constant ratio.
    """
    const = SphereConstants.for_dimension(n)
    leading = 2 * m * const.a_n * const.omega_n
    slopes = []
    for eps in epsilons:
        w = NodalAnsatz(n=n, beta=1.0 + eps, orbit=ansatz_orbit(n, m))
        slopes.append((h1_norm_sq_pairing(w, quad) - leading) / eps ** ((n - 2) / 2.0))
    ratio = epsilons[0] / epsilons[1] if len(epsilons) > 1 else 2.0
    return SlopeReport(
        n=n, m=m,
        epsilons=list(epsilons),
        slopes=slopes,
        extrapolated=richardson_limit(ratio, slopes),
        expected=norm_slope_coefficient(n, m),
    )


# ═══════════════════════════════════════════════════════════════════════
# Concentration of u_β^{2*−1} in a ball
# ═══════════════════════════════════════════════════════════════════════


def ball_leading_term(n: int, beta: float) -> float:
    """2^{(3n+2)/4} ω_{n−1} (β−1)^{(n−2)/4} / n."""
    return (2.0 ** ((3 * n + 2) / 4.0) * sphere_volume(n - 1) / n
            * (beta - 1.0) ** ((n - 2) / 4.0))


def default_delta(orbit: SignedOrbit) -> float:
    """Half the smallest distance between distinct orbit points."""
    angles = _center_angles(orbit)
    off = angles[~np.eye(len(angles), dtype=bool)]
    return float(0.5 * off.min())


class BallRow(BaseModel):
    beta: float
    ball: float
    leading: float
    ratio: float
    complement: float
    complement_scaled: float


class BallConvergenceReport(BaseModel):
    n: int
    delta: float
    rows: list[BallRow]

    @property
    def complement_variation(self) -> float:
        scaled = [r.complement_scaled for r in self.rows]
        return max(scaled) / min(scaled)


def lemma31_convergence(
    n: int,
    beta_seq: Sequence[float],
    delta: float,
    quad: QuadratureRule,
) -> BallConvergenceReport:
    """Ball and complement integrals of u_β^{2*−1} as β ↓ 1.

    The ball part over its leading term must tend to 1; the complement over
    (β−1)^{(n+2)/4} must stay bounded.
    """
    const = SphereConstants.for_dimension(n)
    rows = []
    for beta in beta_seq:
        rule = quad.concentrated(beta - 1.0)

        def density(r: NDArray[np.float64], beta: float = beta) -> NDArray[np.float64]:
            return radial_profile(n, beta, r) ** (const.two_star - 1.0)

        ball = ball_restricted_zonal(n, delta, density, rule)
        rest = ball_restricted_zonal(n, delta, density, rule, complement=True)
        leading = ball_leading_term(n, beta)
        rows.append(BallRow(
            beta=beta,
            ball=ball,
            leading=leading,
            ratio=ball / leading,
            complement=rest,
            complement_scaled=rest / (beta - 1.0) ** ((n + 2) / 4.0),
        ))
        logger.debug(f"ball n={n} β={beta}: ratio {ball / leading:.6f}")
    return BallConvergenceReport(n=n, delta=delta, rows=rows)
