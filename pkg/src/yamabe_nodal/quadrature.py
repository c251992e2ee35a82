"""Numerical integration on Sⁿ.

Rules:
- zonal: f(d_g(p, ·)), reduced to ω_{n−1}∫₀^π f(r) sin^{n−1}r dr
- bizonal: f depending on the distances to two centers at angle θ,
  ω_{n−2}∫₀^π∫₀^π f(r, ψ) sin^{n−1}r sin^{n−2}ψ dψ dr
- product_grid: integrands depending on q only through ⟨q, c⟩ for a few
  centers c, in geodesic polar coordinates about one of them
- monte_carlo: uniform samples from normalized Gaussian vectors

Deterministic rules are composite Gauss–Legendre. When a rule carries a
concentration scale ε = β − 1, panel edges are graded geometrically around
every focus (the bubble centers) starting at √ε/2, since u_β lives at
scale √ε. Sums are accumulated with math.fsum in a fixed order, so results
do not depend on how nodes are chunked.
"""

import logging
import math
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import null_space

from yamabe_nodal.errors import DimensionError, QuadratureError
from yamabe_nodal.sphere_geometry import SpherePoint, sphere_measure, sphere_volume

logger = logging.getLogger(__name__)

MIN_DETERMINISTIC_RESOLUTION = 8
MIN_MC_SAMPLES = 10_000

RadialFn = Callable[[NDArray[np.float64]], NDArray[np.float64] | float]
BizonalFn = Callable[[NDArray[np.float64], NDArray[np.float64]], NDArray[np.float64] | float]
BatchFn = Callable[[NDArray[np.float64]], NDArray[np.float64]]


class QuadratureKind(str, Enum):
    """Available integration rules."""

    ZONAL = "zonal"
    BIZONAL = "bizonal"
    MONTE_CARLO = "monte_carlo"
    PRODUCT_GRID = "product_grid"


@dataclass(frozen=True)
class QuadratureRule:
    """How to integrate: rule kind, nodes per panel (or samples), seed, tolerance.

    ``scale`` is the concentration length ε = β − 1 of the integrand (0 for
    smooth integrands); ``angular_resolution`` sets the nodes of the angular
    axes of a product grid and defaults to ``resolution``.
    """

    kind: QuadratureKind = QuadratureKind.ZONAL
    resolution: int = 32
    seed: int = 0
    reported_tolerance: float = 1e-10
    angular_resolution: int | None = None
    scale: float = 0.0

    def __post_init__(self) -> None:
        if self.kind == QuadratureKind.MONTE_CARLO:
            if self.resolution < MIN_MC_SAMPLES:
                raise QuadratureError("Monte Carlo needs at least 10⁴ samples",
                                      {"resolution": self.resolution})
        elif self.resolution < MIN_DETERMINISTIC_RESOLUTION:
            raise QuadratureError("Deterministic rules need at least 8 nodes per axis",
                                  {"resolution": self.resolution})
        if self.angular_resolution is not None and self.angular_resolution < 4:
            raise QuadratureError("Angular resolution must be at least 4",
                                  {"angular_resolution": self.angular_resolution})
        if self.scale < 0 or not math.isfinite(self.scale):
            raise QuadratureError("Concentration scale must be finite and ≥ 0",
                                  {"scale": self.scale})
        if self.reported_tolerance <= 0:
            raise QuadratureError("Tolerance must be positive",
                                  {"reported_tolerance": self.reported_tolerance})

    @property
    def angular(self) -> int:
        return self.angular_resolution or self.resolution

    @property
    def grading_width(self) -> float:
        """Width of the innermost panel around a focus, 0 for no grading."""
        return 0.5 * math.sqrt(self.scale) if self.scale > 0 else 0.0

    def concentrated(self, scale: float) -> "QuadratureRule":
        """The same rule graded for integrands concentrating at scale β − 1."""
        return replace(self, scale=scale)

    def refined(self, factor: int = 2) -> "QuadratureRule":
        return replace(self, resolution=self.resolution * factor,
                       angular_resolution=self.angular * factor)

    def calibrate(self, n: int) -> float:
        """Relative error integrating 1 over Sⁿ; raises if above tolerance."""
        error = _calibration_error(self, n)
        if error > self.reported_tolerance:
            raise QuadratureError("Rule fails calibration: ∫1 ≠ ω_n",
                                  {"kind": self.kind.value, "n": n, "rel_error": error,
                                   "tolerance": self.reported_tolerance})
        return error


# ═══════════════════════════════════════════════════════════════════════
# Nodes
# ═══════════════════════════════════════════════════════════════════════


@lru_cache(maxsize=32)
def _leggauss(k: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    x, w = np.polynomial.legendre.leggauss(k)
    return x, w


def graded_edges(lo: float, hi: float, foci: Sequence[float], width: float) -> list[float]:
    """Panel edges on [lo, hi] doubling in size away from each focus."""
    if hi <= lo:
        raise QuadratureError("Empty integration range", {"lo": lo, "hi": hi})
    edges = {lo, hi}
    if width > 0:
        for c in foci:
            if lo < c < hi:
                edges.add(c)
            step = width
            while step < hi - lo:
                for e in (c - step, c + step):
                    if lo < e < hi:
                        edges.add(e)
                step *= 2.0
    ordered = sorted(edges)
    merged = [ordered[0]]
    for e in ordered[1:]:
        if e - merged[-1] > 1e-12 * (hi - lo):
            merged.append(e)
    merged[-1] = hi
    return merged


def panel_nodes(edges: Sequence[float], k: int) -> Iterator[tuple[NDArray[np.float64],
                                                                   NDArray[np.float64]]]:
    """Gauss–Legendre nodes and weights, one panel at a time."""
    x, w = _leggauss(k)
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        yield 0.5 * (a + b) + half * x, half * w


def composite_nodes(edges: Sequence[float], k: int) -> tuple[NDArray[np.float64],
                                                             NDArray[np.float64]]:
    parts = list(panel_nodes(edges, k))
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def _evaluate(f: Callable[..., NDArray[np.float64] | float], *args: NDArray[np.float64]
              ) -> NDArray[np.float64]:
    values = np.broadcast_to(np.asarray(f(*args), dtype=np.float64), args[0].shape)
    bad = ~np.isfinite(values)
    if bad.any():
        idx = tuple(int(i[0]) for i in np.nonzero(bad))
        node = [float(a[idx]) for a in args]
        raise QuadratureError("Integrand is not finite at a quadrature node",
                              {"node": node, "value": float(values[idx])})
    return values


def _check_n(n: int) -> None:
    if n < 2:
        raise DimensionError("Quadrature needs n ≥ 2", {"n": n})


# ═══════════════════════════════════════════════════════════════════════
# Zonal and bizonal rules
# ═══════════════════════════════════════════════════════════════════════


def _zonal_sum(n: int, f: RadialFn, rule: QuadratureRule, lo: float, hi: float,
               foci: Sequence[float]) -> float:
    edges = graded_edges(lo, hi, foci, rule.grading_width)
    r, w = composite_nodes(edges, rule.resolution)
    values = _evaluate(f, r)
    return sphere_volume(n - 1) * math.fsum(values * w * np.sin(r) ** (n - 1))


def integrate_zonal(
    n: int,
    f: RadialFn,
    rule: QuadratureRule,
    lo: float = 0.0,
    hi: float = math.pi,
    foci: Sequence[float] = (0.0,),
) -> float:
    """∫_{Sⁿ} f(d_g(p, ·)) dV, optionally restricted to lo ≤ r ≤ hi."""
    _check_n(n)
    if rule.kind == QuadratureKind.MONTE_CARLO:
        raise QuadratureError("Zonal integration needs a deterministic rule")
    rule.calibrate(n)
    return _zonal_sum(n, f, rule, lo, hi, foci)


def ball_restricted_zonal(
    n: int,
    delta: float,
    f: RadialFn,
    rule: QuadratureRule,
    complement: bool = False,
) -> float:
    """∫ over the geodesic ball B_δ(p), or over Sⁿ ∖ B_δ(p) when ``complement``."""
    if not 0.0 < delta <= math.pi:
        raise DimensionError("Ball radius must lie in (0, π]", {"delta": delta})
    if complement:
        if delta >= math.pi:
            return 0.0
        return integrate_zonal(n, f, rule, lo=delta, hi=math.pi)
    return integrate_zonal(n, f, rule, lo=0.0, hi=delta)


def bizonal_gap(
    r: NDArray[np.float64], psi: NDArray[np.float64], theta: float
) -> NDArray[np.float64]:
    """1 − cos d(x, q) for x at (r, ψ) about p, with d(p, q) = θ.

    Law of cosines in the form 2sin²((r−θ)/2) + 2 sin r sin θ sin²(ψ/2).
    """
    return np.asarray(2.0 * np.sin((r - theta) / 2.0) ** 2
                      + 2.0 * np.sin(r) * math.sin(theta) * np.sin(psi / 2.0) ** 2)


def integrate_bizonal(n: int, theta: float, f: BizonalFn, rule: QuadratureRule) -> float:
    """∫_{Sⁿ} f(r, ψ) dV for integrands of the distances to p and to q.

    r = d(p, x) and ψ is the angle at p between x and q, so that
    cos d(x, q) = cos r cos θ + sin r sin θ cos ψ.
    """
    if n < 3:
        raise DimensionError("Bizonal integration needs n ≥ 3", {"n": n})
    if not 0.0 <= theta <= math.pi:
        raise DimensionError("θ must lie in [0, π]", {"theta": theta})
    if rule.kind == QuadratureKind.MONTE_CARLO:
        raise QuadratureError("Bizonal integration needs a deterministic rule")
    rule.calibrate(n)

    width = rule.grading_width
    r_edges = graded_edges(0.0, math.pi, (0.0, theta), width)
    psi_width = width / max(math.sin(theta), width) if width > 0 else 0.0
    psi, w_psi = composite_nodes(graded_edges(0.0, math.pi, (0.0,), psi_width), rule.angular)
    psi_weight = w_psi * np.sin(psi) ** (n - 2)

    partials = []
    for r, w_r in panel_nodes(r_edges, rule.resolution):
        rr, pp = np.meshgrid(r, psi, indexing="ij")
        values = _evaluate(f, rr, pp)
        weights = np.outer(w_r * np.sin(r) ** (n - 1), psi_weight)
        partials.append(math.fsum((values * weights).ravel()))
    return sphere_volume(n - 2) * math.fsum(partials)


# ═══════════════════════════════════════════════════════════════════════
# Product grid in polar coordinates about a pole
# ═══════════════════════════════════════════════════════════════════════


@dataclass(frozen=True)
class PolarFrame:
    """Pole p, a basis of span(centers) ∩ p^⊥ (dimension a) and one unit ζ ⊥ both."""

    pole: NDArray[np.float64]
    span_basis: NDArray[np.float64]
    zeta: NDArray[np.float64] | None

    @property
    def a(self) -> int:
        return int(self.span_basis.shape[1])

    @property
    def b(self) -> int:
        return int(self.pole.size - 1 - self.a)


def polar_frame(pole: SpherePoint, centers: NDArray[np.float64]) -> PolarFrame:
    p = pole.coords
    projected = centers - np.outer(centers @ p, p)
    u, s, _ = np.linalg.svd(projected.T, full_matrices=False)
    rank = int(np.sum(s > 1e-10 * max(1.0, float(s.max(initial=0.0)))))
    basis = u[:, :rank]
    complement = null_space(np.vstack([p[None, :], basis.T]))
    zeta = complement[:, 0] if complement.shape[1] > 0 else None
    return PolarFrame(pole=p, span_basis=basis, zeta=zeta)


def _span_directions(a: int, k: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Nodes and weights on S^{a−1} ⊂ ℝ^a."""
    if a == 1:
        return np.array([[1.0], [-1.0]]), np.ones(2)
    if a == 2:
        phi = 2.0 * math.pi * np.arange(2 * k) / (2 * k)
        return np.column_stack([np.cos(phi), np.sin(phi)]), np.full(2 * k, math.pi / k)
    if a == 3:
        t, wt = _leggauss(k)
        phi = 2.0 * math.pi * np.arange(2 * k) / (2 * k)
        tt, pp = np.meshgrid(t, phi, indexing="ij")
        ring = np.sqrt(1.0 - tt**2)
        dirs = np.stack([ring * np.cos(pp), ring * np.sin(pp), tt], axis=-1).reshape(-1, 3)
        weights = np.outer(wt, np.full(2 * k, math.pi / k)).ravel()
        return dirs, weights
    raise QuadratureError("Product grid supports centers spanning at most four dimensions",
                          {"span_dimension": a + 1})


def tangent_directions(frame: PolarFrame, k: int) -> tuple[NDArray[np.float64],
                                                           NDArray[np.float64]]:
    """Unit vectors v ⊥ pole with weights for ∫_{S^{n−1}} over functions of ⟨v, span⟩."""
    a, b = frame.a, frame.b
    if a == 0:
        assert frame.zeta is not None
        return frame.zeta[None, :], np.array([sphere_measure(b - 1)])
    local, w_local = _span_directions(a, k)
    eta = local @ frame.span_basis.T
    if b == 0:
        return eta, w_local
    assert frame.zeta is not None
    x, wx = _leggauss(k)
    alpha = 0.25 * math.pi * (x + 1.0)
    w_alpha = (0.25 * math.pi * wx * np.cos(alpha) ** (a - 1) * np.sin(alpha) ** (b - 1)
               * sphere_measure(b - 1))
    dirs = (np.cos(alpha)[:, None, None] * eta[None, :, :]
            + np.sin(alpha)[:, None, None] * frame.zeta[None, None, :])
    weights = np.outer(w_alpha, w_local)
    return dirs.reshape(-1, frame.pole.size), weights.ravel()


def _product_grid_sum(n: int, f: BatchFn, rule: QuadratureRule, frame: PolarFrame,
                      foci: Sequence[float]) -> float:
    dirs, w_dirs = tangent_directions(frame, rule.angular)
    edges = graded_edges(0.0, math.pi, foci, rule.grading_width)
    partials = []
    for r, w_r in panel_nodes(edges, rule.resolution):
        points = (np.cos(r)[:, None, None] * frame.pole[None, None, :]
                  + np.sin(r)[:, None, None] * dirs[None, :, :])
        flat = points.reshape(-1, frame.pole.size)
        values = f(flat).reshape(r.size, -1)
        if not np.all(np.isfinite(values)):
            i, j = (int(v[0]) for v in np.nonzero(~np.isfinite(values)))
            raise QuadratureError("Integrand is not finite at a product-grid node",
                                  {"r": float(r[i]), "point": points[i, j].tolist()})
        weights = np.outer(w_r * np.sin(r) ** (n - 1), w_dirs)
        partials.append(math.fsum((values * weights).ravel()))
    return math.fsum(partials)


def integrate_product_grid(
    n: int,
    f: BatchFn,
    rule: QuadratureRule,
    pole: SpherePoint,
    centers: NDArray[np.float64],
    foci: Sequence[float] = (0.0,),
) -> float:
    """∫_{Sⁿ} f dV for f depending on q only through ⟨q, c⟩, c a row of ``centers``.

    ``f`` takes an (N, n+1) array of points and returns N values. Radial
    panels are graded around each distance in ``foci``.
    """
    _check_n(n)
    if rule.kind == QuadratureKind.MONTE_CARLO:
        raise QuadratureError("Product grid needs a deterministic rule")
    rule.calibrate(n)
    frame = polar_frame(pole, np.vstack([pole.coords[None, :], centers]))
    logger.debug(f"product grid: n={n}, span a={frame.a}, complement b={frame.b}")
    return _product_grid_sum(n, f, rule, frame, foci)


# ═══════════════════════════════════════════════════════════════════════
# Monte Carlo
# ═══════════════════════════════════════════════════════════════════════


def sample_sphere(n: int, count: int, seed: int) -> NDArray[np.float64]:
    """Uniform points on Sⁿ ⊂ ℝ^{n+1} from normalized Gaussian vectors."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((count, n + 1))
    return np.asarray(x / np.linalg.norm(x, axis=1, keepdims=True), dtype=np.float64)


def _mc_estimate(n: int, values: NDArray[np.float64], points: NDArray[np.float64]
                 ) -> tuple[float, float]:
    bad = ~np.isfinite(values)
    if bad.any():
        k = int(np.argmax(bad))
        raise QuadratureError("Integrand is not finite at a Monte Carlo sample",
                              {"point": points[k].tolist(), "value": float(values[k])})
    omega = sphere_volume(n)
    count = values.size
    estimate = omega * math.fsum(values) / count
    std_error = omega * float(np.std(values, ddof=1)) / math.sqrt(count)
    return estimate, std_error


def integrate_mc_batch(n: int, f: BatchFn, rule: QuadratureRule) -> tuple[float, float]:
    """Monte Carlo estimate and standard error for a vectorized integrand."""
    _check_n(n)
    if rule.kind != QuadratureKind.MONTE_CARLO:
        raise QuadratureError("integrate_mc needs a monte_carlo rule",
                              {"kind": rule.kind.value})
    points = sample_sphere(n, rule.resolution, rule.seed)
    values = np.asarray(f(points), dtype=np.float64).reshape(-1)
    return _mc_estimate(n, values, points)


def integrate_mc(n: int, f: Callable[[SpherePoint], float], rule: QuadratureRule
                 ) -> tuple[float, float]:
    """ω_n·mean(f) over seeded uniform samples, with ω_n·sd/√N."""
    return integrate_mc_batch(
        n, lambda pts: np.array([f(SpherePoint(p)) for p in pts]), rule)


# ═══════════════════════════════════════════════════════════════════════
# Calibration
# ═══════════════════════════════════════════════════════════════════════


def _one(x: NDArray[np.float64], *_: NDArray[np.float64]) -> NDArray[np.float64]:
    return np.ones_like(x)


@lru_cache(maxsize=256)
def _calibration_error(rule: QuadratureRule, n: int) -> float:
    omega = sphere_volume(n)
    if rule.kind == QuadratureKind.MONTE_CARLO:
        value, _ = _mc_estimate(n, np.ones(rule.resolution), np.zeros((1, n + 1)))
    elif rule.kind == QuadratureKind.BIZONAL and n >= 3:
        value = _bizonal_one(n, rule)
    elif rule.kind == QuadratureKind.PRODUCT_GRID:
        pole = SpherePoint.basis(n, 0)
        frame = polar_frame(pole, np.eye(n + 1)[: min(4, n + 1)])
        value = _product_grid_sum(n, lambda pts: np.ones(len(pts)), rule, frame, (0.0,))
    else:
        value = _zonal_sum(n, _one, rule, 0.0, math.pi, (0.0,))
    error = abs(value - omega) / omega
    logger.debug(f"calibration {rule.kind.value} n={n}: rel error {error:.2e}")
    return error


def _bizonal_one(n: int, rule: QuadratureRule) -> float:
    width = rule.grading_width
    r, w_r = composite_nodes(graded_edges(0.0, math.pi, (0.0, math.pi / 2), width),
                             rule.resolution)
    psi, w_psi = composite_nodes(graded_edges(0.0, math.pi, (0.0,), width), rule.angular)
    return sphere_volume(n - 2) * math.fsum(w_r * np.sin(r) ** (n - 1)) * math.fsum(
        w_psi * np.sin(psi) ** (n - 2))
