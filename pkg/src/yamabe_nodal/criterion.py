"""The symmetry criterion μ_p − μ̂_p > 0 and the inequalities behind m_n.

Provides:
- mu_pair: the interaction sums μ_p, μ̂_p of any free signed orbit
- a_nm: the closed form (μ_p − μ̂_p)/m at p = (1, 0, 0)
- a_nm_mp: an mpmath oracle for near-ties
- minimal_m: the threshold m_n (9, 7, 6, 6, then 5)
- f_n0, claim15_margin, a3_recursion_check and the bound certificates
  that prove the threshold holds for every n
"""

import logging
import math
from collections.abc import Iterable

import mpmath
import numpy as np
from pydantic import BaseModel

from yamabe_nodal.errors import DimensionError, SingularityError
from yamabe_nodal.sphere_geometry import SAME_POINT_TOL, SpherePoint, chordal_gap
from yamabe_nodal.symmetry_group import SignedOrbit, ansatz_orbit

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)

# Below this |a_{n,m}| the sign is re-decided in extended precision.
TIE_TOL = 1e-8

# Lower constant of the m ≥ 9 estimate, and the m → ∞ limit of the margin.
CLAIM15_BOUND = (math.pi / 9.0) / (6.0 - (math.pi / 9.0) ** 2)
CLAIM15_LIMIT = 1.0 / math.pi - (SQRT2 - 1.0) / 2.0

RECURSION_TOL = 1e-10


def reference_minimal_m(n: int) -> int:
    """The known thresholds: 9 for n=3, 7 for n=4, 6 for n=5,6, 5 for n ≥ 7."""
    _check_n(n)
    return {3: 9, 4: 7, 5: 6, 6: 6}.get(n, 5)


class CriterionResult(BaseModel):
    """μ_p, μ̂_p and a_{n,m} for one (n, m)."""

    n: int
    m: int
    mu: float
    mu_hat: float
    a_nm: float
    positive: bool


class MinimalMRow(BaseModel):
    """One row of the m_n table."""

    n: int
    m_max: int
    minimal_m: int | None
    expected: int
    a_at_minimal: float | None
    a_below_minimal: float | None
    matches: bool


def _check_n(n: int) -> None:
    if n < 3:
        raise DimensionError("The criterion needs n ≥ 3", {"n": n})


def _check_m(m: int, lowest: int = 1) -> None:
    if m < lowest:
        raise DimensionError(f"m must be at least {lowest}", {"m": m})


def _interaction(p: SpherePoint, q: SpherePoint, n: int) -> float:
    gap = chordal_gap(p, q)
    if gap < 0.5 * SAME_POINT_TOL**2:
        raise SingularityError(
            "Coincident orbit points: (1 − cos d)^{(2−n)/2} is singular",
            {"p": p.coords.tolist(), "q": q.coords.tolist()})
    return float(gap ** ((2.0 - n) / 2.0))


def mu_pair(orbit: SignedOrbit, n: int) -> tuple[float, float]:
    """μ_p over ordered plus pairs i ≠ j, μ̂_p over all plus × minus pairs."""
    _check_n(n)
    if not orbit.is_free:
        raise DimensionError("mu_pair needs a free orbit",
                             {"cardinality": orbit.cardinality})
    plus, minus = orbit.plus_points, orbit.minus_points
    mu = math.fsum(
        _interaction(plus[i], plus[j], n)
        for i in range(len(plus)) for j in range(len(plus)) if i != j
    )
    mu_hat = math.fsum(_interaction(pi, qj, n) for pi in plus for qj in minus)
    return mu, mu_hat


def a_nm(n: int, m: int) -> float:
    """Σ_{j=1}^{m−1} (√2 sin(πj/m))^{−(n−2)} − m."""
    _check_n(n)
    _check_m(m)
    terms = [(SQRT2 * math.sin(math.pi * j / m)) ** (2 - n) for j in range(1, m)]
    return math.fsum(terms) - m


def a_nm_mp(n: int, m: int, dps: int = 50) -> mpmath.mpf:
    """a_{n,m} evaluated with ``dps`` decimal digits."""
    _check_n(n)
    _check_m(m)
    with mpmath.workdps(dps):
        root2 = mpmath.sqrt(2)
        total = mpmath.fsum(
            (root2 * mpmath.sin(mpmath.pi * j / m)) ** (2 - n) for j in range(1, m)
        )
        return +(total - m)


def a_nm_sign(n: int, m: int) -> int:
    """Sign of a_{n,m}, deferring to a_nm_mp inside the tie band."""
    value = a_nm(n, m)
    if abs(value) < TIE_TOL:
        precise = a_nm_mp(n, m)
        logger.debug(f"a_({n},{m}) = {value:.3e} is within the tie band, mp value {precise}")
        return int(mpmath.sign(precise))
    return 1 if value > 0 else -1


def evaluate_criterion(n: int, m: int, base: SpherePoint | None = None) -> CriterionResult:
    """Criterion quantities of the 2m-point configuration through ``base``."""
    orbit = ansatz_orbit(n, m, base)
    mu, mu_hat = mu_pair(orbit, n)
    a = a_nm(n, m) if base is None else (mu - mu_hat) / m
    return CriterionResult(n=n, m=m, mu=mu, mu_hat=mu_hat, a_nm=a, positive=mu - mu_hat > 0)


def minimal_m(n: int, m_max: int) -> int | None:
    """Smallest m ≤ m_max with a_{n,m} > 0, or None."""
    _check_n(n)
    _check_m(m_max, lowest=2)
    for m in range(2, m_max + 1):
        if a_nm_sign(n, m) > 0:
            return m
    return None


def minimal_m_table(n_values: Iterable[int], m_max: int = 30) -> list[MinimalMRow]:
    rows = []
    for n in n_values:
        found = minimal_m(n, m_max)
        expected = reference_minimal_m(n)
        rows.append(MinimalMRow(
            n=n,
            m_max=m_max,
            minimal_m=found,
            expected=expected,
            a_at_minimal=a_nm(n, found) if found is not None else None,
            a_below_minimal=a_nm(n, found - 1) if found is not None else None,
            matches=found == expected,
        ))
        if found != expected:
            logger.warning(f"n={n}: minimal m {found} differs from expected {expected}")
    return rows


def sign_changes(n: int, m_values: Iterable[int]) -> int:
    """Number of sign changes of a_{n,m} along ``m_values``, zero counted as ≤ 0."""
    positive = [a_nm(n, m) > 0 for m in m_values]
    return sum(1 for a, b in zip(positive, positive[1:]) if a != b)


def f_n0(n0: int, x: float) -> float:
    """(2x)^{1/n₀} − √2 sin(πx)."""
    if x < 0:
        raise DimensionError("f_n0 is defined for x ≥ 0", {"x": x})
    if n0 < 1:
        raise DimensionError("n0 must be positive", {"n0": n0})
    return (2.0 * x) ** (1.0 / n0) - SQRT2 * math.sin(math.pi * x)


class PositivityReport(BaseModel):
    n0: int
    x_max: float
    points: int
    min_value: float
    argmin: float
    positive: bool


def f_n0_positivity(n0: int, x_max: float, points: int = 2001) -> PositivityReport:
    """Grid certificate that f_{n₀} > 0 on (0, x_max]."""
    if points < 2:
        raise DimensionError("Need at least two grid points", {"points": points})
    xs = np.linspace(0.0, x_max, points)[1:]
    values = (2.0 * xs) ** (1.0 / n0) - SQRT2 * np.sin(np.pi * xs)
    k = int(np.argmin(values))
    return PositivityReport(
        n0=n0,
        x_max=x_max,
        points=points,
        min_value=float(values[k]),
        argmin=float(xs[k]),
        positive=bool(np.all(values > 0)),
    )


class BoundCertificate(BaseModel):
    """a_{n₀+2,m} ≥ 2(√2 sin(π/m))^{−n₀} − m, positive iff f_{n₀}(1/m) > 0."""

    n0: int
    m: int
    lower_bound: float
    f_value: float
    certified: bool


def f_bound_certificate(n0: int, m: int) -> BoundCertificate:
    """The two-term lower bound for a_{n,m} at n = n₀ + 2.

    For m ≥ 5, √2 sin(π/m) < 1, so the bound only grows with n and a
    positive certificate at n₀ covers every n ≥ n₀ + 2.
    """
    _check_m(m, lowest=2)
    lower = 2.0 * (SQRT2 * math.sin(math.pi / m)) ** (-n0) - m
    fv = f_n0(n0, 1.0 / m)
    return BoundCertificate(n0=n0, m=m, lower_bound=lower, f_value=fv, certified=lower > 0)


def a_nm_upper_bound_small_m(n: int, m: int) -> float:
    """(m−1)(√2 sin(π/m))^{−(n−2)} − m, which is ≤ −1 when 2 ≤ m ≤ 4."""
    _check_n(n)
    _check_m(m, lowest=2)
    return (m - 1) * (SQRT2 * math.sin(math.pi / m)) ** (2 - n) - m


def claim15_margin(m: int) -> float:
    """1/sin(π/(m+1)) − 1/sin(π/m) − (√2−1)/2, positive for every m ≥ 9."""
    _check_m(m, lowest=2)
    return 1.0 / math.sin(math.pi / (m + 1)) - 1.0 / math.sin(math.pi / m) - (SQRT2 - 1.0) / 2.0


def claim15_constants() -> tuple[float, float]:
    return CLAIM15_BOUND, CLAIM15_LIMIT


def a3_recursion_rhs(m: int) -> float:
    """a_{3,m} + √2(½ − √2/2 + 1/sin(π/(m+1)) − 1/sin(π/m))."""
    _check_m(m, lowest=2)
    step = 0.5 - SQRT2 / 2.0 + 1.0 / math.sin(math.pi / (m + 1)) - 1.0 / math.sin(math.pi / m)
    return a_nm(3, m) + SQRT2 * step


def a3_recursion_check(m: int) -> bool:
    """a_{3,m+1} ≥ a3_recursion_rhs(m); equality occurs at small m."""
    lhs = a_nm(3, m + 1)
    rhs = a3_recursion_rhs(m)
    return lhs >= rhs - RECURSION_TOL * (1.0 + abs(rhs))
