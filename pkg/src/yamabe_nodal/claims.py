"""The check-claims suite: every published constant and bound, recomputed.

Each claim returns a ClaimResult with expected and computed values and the
tolerance used. A claim that raises is recorded as failed, never skipped.
"""

import logging
from collections.abc import Callable

from pydantic import BaseModel

from yamabe_nodal.bubble_ansatz import Bubble, solution_identity_check
from yamabe_nodal.criterion import (
    CLAIM15_BOUND,
    CLAIM15_LIMIT,
    a_nm,
    claim15_margin,
    f_n0_positivity,
    minimal_m_table,
)
from yamabe_nodal.energy import energy_sweep, lemma31_convergence
from yamabe_nodal.errors import YamabeError
from yamabe_nodal.quadrature import QuadratureRule
from yamabe_nodal.sphere_geometry import SpherePoint

logger = logging.getLogger(__name__)


class ClaimResult(BaseModel):
    name: str
    expected: str
    computed: str
    tolerance: float
    passed: bool
    detail: str = ""


def _close(name: str, expected: float, computed: float, tol: float) -> ClaimResult:
    return ClaimResult(
        name=name,
        expected=repr(expected),
        computed=repr(computed),
        tolerance=tol,
        passed=abs(computed - expected) <= tol,
    )


def claim_a56(rule: QuadratureRule) -> ClaimResult:
    return _close("a_5_6", 1.09907, a_nm(5, 6), 1e-4)


def claim_a55(rule: QuadratureRule) -> ClaimResult:
    return _close("a_5_5", -0.69601, a_nm(5, 5), 1e-4)


def claim_a65(rule: QuadratureRule) -> ClaimResult:
    return _close("a_6_5", -0.2, a_nm(6, 5), 1e-10)


def claim_mn_table(rule: QuadratureRule) -> ClaimResult:
    rows = minimal_m_table(range(3, 31), m_max=30)
    computed = [r.minimal_m for r in rows]
    expected = [r.expected for r in rows]
    return ClaimResult(name="mn_table", expected=str(expected), computed=str(computed),
                       tolerance=0.0, passed=computed == expected)


def claim15(rule: QuadratureRule) -> ClaimResult:
    worst = min(claim15_margin(m) for m in range(9, 1001))
    ok = (abs(CLAIM15_BOUND - 0.059383) <= 1e-6 and abs(CLAIM15_LIMIT - 0.111203) <= 1e-6
          and worst > 0)
    return ClaimResult(
        name="claim15",
        expected="0.059383, 0.111203, margins > 0",
        computed=f"{CLAIM15_BOUND!r}, {CLAIM15_LIMIT!r}, min margin {worst!r}",
        tolerance=1e-6,
        passed=ok,
    )


def claim_f_positivity(rule: QuadratureRule) -> ClaimResult:
    reports = [f_n0_positivity(n0, 1.0 / m, points=10_001) for n0, m in ((5, 5), (4, 6), (3, 7))]
    return ClaimResult(
        name="f_positivity",
        expected="f5 > 0 on (0,1/5], f4 > 0 on (0,1/6], f3 > 0 on (0,1/7]",
        computed=", ".join(f"min f{r.n0} = {r.min_value!r}" for r in reports),
        tolerance=0.0,
        passed=all(r.positive for r in reports),
    )


def claim_solution_identity(rule: QuadratureRule) -> ClaimResult:
    cases = [(n, beta, 1e-6) for n in (3, 4, 5) for beta in (1.5, 3.0, 10.0)]
    cases += [(n, 1.01, 1e-4) for n in (3, 4, 5)]
    worst = 0.0
    failed = []
    for n, beta, tol in cases:
        report = solution_identity_check(Bubble(n, SpherePoint.basis(n, 0), beta), rule, tol)
        worst = max(worst, report.mass_rel_error)
        if not report.ok:
            failed.append(f"n={n} β={beta}")
    return ClaimResult(
        name="solution_identity",
        expected="∫u^{2*} = ω_n and ‖u‖² = a_n ω_n",
        computed=f"worst mass rel. error {worst:.3e}",
        tolerance=1e-6,
        passed=not failed,
        detail="; ".join(failed),
    )


def claim_lemma31(rule: QuadratureRule) -> ClaimResult:
    ratios = {}
    for n, gap in ((3, 1e-3), (4, 1e-4), (5, 1e-4)):
        report = lemma31_convergence(n, [1.0 + gap], 0.5, rule)
        ratios[n] = report.rows[0].ratio
    return ClaimResult(
        name="lemma31_ratio",
        expected="ratio within 2% of 1",
        computed=", ".join(f"n={n}: {v:.6f}" for n, v in ratios.items()),
        tolerance=0.02,
        passed=all(abs(v - 1.0) <= 0.02 for v in ratios.values()),
    )


def _certification(n: int, m: int) -> Callable[[QuadratureRule], ClaimResult]:
    def claim(rule: QuadratureRule) -> ClaimResult:
        sweep = energy_sweep(n, m, rule, betas=[1.02, 1.01, 1.005])
        best = min(sweep.reports, key=lambda r: r.energy)
        return ClaimResult(
            name=f"certify_{n}_{m}",
            expected=f"J < 2m c_n = {best.bound!r}",
            computed=f"J = {best.energy!r} at β = {best.beta!r}",
            tolerance=0.0,
            passed=sweep.certified,
            detail=f"margin {best.bound - best.energy!r}",
        )

    claim.__name__ = f"certify_{n}_{m}"
    return claim


CLAIMS: list[Callable[[QuadratureRule], ClaimResult]] = [
    claim_a56,
    claim_a55,
    claim_a65,
    claim_mn_table,
    claim15,
    claim_f_positivity,
    claim_solution_identity,
    claim_lemma31,
    _certification(3, 9),
    _certification(4, 7),
]


def run_claims(rule: QuadratureRule) -> list[ClaimResult]:
    results = []
    for claim in CLAIMS:
        name = claim.__name__
        try:
            result = claim(rule)
        except YamabeError as exc:
            logger.error(f"claim {name} raised: {exc}")
            result = ClaimResult(name=name, expected="no error", computed=type(exc).__name__,
                                 tolerance=0.0, passed=False, detail=str(exc))
        logger.info(f"claim {result.name}: {'pass' if result.passed else 'FAIL'}")
        results.append(result)
    return results
