"""Finite signed isometry groups of Sⁿ, their orbits and the assumption checks.

A signed group is a finite subgroup Γ ⊂ O(n+1) together with a homomorphism
φ: Γ → {±1}. We keep it as an explicit list of matrices, ordered as

    g₁, …, g_M, γ̂g₁, …, γ̂g_M      with g₁ = 1, φ(g_i) = +1, φ(γ̂) = −1,

so that the orbit of a point splits into plus points p_j = g_j p and minus
points q_j = γ̂ p_j in matching order.

The groups of interest are Γ_m, generated by the diagonal rotations
e^{2πij/m}(z₁, z₂, x) = (e^{2πij/m}z₁, e^{2πij/m}z₂, x) and by
τ(z₁, z₂, x) = (−z̄₂, z̄₁, x), with φ_m = +1 on rotations and φ_m(τ) = −1.
Note τ² = −1 on ℂ², which is a rotation of G_m only when m is even. For odd
m the generated group is Γ_{2m}, of order 4m; `build_gamma_m` returns that
group. The 2m-point configuration used by the energy estimates is produced by
`ansatz_orbit` for every m.
"""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import null_space

from yamabe_nodal.errors import AssumptionViolation, DimensionError
from yamabe_nodal.sphere_geometry import SpherePoint

logger = logging.getLogger(__name__)

ORTHOGONALITY_TOL = 1e-12
MATRIX_MATCH_TOL = 1e-10
MAX_GROUP_ORDER = 1000


@dataclass(frozen=True, eq=False)
class SignedIsometry:
    """An orthogonal matrix γ paired with its sign φ(γ)."""

    matrix: NDArray[np.float64]
    sign: int

    def __post_init__(self) -> None:
        mat = np.asarray(self.matrix, dtype=np.float64)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionError("Isometry matrix must be square", {"shape": mat.shape})
        defect = float(np.max(np.abs(mat.T @ mat - np.eye(mat.shape[0]))))
        if defect > ORTHOGONALITY_TOL * mat.shape[0]:
            raise AssumptionViolation("Matrix is not orthogonal", {"defect": defect})
        if self.sign not in (1, -1):
            raise AssumptionViolation("Sign must be +1 or -1", {"sign": self.sign})
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def compose(self, other: "SignedIsometry") -> "SignedIsometry":
        """self ∘ other, with signs multiplied."""
        return SignedIsometry(self.matrix @ other.matrix, self.sign * other.sign)

    def inverse(self) -> "SignedIsometry":
        return SignedIsometry(self.matrix.T.copy(), self.sign)

    def matches(self, other: "SignedIsometry", tol: float = MATRIX_MATCH_TOL) -> bool:
        return bool(np.max(np.abs(self.matrix - other.matrix)) < tol)


def apply(gamma: SignedIsometry, p: SpherePoint) -> SpherePoint:
    """γp, the matrix-vector product."""
    if gamma.dim != p.coords.size:
        raise DimensionError("Isometry and point dimensions differ",
                             {"isometry_dim": gamma.dim, "point_dim": p.coords.size})
    return SpherePoint(gamma.matrix @ p.coords)


def rotation_matrix(n: int, angle: float) -> NDArray[np.float64]:
    """e^{iθ} acting diagonally on both ℂ factors, identity on ℝ^{n−3}."""
    mat = np.eye(n + 1)
    c, s = math.cos(angle), math.sin(angle)
    for k in (0, 2):
        mat[k:k + 2, k:k + 2] = [[c, -s], [s, c]]
    return mat


def tau_matrix(n: int) -> NDArray[np.float64]:
    """τ(z₁, z₂, x) = (−z̄₂, z̄₁, x) in real coordinates."""
    mat = np.eye(n + 1)
    mat[0:4, 0:4] = [
        [0.0, 0.0, -1.0, 0.0],   # Re z₁' = −Re z₂
        [0.0, 0.0, 0.0, 1.0],    # Im z₁' = +Im z₂
        [1.0, 0.0, 0.0, 0.0],    # Re z₂' = +Re z₁
        [0.0, -1.0, 0.0, 0.0],   # Im z₂' = −Im z₁
    ]
    return mat


def swap_matrix(n: int) -> NDArray[np.float64]:
    """σ(z₁, z₂, x) = (z̄₂, z̄₁, x), an involution exchanging p_j and q_j."""
    mat = np.eye(n + 1)
    mat[0:4, 0:4] = [
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
    ]
    return mat


@dataclass(frozen=True, eq=False)
class SymmetryGroup:
    """A finite signed group, elements ordered plus-part first."""

    n: int
    m: int
    elements: tuple[SignedIsometry, ...]
    name: str = "Γ"

    def __post_init__(self) -> None:
        if not self.elements:
            raise AssumptionViolation("A group needs at least the identity")
        identity = self.elements[0]
        if identity.sign != 1 or not np.allclose(identity.matrix, np.eye(self.n + 1),
                                                  atol=MATRIX_MATCH_TOL):
            raise AssumptionViolation("First element must be the identity with sign +1")
        self.verify_closure()

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def plus_elements(self) -> tuple[SignedIsometry, ...]:
        return tuple(g for g in self.elements if g.sign == 1)

    @property
    def minus_elements(self) -> tuple[SignedIsometry, ...]:
        return tuple(g for g in self.elements if g.sign == -1)

    def index_of(self, gamma: SignedIsometry) -> int | None:
        for i, g in enumerate(self.elements):
            if g.matches(gamma):
                return i
        return None

    def verify_closure(self) -> None:
        """Check closure under composition and inverse, and that φ is a homomorphism."""
        for a in self.elements:
            inv = a.inverse()
            idx = self.index_of(inv)
            if idx is None or self.elements[idx].sign != inv.sign:
                raise AssumptionViolation("Group is not closed under inverses",
                                          {"group": self.name})
            for b in self.elements:
                prod = a.compose(b)
                idx = self.index_of(prod)
                if idx is None:
                    raise AssumptionViolation("Group is not closed under composition",
                                              {"group": self.name, "order": self.order})
                if self.elements[idx].sign != prod.sign:
                    raise AssumptionViolation("Signs do not multiply: φ is not a homomorphism",
                                              {"group": self.name})

    @classmethod
    def generate(
        cls,
        n: int,
        generators: Sequence[SignedIsometry],
        m: int = 0,
        name: str = "Γ",
    ) -> "SymmetryGroup":
        """Close a set of signed generators under composition.

        Elements are returned plus-part first; if a sign −1 element exists the
        minus part is listed as γ̂g₁, …, γ̂g_M for the first such γ̂ found.
        """
        identity = SignedIsometry(np.eye(n + 1), 1)
        found: list[SignedIsometry] = [identity]
        frontier = [identity]
        while frontier:
            next_frontier: list[SignedIsometry] = []
            for g in frontier:
                for gen in generators:
                    cand = gen.compose(g)
                    clash = next((h for h in found if h.matches(cand)), None)
                    if clash is None:
                        found.append(cand)
                        next_frontier.append(cand)
                        if len(found) > MAX_GROUP_ORDER:
                            raise AssumptionViolation("Generated group is too large",
                                                      {"limit": MAX_GROUP_ORDER})
                    elif clash.sign != cand.sign:
                        raise AssumptionViolation(
                            "Generators do not define a sign homomorphism",
                            {"group": name})
            frontier = next_frontier

        plus = [g for g in found if g.sign == 1]
        minus = [g for g in found if g.sign == -1]
        if minus:
            gamma_hat = minus[0]
            minus = [gamma_hat.compose(g) for g in plus]
        return cls(n=n, m=m, elements=tuple(plus + minus), name=name)


def build_gamma_m(n: int, m: int) -> SymmetryGroup:
    """Γ_m = ⟨G_m ∪ {τ}⟩ with φ_m(rotations) = +1 and φ_m(τ) = −1.

    For even m the group has order 2m: g_j = e^{2πij/m} and τg_j. For odd m,
    τ² = e^{iπ} ∉ G_m enlarges the rotation part to G_{2m}, order 4m.
    """
    if n < 3:
        raise DimensionError("Γ_m needs n ≥ 3 for the ℂ×ℂ×ℝ^{n−3} splitting", {"n": n})
    if m < 1:
        raise DimensionError("Γ_m needs m ≥ 1", {"m": m})

    rotations = m if m % 2 == 0 else 2 * m
    if rotations != m:
        logger.info(f"Γ_{m}: τ² = -1 is not in G_{m}, rotation part is G_{rotations}")
    plus = [SignedIsometry(rotation_matrix(n, 2 * math.pi * j / rotations), 1)
            for j in range(rotations)]
    tau = SignedIsometry(tau_matrix(n), -1)
    minus = [tau.compose(g) for g in plus]
    return SymmetryGroup(n=n, m=m, elements=tuple(plus + minus), name=f"Γ_{m}")


def build_swap_group(n: int, m: int) -> SymmetryGroup:
    """⟨e^{2πi/m}, σ⟩ of order 2m, with φ(σ) = −1.

    It permutes the 2m points of `ansatz_orbit` at p = (1,0,0) simply
    transitively for every m and reverses the sign of w_β. It is not used
    for existence (σe^{iθ} has fixed points with isotropy of order 2).
    """
    if n < 3 or m < 1:
        raise DimensionError("Swap group needs n ≥ 3 and m ≥ 1", {"n": n, "m": m})
    plus = [SignedIsometry(rotation_matrix(n, 2 * math.pi * j / m), 1) for j in range(m)]
    swap = SignedIsometry(swap_matrix(n), -1)
    return SymmetryGroup(n=n, m=m, elements=tuple(plus + [swap.compose(g) for g in plus]),
                         name=f"Σ_{m}")


@dataclass(frozen=True)
class SignedOrbit:
    """Plus points p_j and minus points q_j = γ̂p_j of an orbit.

    A fixed point is stored as ``plus_points = (base,)`` with no minus points.
    """

    base: SpherePoint
    plus_points: tuple[SpherePoint, ...]
    minus_points: tuple[SpherePoint, ...] = ()

    @property
    def is_free(self) -> bool:
        return len(self.minus_points) > 0

    @property
    def m(self) -> int:
        return len(self.plus_points)

    @property
    def cardinality(self) -> int:
        return len(self.plus_points) + len(self.minus_points)

    @property
    def n(self) -> int:
        return self.base.n

    def centers(self) -> NDArray[np.float64]:
        """All points as rows, plus points first."""
        return np.array([p.coords for p in self.plus_points + self.minus_points])

    def signs(self) -> NDArray[np.float64]:
        return np.array([1.0] * len(self.plus_points) + [-1.0] * len(self.minus_points))


def orbit(group: SymmetryGroup, p: SpherePoint) -> SignedOrbit:
    """Γp with signs. Its cardinality is 1 or |Γ|; anything between breaks (A1)."""
    images = [apply(g, p) for g in group.elements]
    distinct: list[SpherePoint] = []
    for img in images:
        if not any(img.is_close(d) for d in distinct):
            distinct.append(img)

    if len(distinct) == 1:
        return SignedOrbit(base=p, plus_points=(p,))
    if len(distinct) != group.order:
        raise AssumptionViolation(
            "assumption (A1) violated: orbit has intermediate cardinality",
            {"cardinality": len(distinct), "order": group.order})

    plus = tuple(apply(g, p) for g in group.plus_elements)
    minus = tuple(apply(g, p) for g in group.minus_elements)
    return SignedOrbit(base=p, plus_points=plus, minus_points=minus)


def ansatz_orbit(n: int, m: int, base: SpherePoint | None = None) -> SignedOrbit:
    """The 2m-point configuration p_j = e^{2πij/m}p, q_j = τp_j.

    Equals `orbit(build_gamma_m(n, m), base)` for even m. Defaults to the
    base point p = (1, 0, 0).
    """
    if n < 3 or m < 1:
        raise DimensionError("Configuration needs n ≥ 3 and m ≥ 1", {"n": n, "m": m})
    base = base or SpherePoint.basis(n, 0)
    if base.n != n:
        raise DimensionError("Base point dimension differs from n", {"n": n, "base_n": base.n})
    tau = tau_matrix(n)
    plus = tuple(SpherePoint(rotation_matrix(n, 2 * math.pi * j / m) @ base.coords)
                 for j in range(m))
    minus = tuple(SpherePoint(tau @ p.coords) for p in plus)
    return SignedOrbit(base=base, plus_points=plus, minus_points=minus)


@dataclass
class AssumptionReport:
    """Outcome of the (A0), (A1), (A2) checks with witnesses."""

    A0: bool
    A1: bool
    A2: bool
    a0_witness: SpherePoint | None = None
    a1_sampled_points: int = 0
    a1_structural: bool = False
    a1_counterexample: SpherePoint | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def all_hold(self) -> bool:
        return self.A0 and self.A1 and self.A2


def _isotropy_signs(group: SymmetryGroup, p: SpherePoint) -> list[int]:
    return [g.sign for g in group.elements if apply(g, p).is_close(p)]


def _fixed_subspace(matrix: NDArray[np.float64]) -> NDArray[np.float64]:
    """Basis (columns) of the eigenvalue-1 eigenspace of an orthogonal matrix."""
    return np.asarray(null_space(matrix - np.eye(matrix.shape[0]), rcond=1e-9))


def _special_points(n: int) -> list[SpherePoint]:
    """Points with z₁ = 0, z₂ = 0 or x = 0 patterns, plus generic mixtures."""
    pts: list[SpherePoint] = []
    tails = (np.zeros(n - 3), np.ones(n - 3))
    for z1 in (0j, 1 + 0j, 0.6 + 0.8j):
        for z2 in (0j, 1 + 0j, -0.3 + 0.4j):
            for tail in tails:
                if abs(z1) + abs(z2) + float(np.sum(tail)) > 0:
                    pts.append(SpherePoint.from_complex(z1, z2, tail))
    return pts


def check_assumptions(
    group: SymmetryGroup,
    sample_count: int = 1000,
    seed: int = 0,
) -> AssumptionReport:
    """Verify (A0), (A1) and (A2) for a finite signed group.

    (A1) is decided structurally: every non-identity element must have the
    same fixed subspace as the whole group, so isotropy is either trivial or
    all of Γ. Random and special points are a secondary smoke test.
    """
    n = group.n
    notes: list[str] = []

    a2 = any(g.sign == -1 for g in group.elements)
    if not a2:
        notes.append("φ has no element of sign -1")

    # (A1) structural check
    stacked = np.vstack([g.matrix - np.eye(n + 1) for g in group.elements])
    common_dim = int(null_space(stacked, rcond=1e-9).shape[1])
    structural = all(
        _fixed_subspace(g.matrix).shape[1] == common_dim
        for g in group.elements[1:]
    )

    rng = np.random.default_rng(seed)
    candidates = _special_points(n) + [
        SpherePoint(v) for v in rng.standard_normal((sample_count, n + 1))
    ]
    counterexample = None
    for p in candidates:
        k = len(_isotropy_signs(group, p))
        if k not in (1, group.order):
            counterexample = p
            break
    a1 = structural and counterexample is None
    if not structural:
        notes.append("some element fixes more than the common fixed subspace")

    # (A0): a point whose isotropy lies in ker φ
    witness = None
    for p in [SpherePoint.basis(n, 0)] + candidates:
        if all(s == 1 for s in _isotropy_signs(group, p)):
            witness = p
            break

    logger.debug(f"{group.name}: A0={witness is not None} A1={a1} A2={a2}")
    return AssumptionReport(
        A0=witness is not None,
        A1=a1,
        A2=a2,
        a0_witness=witness,
        a1_sampled_points=len(candidates),
        a1_structural=structural,
        a1_counterexample=counterexample,
        notes=notes,
    )


def is_equivariant(
    group: SymmetryGroup,
    f: Callable[[SpherePoint], float],
    sample_count: int = 200,
    seed: int = 0,
) -> bool:
    """True iff |f(γp) − φ(γ)f(p)| ≤ 1e−9·(1 + |f(p)|) on sampled points."""
    if sample_count < 1:
        raise DimensionError("sample_count must be positive", {"sample_count": sample_count})
    rng = np.random.default_rng(seed)
    for vec in rng.standard_normal((sample_count, group.n + 1)):
        p = SpherePoint(vec)
        fp = f(p)
        for g in group.elements:
            if abs(f(apply(g, p)) - g.sign * fp) > 1e-9 * (1.0 + abs(fp)):
                return False
    return True


def acts_simply_transitively(group: SymmetryGroup, orbit: SignedOrbit) -> bool:
    """True iff ``group`` permutes the signed centers of ``orbit`` simply transitively.

    Each element must map the center set onto itself, carrying signs by φ, and
    the images of the first center must be all centers exactly once.
    """
    centers = orbit.plus_points + orbit.minus_points
    signs = list(orbit.signs())
    if group.order != len(centers):
        return False

    def locate(p: SpherePoint) -> int | None:
        return next((i for i, c in enumerate(centers) if c.is_close(p)), None)

    hits: set[int] = set()
    for g in group.elements:
        for i, c in enumerate(centers):
            j = locate(apply(g, c))
            if j is None or signs[j] != g.sign * signs[i]:
                return False
        first = locate(apply(g, centers[0]))
        assert first is not None
        hits.add(first)
    return len(hits) == len(centers)
