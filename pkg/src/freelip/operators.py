"""Linearized point maps and injectivity / support-preservation diagnostics.

The linearization of a base-preserving map acts on molecules by pushing
coefficients forward.  Its matrix has a single 1 per column (or a zero
column when the point collapses to the base), so ranks and kernels are
computed exactly regardless of the arithmetic mode.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    BaseNotPreserved,
    DimensionTooLargeForExact,
    NotComposable,
    SolverFailure,
    SpaceMismatch,
    UnknownLabel,
)
from .functions import LipFunction
from .molecule import Molecule, canonicalize, elementary
from .norms import norm_flow
from .numbers import Num
from .space import EXACT, FiniteMetricSpace

#: largest molecule dimension for which the modulus polytope is enumerated
EXACT_MODULUS_DIM_CAP = 8


def spaces_equal(a: FiniteMetricSpace, b: FiniteMetricSpace) -> bool:
    if a is b:
        return True
    if a.labels != b.labels or a.base != b.base:
        return False
    return all(a.d(x, y) == b.d(x, y) for x, y in a.pairs())


class PointMap:
    """Base-point-preserving map between two finite metric spaces."""

    __slots__ = ("domain", "codomain", "assignment")

    def __init__(self, domain: FiniteMetricSpace, codomain: FiniteMetricSpace,
                 assignment: Mapping[str, str]):
        self.domain = domain
        self.codomain = codomain
        self.assignment = dict(assignment)
        for lab in domain.labels:
            if lab not in self.assignment:
                raise UnknownLabel(lab)
            codomain.index(self.assignment[lab])
        if self.assignment[domain.base] != codomain.base:
            raise BaseNotPreserved(
                f"{domain.base!r} must map to {codomain.base!r}")

    def __call__(self, label: str) -> str:
        try:
            return self.assignment[label]
        except KeyError:
            raise UnknownLabel(label) from None

    def __repr__(self) -> str:
        return (f"PointMap({self.domain.name} -> {self.codomain.name}, "
                f"{len(self.assignment)} points)")

    def lip_constant(self) -> Num:
        best: Num = Fraction(0)
        for x, y in self.domain.pairs():
            ratio = self.codomain.d(self(x), self(y)) / self.domain.d(x, y)
            if ratio > best:
                best = ratio
        return best

    def is_injective(self) -> bool:
        return len(set(self.assignment.values())) == len(self.assignment)

    def image_labels(self) -> List[str]:
        seen = []
        for lab in self.domain.labels:
            target = self(lab)
            if target not in seen:
                seen.append(target)
        return seen

    def then(self, g: "PointMap") -> "PointMap":
        """Composition g o self (apply self first)."""
        if not spaces_equal(self.codomain, g.domain):
            raise NotComposable("codomain of the first map must match the "
                                "domain of the second")
        return PointMap(self.domain, g.codomain,
                        {lab: g(self(lab)) for lab in self.domain.labels})

    def to_json_dict(self) -> dict:
        return {"domain": self.domain.name, "codomain": self.codomain.name,
                "assignment": dict(sorted(self.assignment.items()))}

    @classmethod
    def from_json_dict(cls, domain: FiniteMetricSpace,
                       codomain: FiniteMetricSpace, data: Mapping) -> "PointMap":
        return cls(domain, codomain, data["assignment"])


class LinearOperator:
    """Matrix form of a linearized point map on molecule coefficients."""

    def __init__(self, pmap: PointMap):
        self.map = pmap
        self.domain = pmap.domain
        self.codomain = pmap.codomain

    def matrix(self) -> List[List[Fraction]]:
        """Rows: codomain labels minus base; columns: domain labels minus base."""
        rows = self.codomain.nonbase
        row_index = {lab: i for i, lab in enumerate(rows)}
        cols = self.domain.nonbase
        mat = [[Fraction(0)] * len(cols) for _ in rows]
        for j, x in enumerate(cols):
            fx = self.map(x)
            if fx != self.codomain.base:
                mat[row_index[fx]][j] = Fraction(1)
        return mat

    def apply(self, mu: Molecule) -> Molecule:
        """Pushforward sum a_x delta(f(x)), canonicalized over the codomain."""
        if mu.space is not self.domain and not spaces_equal(mu.space,
                                                            self.domain):
            raise SpaceMismatch("molecule is not over the operator's domain")
        return canonicalize(self.codomain,
                            [(self.map(lab), c) for lab, c in mu.terms.items()])

    def rank(self) -> int:
        mat = self.matrix()
        return _rank_and_kernel(mat)[0]

    def kernel_basis(self) -> List[Molecule]:
        mat = self.matrix()
        _, kernel = _rank_and_kernel(mat)
        cols = self.domain.nonbase
        return [canonicalize(self.domain,
                             {cols[i]: v for i, v in enumerate(vec) if v})
                for vec in kernel]

    @property
    def is_injective(self) -> bool:
        return self.rank() == len(self.domain) - 1

    def operator_norm(self) -> Num:
        """Equal to Lip(f); exposed through the elementary-molecule sup."""
        return self.map.lip_constant()


def linearize(pmap: PointMap) -> LinearOperator:
    return LinearOperator(pmap)


def _rank_and_kernel(mat: List[List[Fraction]]):
    """Fraction Gaussian elimination; returns (rank, kernel basis vectors)."""
    if not mat:
        rows, cols = 0, 0
    else:
        rows, cols = len(mat), len(mat[0])
    a = [row[:] for row in mat]
    pivot_cols: List[int] = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        inv = Fraction(1) / a[r][c]
        a[r] = [v * inv for v in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                factor = a[i][c]
                a[i] = [vi - factor * vr for vi, vr in zip(a[i], a[r])]
        pivot_cols.append(c)
        r += 1
        if r == rows:
            break
    free_cols = [c for c in range(cols) if c not in pivot_cols]
    kernel = []
    for fc in free_cols:
        vec = [Fraction(0)] * cols
        vec[fc] = Fraction(1)
        for i, pc in enumerate(pivot_cols):
            vec[pc] = -a[i][fc]
        kernel.append(vec)
    return len(pivot_cols), kernel


def compose_Cf(pmap: PointMap, g: LipFunction) -> LipFunction:
    """Composition operator: pull a codomain potential back through the map."""
    if g.space is not pmap.codomain and not spaces_equal(g.space,
                                                         pmap.codomain):
        raise SpaceMismatch("function is not over the map's codomain")
    return LipFunction(pmap.domain,
                       {lab: g.values[pmap(lab)] for lab in pmap.domain.labels})


# ---------------------------------------------------------------------------
# diagnostics


@dataclass
class SupportReport:
    lhs: frozenset
    rhs: frozenset
    inclusion_holds: bool
    equality_holds: bool


def check_support_preservation(pmap: PointMap, mu: Molecule) -> SupportReport:
    """Compare supp(f_hat mu) with f(supp mu) (closures are trivial here)."""
    image = linearize(pmap).apply(mu)
    lhs = image.support()
    rhs = frozenset(pmap(lab) for lab in mu.support())
    return SupportReport(lhs, rhs, lhs <= rhs, lhs == rhs)


@dataclass
class NonReturningReport:
    rho_sup: Num  # math.inf when every point stays within radius r
    requested: Optional[Tuple[Num, Num]] = None
    satisfied: Optional[bool] = None
    witness: Optional[Tuple[str, Num]] = None  # offending point and distance


def check_nonreturning(pmap: PointMap, x: str, r,
                       requested_rho=None) -> NonReturningReport:
    """Sweep for the non-returning radius at f(x).

    Returns the supremum rho such that every domain point mapping within
    rho of f(x) lies in the r-ball around x; every rho strictly below the
    supremum satisfies the condition.
    """
    dom, cod = pmap.domain, pmap.codomain
    dom.index(x)
    if not r > 0:
        raise SpaceMismatch("radius must be positive")
    fx = pmap(x)
    outside = [z for z in dom.labels if dom.d(x, z) > r]
    if not outside:
        report = NonReturningReport(math.inf)
    else:
        best_z = min(outside, key=lambda z: (float(cod.d(fx, pmap(z))), z))
        report = NonReturningReport(cod.d(fx, pmap(best_z)))
    if requested_rho is not None:
        report.requested = (r, requested_rho)
        offenders = [z for z in outside
                     if cod.d(fx, pmap(z)) <= requested_rho]
        report.satisfied = not offenders
        if offenders:
            z = min(offenders, key=lambda z: (float(cod.d(fx, pmap(z))), z))
            report.witness = (z, cod.d(fx, pmap(z)))
    return report


@dataclass
class BiLipConstants:
    lower: Num  # min pair ratio; 0 when the map collapses a pair
    upper: Num  # Lip(f)
    min_pair: Optional[Tuple[str, str]]
    max_pair: Optional[Tuple[str, str]]


def bilip_constants(pmap: PointMap) -> BiLipConstants:
    """Exact pairwise extrema of the distortion ratios."""
    lower = upper = None
    min_pair = max_pair = None
    for x, y in pmap.domain.pairs():
        ratio = pmap.codomain.d(pmap(x), pmap(y)) / pmap.domain.d(x, y)
        if lower is None or ratio < lower:
            lower, min_pair = ratio, (x, y)
        if upper is None or ratio > upper:
            upper, max_pair = ratio, (x, y)
    if lower is None:  # one-point domain
        lower = upper = Fraction(0)
    return BiLipConstants(lower, upper, min_pair, max_pair)


@dataclass
class ModulusBracket:
    lower: Optional[Num]
    upper: Num
    method: str  # exact-vertex | witness-family

    def __post_init__(self):
        if self.lower is not None and float(self.lower) > float(self.upper) + 1e-12:
            raise SolverFailure("modulus bracket is inverted")


# -- polytope vertex machinery ----------------------------------------------


def _hpoly_vertices(rows: List[List[Num]], rhs: List[Num], exact: bool,
                    tol: float = 1e-7) -> List[List[Num]]:
    """Vertices of {x : rows . x <= rhs} with 0 interior.

    Qhull supplies the combinatorial skeleton; in exact mode every vertex is
    re-derived by solving its tight constraints in rational arithmetic and
    certified feasible before being kept.
    """
    from scipy.spatial import HalfspaceIntersection, QhullError

    a = np.asarray([[float(v) for v in row] for row in rows])
    b = np.asarray([float(v) for v in rhs])
    n = a.shape[1]
    halfspaces = np.hstack([a, -b[:, None]])
    try:
        hull = HalfspaceIntersection(halfspaces, np.zeros(n))
    except QhullError:
        hull = HalfspaceIntersection(halfspaces, np.zeros(n),
                                     qhull_options="QJ")
    candidates = np.unique(np.round(hull.intersections, 9), axis=0)
    results: List[List[Num]] = []
    seen = set()
    for cand in candidates:
        if not np.isfinite(cand).all():
            continue
        resid = a @ cand - b
        scale = np.maximum(1.0, np.abs(b))
        tight = np.nonzero(np.abs(resid) <= tol * scale)[0]
        if len(tight) < n:
            continue
        if exact:
            solved = _solve_tight_exact([rows[i] for i in tight],
                                        [rhs[i] for i in tight], n)
            if solved is None:
                continue
            if not all(_dot(row, solved) <= r for row, r in zip(rows, rhs)):
                continue
            key = tuple(solved)
            if key not in seen:
                seen.add(key)
                results.append(solved)
        else:
            if np.any(resid > 1e-9 * scale):
                continue
            key = tuple(np.round(cand, 9))
            if key not in seen:
                seen.add(key)
                results.append([float(v) for v in cand])
    return results


def _dot(row: Sequence[Num], x: Sequence[Num]) -> Num:
    return sum(r * v for r, v in zip(row, x))


def _solve_tight_exact(rows: List[List[Num]], rhs: List[Num], n: int
                       ) -> Optional[List[Fraction]]:
    """Unique rational solution of a (possibly overdetermined) tight system."""
    aug = [[Fraction(v) for v in row] + [Fraction(r)]
           for row, r in zip(rows, rhs)]
    m = len(aug)
    pivots: List[int] = []
    r = 0
    for c in range(n):
        pivot = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv = Fraction(1) / aug[r][c]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [vi - f * vr for vi, vr in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    if len(pivots) < n:
        return None  # tight rows do not pin a vertex
    for i in range(r, m):
        if aug[i][n] != 0:
            return None  # inconsistent tight set: misdetected
    sol = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        sol[c] = aug[i][n]
    return sol


def lipschitz_ball_vertices(space: FiniteMetricSpace) -> List[Dict[str, Num]]:
    """Extreme potentials of {u : Lip(u) <= 1, u(base) = 0}."""
    nonbase = list(space.nonbase)
    n = len(nonbase)
    if n == 0:
        return []
    rows: List[List[Num]] = []
    rhs: List[Num] = []
    one = Fraction(1) if space.mode == EXACT else 1.0
    for i, x in enumerate(nonbase):
        row = [0 * one] * n
        row[i] = one
        rows.append(row)
        rhs.append(space.d(x, space.base))
        rows.append([-v for v in row])
        rhs.append(space.d(x, space.base))
        for j in range(i + 1, n):
            y = nonbase[j]
            row = [0 * one] * n
            row[i], row[j] = one, -one
            rows.append(row)
            rhs.append(space.d(x, y))
            rows.append([-v for v in row])
            rhs.append(space.d(x, y))
    verts = _hpoly_vertices(rows, rhs, exact=space.mode == EXACT)
    zero = Fraction(0) if space.mode == EXACT else 0.0
    out = []
    for v in verts:
        u = {lab: val for lab, val in zip(nonbase, v)}
        u[space.base] = zero
        out.append(u)
    return out


def embedding_modulus(op: LinearOperator, witnesses: Sequence[Molecule] = (),
                      exact: Optional[bool] = None,
                      dim_cap: int = EXACT_MODULUS_DIM_CAP) -> ModulusBracket:
    """Bracket for inf over nonzero molecules of |f_hat mu| / |mu|.

    Exact value by vertex enumeration of the dual-norm polytope when the
    molecule dimension is small; otherwise an upper bound from elementary
    molecules and any user-supplied witnesses.
    """
    pmap = op.map
    zero = Fraction(0) if op.domain.mode == EXACT else 0.0
    if not op.is_injective:
        return ModulusBracket(zero, zero, "exact-vertex")
    dim = len(op.domain) - 1
    if dim == 0:
        raise SolverFailure("modulus undefined on a one-point space")
    if dim <= dim_cap and exact is not False:
        image_space = op.codomain.restrict(
            [pmap(x) for x in op.domain.nonbase])
        ball = lipschitz_ball_vertices(image_space)
        rows = []
        seen = set()
        one = Fraction(1) if op.domain.mode == EXACT else 1.0
        for u in ball:
            row = [u[pmap(x)] for x in op.domain.nonbase]
            key = tuple(row)
            if key not in seen and any(v != 0 for v in row):
                seen.add(key)
                rows.append(row)
        rhs = [one] * len(rows)
        verts = _hpoly_vertices(rows, rhs, exact=op.domain.mode == EXACT)
        best = None
        for vec in verts:
            mu = canonicalize(op.domain,
                              {x: c for x, c in zip(op.domain.nonbase, vec)
                               if c != 0})
            if mu.is_zero:
                continue
            value, _ = norm_flow(mu, rational=op.domain.mode == EXACT)
            if best is None or value > best:
                best = value
        if best is None or best <= 0:
            raise SolverFailure("vertex enumeration produced no extreme point")
        value = (Fraction(1) / best if isinstance(best, Fraction)
                 else 1.0 / best)
        return ModulusBracket(value, value, "exact-vertex")
    if exact is True:
        raise DimensionTooLargeForExact(
            f"molecule dimension {dim} exceeds the exact cap {dim_cap}")
    upper = bilip_constants(pmap).lower  # min elementary-molecule ratio
    for w in witnesses:
        if w.is_zero:
            continue
        num, _ = norm_flow(linearize(pmap).apply(w))
        den, _ = norm_flow(w)
        ratio = num / den
        if ratio < upper:
            upper = ratio
    return ModulusBracket(None, upper, "witness-family")


# ---------------------------------------------------------------------------
# composition laws


@dataclass
class CompositionLawReport:
    g_injective: bool
    f_hat_onto: bool
    law_a: List[dict] = field(default_factory=list)
    law_b: List[dict] = field(default_factory=list)
    law_c: List[dict] = field(default_factory=list)

    @property
    def all_hold(self) -> bool:
        return all(item["holds"] for item in
                   self.law_a + self.law_b + self.law_c)


def composition_support_laws(f: PointMap, g: PointMap,
                             samples: Sequence[Molecule]
                             ) -> CompositionLawReport:
    """Check the three composition laws for support preservation on samples.

    (a) both preserve => composition preserves; (b) with g injective the
    composition preserving forces f to preserve; (c) the composition
    preserving forces g to preserve the pushed-forward samples.
    """
    if not spaces_equal(f.codomain, g.domain):
        raise NotComposable("maps do not compose")
    gf = f.then(g)
    f_hat = linearize(f)
    report = CompositionLawReport(
        g_injective=g.is_injective(),
        f_hat_onto=linearize(f).rank() == len(f.codomain) - 1,
    )
    for k, mu in enumerate(samples):
        pres_f = check_support_preservation(f, mu).equality_holds
        nu = f_hat.apply(mu)
        pres_g_nu = check_support_preservation(g, nu).equality_holds
        pres_gf = check_support_preservation(gf, mu).equality_holds
        if pres_f and pres_g_nu:
            report.law_a.append({"sample": k, "holds": pres_gf})
        if report.g_injective and pres_gf:
            report.law_b.append({"sample": k, "holds": pres_f})
        if pres_gf:
            report.law_c.append({"sample": k, "holds": pres_g_nu})
    return report
