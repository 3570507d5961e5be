"""Finite pointed metric spaces: validation, transforms, and metric checkers.

A space is immutable after construction.  Exact spaces store Fractions in
tuple-of-tuple matrices; floating spaces store a numpy float64 matrix so
large constructed instances (Cantor dust) stay affordable.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import (
    AlphaOutOfRange,
    InputError,
    NegativeOrZeroOffDiagonal,
    NonzeroDiagonal,
    NotALineSpace,
    NotSymmetric,
    TriangleViolation,
    UnknownBase,
    UnknownLabel,
)
from .numbers import FLOAT_TRIANGLE_SLACK, Num, number_to_json, parse_number, power

EXACT = "exact"
FLOATING = "floating"


class FiniteMetricSpace:
    """Validated pointed metric space over finitely many labelled points."""

    def __init__(self, name: str, labels: Sequence[str], base: str, matrix,
                 mode: str, *, _validated: bool = False):
        if mode not in (EXACT, FLOATING):
            raise InputError(f"unknown arithmetic mode {mode!r}")
        self.name = name
        self.labels = tuple(labels)
        self.base = base
        self.mode = mode
        if mode == FLOATING:
            self._dist = np.asarray(matrix, dtype=float)
        else:
            self._dist = tuple(tuple(Fraction(v) for v in row) for row in matrix)
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self._index) != len(self.labels):
            raise InputError("labels are not distinct")
        if base not in self._index:
            raise UnknownBase(base)
        if not _validated:
            self._check_axioms()

    # -- construction ---------------------------------------------------

    def _check_axioms(self) -> None:
        n = len(self.labels)
        d = self._dist
        if self.mode == FLOATING:
            if d.shape != (n, n):
                raise InputError("matrix is not square of label size")
            if np.any(np.diag(d) != 0.0):
                raise NonzeroDiagonal(self.labels[int(np.nonzero(np.diag(d))[0][0])])
            asym = np.argwhere(d != d.T)
            if asym.size:
                i, j = map(int, asym[0])
                raise NotSymmetric(self.labels[i], self.labels[j])
            off = d + np.eye(n)
            bad = np.argwhere(off <= 0)
            if bad.size:
                i, j = map(int, bad[0])
                raise NegativeOrZeroOffDiagonal(self.labels[i], self.labels[j])
            # d[i,j] <= min_k d[i,k]+d[k,j], within absolute slack
            for k in range(n):
                viol = np.argwhere(d > d[:, k][:, None] + d[k, :][None, :]
                                   + FLOAT_TRIANGLE_SLACK)
                if viol.size:
                    i, j = map(int, viol[0])
                    raise TriangleViolation(self.labels[i], self.labels[j],
                                            self.labels[k])
            return
        if any(len(row) != n for row in d) or len(d) != n:
            raise InputError("matrix is not square of label size")
        for i in range(n):
            if d[i][i] != 0:
                raise NonzeroDiagonal(self.labels[i])
        for i in range(n):
            for j in range(i + 1, n):
                if d[i][j] != d[j][i]:
                    raise NotSymmetric(self.labels[i], self.labels[j])
                if d[i][j] <= 0:
                    raise NegativeOrZeroOffDiagonal(self.labels[i], self.labels[j])
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                dij = d[i][j]
                for k in range(n):
                    if k != i and k != j and dij > d[i][k] + d[k][j]:
                        raise TriangleViolation(self.labels[i], self.labels[j],
                                                self.labels[k])

    # -- basic queries ---------------------------------------------------

    def __len__(self) -> int:
        return len(self.labels)

    def __repr__(self) -> str:
        return f"FiniteMetricSpace({self.name!r}, {len(self)} points, {self.mode})"

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownLabel(label) from None

    def d(self, x: str, y: str) -> Num:
        v = self._dist[self.index(x)][self.index(y)]
        return float(v) if self.mode == FLOATING else v

    def row(self, x: str) -> Sequence[Num]:
        return self._dist[self.index(x)]

    @property
    def nonbase(self) -> tuple:
        return tuple(lab for lab in self.labels if lab != self.base)

    def pairs(self):
        return itertools.combinations(self.labels, 2)

    def diameter(self) -> Num:
        if self.mode == FLOATING:
            return float(self._dist.max()) if len(self) > 1 else 0.0
        return max((self._dist[i][j] for i in range(len(self))
                    for j in range(i + 1, len(self))), default=Fraction(0))

    def ball(self, x: str, r) -> frozenset:
        """Closed ball B(x, r) as a label set."""
        i = self.index(x)
        return frozenset(lab for j, lab in enumerate(self.labels)
                         if self._dist[i][j] <= r)

    def restrict(self, labels: Iterable[str], name: Optional[str] = None
                 ) -> "FiniteMetricSpace":
        """Subspace over ``labels`` plus the base point (always kept)."""
        keep = []
        seen = set()
        for lab in list(labels) + [self.base]:
            if lab not in seen:
                self.index(lab)
                seen.add(lab)
                keep.append(lab)
        idx = [self.index(lab) for lab in keep]
        if self.mode == FLOATING:
            sub = self._dist[np.ix_(idx, idx)]
        else:
            sub = [[self._dist[i][j] for j in idx] for i in idx]
        return FiniteMetricSpace(name or f"{self.name}|sub", keep, self.base,
                                 sub, self.mode, _validated=True)

    # -- serialization ---------------------------------------------------

    def to_json_dict(self) -> dict:
        exact = self.mode == EXACT
        matrix = [[number_to_json(v, exact) for v in row] for row in
                  (self._dist if exact else self._dist.tolist())]
        return {"name": self.name, "base": self.base,
                "points": list(self.labels), "matrix": matrix}

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "FiniteMetricSpace":
        try:
            name = data["name"]
            base = data["base"]
            points = list(data["points"])
            raw = data["matrix"]
        except (KeyError, TypeError) as exc:
            raise InputError(f"space JSON missing field: {exc}") from exc
        values = [[parse_number(v) for v in row] for row in raw]
        floats = any(isinstance(v, float) for row in values for v in row)
        mode = FLOATING if floats else EXACT
        return validate_space(name, points, base, values, mode=mode)


def validate_space(name: str, labels: Sequence[str], base: str, matrix,
                   mode: Optional[str] = None) -> FiniteMetricSpace:
    """Validate a labelled matrix into a space, or raise the first violated
    axiom with its witnessing points."""
    if mode is None:
        flat = (v for row in matrix for v in row)
        mode = FLOATING if any(isinstance(v, float) for v in flat) else EXACT
    return FiniteMetricSpace(name, labels, base, matrix, mode)


def snowflake(space: FiniteMetricSpace, alpha) -> FiniteMetricSpace:
    """Replace d by d**alpha, 0 < alpha <= 1 (still a metric).

    Exact spaces stay exact only if every powered distance is rational;
    otherwise the result degrades to floating mode.
    """
    alpha = Fraction(alpha) if not isinstance(alpha, float) else alpha
    if not 0 < alpha <= 1:
        raise AlphaOutOfRange(f"alpha={alpha} outside (0, 1]")
    if alpha == 1:
        return space
    n = len(space)
    if space.mode == FLOATING or isinstance(alpha, float):
        mat = np.asarray(space._dist, dtype=float) ** float(alpha)
        return FiniteMetricSpace(f"{space.name}^{alpha}", space.labels,
                                 space.base, mat, FLOATING, _validated=True)
    rows = [[power(space._dist[i][j], alpha) for j in range(n)] for i in range(n)]
    exact = all(isinstance(v, Fraction) for row in rows for v in row)
    mode = EXACT if exact else FLOATING
    if not exact:
        rows = [[float(v) for v in row] for row in rows]
    return FiniteMetricSpace(f"{space.name}^{alpha}", space.labels, space.base,
                             rows, mode, _validated=True)


def truncate_metric(space: FiniteMetricSpace) -> FiniteMetricSpace:
    """min(1, d): the bounded companion metric.  Idempotent."""
    one = 1.0 if space.mode == FLOATING else Fraction(1)
    if space.mode == FLOATING:
        mat = np.minimum(space._dist, 1.0)
    else:
        mat = [[min(one, v) for v in row] for row in space._dist]
    return FiniteMetricSpace(f"{space.name}|trunc", space.labels, space.base,
                             mat, space.mode, _validated=True)


def product_space(m1: FiniteMetricSpace, m2: FiniteMetricSpace, p) -> FiniteMetricSpace:
    """Product with sum (p=1) or max (p=inf) metric; base is (base, base).

    Labels are "a|b".  The result is floating if either factor is.
    """
    if p not in (1, "inf", math.inf):
        raise InputError("p must be 1 or inf")
    take_max = p != 1
    labels = [f"{a}|{b}" for a in m1.labels for b in m2.labels]
    base = f"{m1.base}|{m2.base}"
    if m1.mode == FLOATING or m2.mode == FLOATING:
        d1 = np.asarray(m1._dist, dtype=float)
        d2 = np.asarray(m2._dist, dtype=float)
        n1, n2 = len(m1), len(m2)
        # broadcast to ((a,b),(c,e)) layout without python loops
        big1 = np.repeat(np.repeat(d1, n2, axis=0), n2, axis=1)
        big2 = np.tile(d2, (n1, n1))
        mat = np.maximum(big1, big2) if take_max else big1 + big2
        mode = FLOATING
    else:
        n2 = len(m2)
        mat = []
        for i1, a in enumerate(m1.labels):
            for i2, b in enumerate(m2.labels):
                row = []
                r1, r2 = m1._dist[i1], m2._dist[i2]
                for j1 in range(len(m1)):
                    for j2 in range(n2):
                        row.append(max(r1[j1], r2[j2]) if take_max
                                   else r1[j1] + r2[j2])
                mat.append(row)
        mode = EXACT
    pname = "inf" if take_max else "1"
    return FiniteMetricSpace(f"({m1.name}x{m2.name})_l{pname}", labels, base,
                             mat, mode, _validated=True)


def distance_set_measure(space: FiniteMetricSpace, x: str, eps) -> Num:
    """Lebesgue measure of the eps-fattened distance set from x.

    Exact interval-union sweep of U_y [d(x,y)-eps, d(x,y)+eps] over the
    other points y, clipped to [0, inf).
    """
    if not eps > 0:
        raise InputError("eps must be positive")
    xi = space.index(x)
    row = [v for j, v in enumerate(space.row(x)) if j != xi]
    zero = Fraction(0) if space.mode == EXACT else 0.0
    if space.mode == EXACT:
        eps = Fraction(eps)
    intervals = sorted((max(zero, v - eps), v + eps) for v in row)
    total = zero
    cur_l = cur_r = None
    for lo, hi in intervals:
        if cur_l is None:
            cur_l, cur_r = lo, hi
        elif lo <= cur_r:
            cur_r = max(cur_r, hi)
        else:
            total += cur_r - cur_l
            cur_l, cur_r = lo, hi
    if cur_l is not None:
        total += cur_r - cur_l
    return total


# -- cover-condition checkers ----------------------------------------------

EXHAUSTIVE_COVER_LIMIT = 12


@dataclass
class CoverVerdict:
    satisfied: bool
    conclusive: bool
    variant: str
    r: Optional[Num] = None
    blocks: Optional[list] = None  # ball centers (b) or label-sets (b')
    detail: str = ""


def _disjoint(sets: Sequence[frozenset]) -> bool:
    seen: set = set()
    for s in sets:
        if seen & s:
            return False
        seen |= s
    return True


def _min_ball_cover(space: FiniteMetricSpace, r, rho) -> Optional[list]:
    """Fewest centers whose r-balls cover M with disjoint rho*r-balls."""
    labels = space.labels
    small = {c: space.ball(c, r) for c in labels}
    big = {c: space.ball(c, rho * r) for c in labels}
    best: Optional[list] = None

    def extend(chosen: list, covered: frozenset, blocked: frozenset):
        nonlocal best
        if best is not None and len(chosen) >= len(best):
            return
        missing = next((lab for lab in labels if lab not in covered), None)
        if missing is None:
            best = list(chosen)
            return
        for c in labels:
            if missing in small[c] and not (big[c] & blocked):
                extend(chosen + [c], covered | small[c], blocked | big[c])

    extend([], frozenset(), frozenset())
    return best


def _min_partition_cover(space: FiniteMetricSpace, eps, rho) -> Optional[list]:
    """Fewest-block partition into sets of diameter <= eps whose
    rho*r-enlargements (r = max block diameter) are pairwise disjoint."""
    labels = list(space.labels)
    best: Optional[list] = None

    def diam_ok(block: list, lab: str) -> bool:
        return all(space.d(lab, other) <= eps for other in block)

    def assign(i: int, blocks: list):
        nonlocal best
        if best is not None and len(blocks) >= len(best):
            return
        if i == len(labels):
            r = max((space.d(a, b) for blk in blocks
                     for a, b in itertools.combinations(blk, 2)),
                    default=Fraction(0) if space.mode == EXACT else 0.0)
            enlarged = [frozenset(lab for lab in labels
                                  if min(space.d(lab, m) for m in blk) <= rho * r)
                        for blk in blocks]
            if _disjoint(enlarged):
                if best is None or len(blocks) < len(best):
                    best = [list(blk) for blk in blocks]
            return
        lab = labels[i]
        for blk in blocks:
            if diam_ok(blk, lab):
                blk.append(lab)
                assign(i + 1, blocks)
                blk.pop()
        blocks.append([lab])
        assign(i + 1, blocks)
        blocks.pop()

    assign(0, [])
    return best


def _greedy_growth_blocks(space: FiniteMetricSpace, eps) -> list:
    """Grow blocks nearest-first under the diameter cap (greedy path).

    Visits points by distance from the base and keeps absorbing the nearest
    unassigned point while the block diameter stays within eps.
    """
    order = sorted(space.labels,
                   key=lambda lab: (float(space.d(space.base, lab)), lab))
    unassigned = list(order)
    blocks = []
    while unassigned:
        seed = unassigned.pop(0)
        block = [seed]
        while True:
            best = None
            best_d = None
            for cand in unassigned:
                if all(space.d(cand, m) <= eps for m in block):
                    dmin = min(float(space.d(cand, m)) for m in block)
                    if best is None or dmin < best_d:
                        best, best_d = cand, dmin
            if best is None:
                break
            block.append(best)
            unassigned.remove(best)
        blocks.append(block)
    return blocks


def check_cover_condition(space: FiniteMetricSpace, eps, rho,
                          variant: str) -> CoverVerdict:
    """Finite checker for the ball-cover (b) and set-cover (b') conditions.

    Exhaustive (conclusive) for at most 12 points; beyond that a greedy
    cover is attempted and negatives are flagged inconclusive.  Positive
    verdicts are always certified by direct verification of the cover.
    """
    if variant not in ("b", "b'"):
        raise InputError("variant must be 'b' or \"b'\"")
    if not (eps > 0 and rho > 0):
        raise InputError("eps and rho must be positive")
    if space.mode == EXACT:
        eps, rho = Fraction(eps), Fraction(rho)
    n = len(space)
    exhaustive = n <= EXHAUSTIVE_COVER_LIMIT

    if variant == "b":
        dists = sorted({space.d(a, b) for a, b in space.pairs()})
        radii = [r for r in dists if r <= eps] + [eps]
        if exhaustive:
            zero = Fraction(0) if space.mode == EXACT else 0.0
            radii = [zero] + radii
            # larger radii first: fewer centers make a more telling witness
            for r in reversed(radii):
                centers = _min_ball_cover(space, r, rho)
                if centers is not None:
                    return CoverVerdict(True, True, variant, r=r, blocks=centers)
            return CoverVerdict(False, True, variant,
                                detail=f"no cover over {len(radii)} radii")
        for r in reversed(radii):
            centers = []
            covered: set = set()
            blocked: set = set()
            for c in space.labels:
                if c in covered:
                    continue
                big = space.ball(c, rho * r)
                if big & blocked:
                    continue
                centers.append(c)
                covered |= space.ball(c, r)
                blocked |= big
            if covered == set(space.labels):
                return CoverVerdict(True, True, variant, r=r, blocks=centers)
        return CoverVerdict(False, False, variant,
                            detail="greedy found no cover (inconclusive)")

    # variant b'
    if exhaustive:
        blocks = _min_partition_cover(space, eps, rho)
        if blocks is not None:
            r = max((space.d(a, b) for blk in blocks
                     for a, b in itertools.combinations(blk, 2)),
                    default=Fraction(0) if space.mode == EXACT else 0.0)
            return CoverVerdict(True, True, variant, r=r, blocks=blocks)
        return CoverVerdict(False, True, variant, detail="no partition works")
    for blocks in (_greedy_growth_blocks(space, eps),
                   [[lab] for lab in space.labels]):
        diams = [max((space.d(a, b) for a, b in itertools.combinations(blk, 2)),
                     default=Fraction(0) if space.mode == EXACT else 0.0)
                 for blk in blocks]
        if any(dm > eps for dm in diams):
            continue
        r = max(diams) if diams else eps
        enlarged = [frozenset(lab for lab in space.labels
                              if min(space.d(lab, m) for m in blk) <= rho * r)
                    for blk in blocks]
        if _disjoint(enlarged):
            return CoverVerdict(True, True, variant, r=r,
                                blocks=[list(b) for b in blocks])
    return CoverVerdict(False, False, variant,
                        detail="greedy growth found no cover (inconclusive)")


# -- generators --------------------------------------------------------------


def line_space(name: str, positions: Mapping[str, Num], base: str
               ) -> FiniteMetricSpace:
    """Space of real positions with the absolute-value metric.

    The base must sit at position 0; positions must be distinct.
    """
    if base not in positions:
        raise UnknownBase(base)
    if positions[base] != 0:
        raise NotALineSpace("base must be at position 0")
    labels = list(positions)
    vals = [positions[lab] for lab in labels]
    if len(set(vals)) != len(vals):
        raise InputError("positions are not distinct")
    exact = all(isinstance(v, (Fraction, int)) for v in vals)
    if exact:
        mat = [[abs(Fraction(a) - Fraction(b)) for b in vals] for a in vals]
        mode = EXACT
    else:
        arr = np.asarray([float(v) for v in vals])
        mat = np.abs(arr[:, None] - arr[None, :])
        mode = FLOATING
    return FiniteMetricSpace(name, labels, base, mat, mode, _validated=True)


def infer_line_positions(space: FiniteMetricSpace) -> dict:
    """Recover real positions realizing the metric, base at 0.

    Raises NotALineSpace when the metric is not a line metric.  The first
    non-base point is placed on the positive axis (the reflection is the
    only other solution).
    """
    tol = 0.0 if space.mode == EXACT else 1e-9
    order = sorted(space.nonbase, key=lambda lab: float(space.d(space.base, lab)))
    pos = {space.base: Fraction(0) if space.mode == EXACT else 0.0}
    for lab in order:
        d0 = space.d(space.base, lab)
        placed = None
        for cand in (d0, -d0):
            ok = True
            for other, p in pos.items():
                want = space.d(lab, other)
                if abs(abs(cand - p) - want) > tol * max(1.0, abs(float(want))):
                    ok = False
                    break
            if ok:
                placed = cand
                break
        if placed is None:
            raise NotALineSpace(f"point {lab!r} does not embed on the line")
        pos[lab] = placed
    return pos


def random_space(seed: int, n: int, generator: str = "euclidean2d"
                 ) -> FiniteMetricSpace:
    """Deterministic random space.

    ``euclidean2d``: planar points in the unit square (floating mode).
    ``shortestpath``: random symmetric rational matrix repaired by
    all-pairs shortest-path closure (exact mode).
    """
    if n < 2:
        raise InputError("need n >= 2")
    rng = random.Random(seed)
    labels = [f"p{i}" for i in range(n)]
    if generator == "euclidean2d":
        pts = []
        while len(pts) < n:
            cand = (rng.random(), rng.random())
            if all(math.dist(cand, q) > 1e-6 for q in pts):
                pts.append(cand)
        mat = [[math.dist(pts[i], pts[j]) for j in range(n)] for i in range(n)]
        return FiniteMetricSpace(f"rand-euclidean2d-{seed}-{n}", labels,
                                 labels[0], mat, FLOATING, _validated=True)
    if generator == "shortestpath":
        mat = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                mat[i][j] = mat[j][i] = Fraction(rng.randint(2, 96), 16)
        # Floyd-Warshall closure keeps symmetry and forces the triangle
        # inequality; entries stay positive because weights are positive.
        for k in range(n):
            rowk = mat[k]
            for i in range(n):
                dik = mat[i][k]
                rowi = mat[i]
                for j in range(n):
                    alt = dik + rowk[j]
                    if alt < rowi[j]:
                        rowi[j] = alt
        return FiniteMetricSpace(f"rand-shortestpath-{seed}-{n}", labels,
                                 labels[0], mat, EXACT, _validated=True)
    raise InputError(f"unknown generator {generator!r}")
