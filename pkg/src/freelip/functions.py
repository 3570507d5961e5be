"""Real-valued Lipschitz machinery on finite spaces.

Covers constants and extensions (McShane-Whitney), plateau weights,
moduli with inf-convolution, the separation family built from a modulus,
locally constant line approximants, and pointwise weighting operators.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import (
    ModuliHypothesisViolated,
    NotMonotone,
    OverlappingIntervals,
    PartialConstantExceedsL,
    SpaceMismatch,
    UnknownLabel,
)
from .molecule import Molecule, pair
from .numbers import Num, number_to_json, parse_number, power
from .space import EXACT, FiniteMetricSpace

if TYPE_CHECKING:  # only for annotations; operators.py imports this module
    from .operators import PointMap


class LipFunction:
    """Base-point-vanishing real function with computable Lipschitz constant."""

    __slots__ = ("space", "values")

    def __init__(self, space: FiniteMetricSpace, values: Mapping[str, Num]):
        if values.get(space.base, 0) != 0:
            raise SpaceMismatch("Lip_0 functions must vanish at the base point")
        self.space = space
        self.values = dict(values)
        for lab in space.labels:
            self.values.setdefault(lab, 0)
        for lab in values:
            space.index(lab)

    def __call__(self, label: str) -> Num:
        if label not in self.values:
            raise UnknownLabel(label)
        return self.values[label]

    def lip_constant(self) -> Num:
        return lip_constant(self)

    def pair(self, mu: Molecule) -> Num:
        if mu.space.labels != self.space.labels and not set(
                mu.terms) <= set(self.values):
            raise SpaceMismatch("function and molecule live over different spaces")
        return pair(self.values, mu)

    def to_json_dict(self) -> dict:
        exact = self.space.mode == EXACT and all(
            isinstance(v, (Fraction, int)) for v in self.values.values())
        return {"space": self.space.name,
                "values": {lab: number_to_json(
                    Fraction(v) if exact else v, exact)
                    for lab, v in sorted(self.values.items())}}

    @classmethod
    def from_json_dict(cls, space: FiniteMetricSpace, data: Mapping
                       ) -> "LipFunction":
        return cls(space, {lab: parse_number(v)
                           for lab, v in data["values"].items()})


@dataclass
class Weight:
    """[0, 1]-valued Lipschitz weight; the base-zero convention is lifted."""

    space: FiniteMetricSpace
    values: Dict[str, Num]

    def __call__(self, label: str) -> Num:
        return self.values[label]

    def lip_constant(self) -> Num:
        return _lip_constant_of(self.space, self.values)

    def sup_norm(self) -> Num:
        return max(abs(v) for v in self.values.values())

    def support(self) -> frozenset:
        return frozenset(lab for lab, v in self.values.items() if v != 0)


def _lip_constant_of(space: FiniteMetricSpace, values: Mapping[str, Num]) -> Num:
    best: Num = Fraction(0) if space.mode == EXACT else 0.0
    labels = list(values)
    for i, a in enumerate(labels):
        va = values[a]
        for b in labels[i + 1:]:
            slope = abs(va - values[b]) / space.d(a, b)
            if slope > best:
                best = slope
    return best


def lip_constant(f: LipFunction) -> Num:
    """Exact maximum slope over all pairs; 0 for the zero function."""
    return _lip_constant_of(f.space, f.values)


def mcshane_extend(space: FiniteMetricSpace, partial: Mapping[str, Num],
                   lip_bound) -> LipFunction:
    """Largest L-Lipschitz extension: z -> min_y partial(y) + L d(z, y).

    The partial data must contain the base with value 0 and already be
    L-Lipschitz; the extension then restricts exactly and keeps the bound.
    """
    if space.base not in partial or partial[space.base] != 0:
        raise SpaceMismatch("partial data must fix 0 at the base point")
    known = list(partial)
    for i, a in enumerate(known):
        for b in known[i + 1:]:
            gap = abs(partial[a] - partial[b])
            if gap > lip_bound * space.d(a, b):
                raise PartialConstantExceedsL(
                    (a, b), gap / space.d(a, b), lip_bound)
    values = {}
    for z in space.labels:
        if z in partial:
            values[z] = partial[z]
        else:
            values[z] = min(partial[y] + lip_bound * space.d(z, y)
                            for y in known)
    return LipFunction(space, values)


def plateau(space: FiniteMetricSpace, x: str, r) -> Weight:
    """Weight equal to 1 on B(x, r), 0 off B(x, 2r), slopes at most 1/r.

    Built the normative way: extend the two-level partial function at
    constant 1/r, then clamp into [0, 1].  Feasibility is automatic since
    the two level sets are more than r apart.
    """
    if not r > 0:
        raise SpaceMismatch("plateau radius must be positive")
    if space.mode == EXACT:
        r = Fraction(r)
    one = Fraction(1) if space.mode == EXACT else 1.0
    inner = space.ball(x, r)
    outer = set(space.labels) - set(space.ball(x, 2 * r))
    partial = {lab: one for lab in inner}
    partial.update({lab: 0 * one for lab in outer})
    inv_r = one / r
    values = {}
    for z in space.labels:
        if z in partial:
            values[z] = partial[z]
        else:
            values[z] = min(partial[y] + inv_r * space.d(z, y)
                            for y in partial)
    clamped = {z: max(0 * one, min(v, one)) for z, v in values.items()}
    return Weight(space, clamped)


def weighting_operator(weight: Weight, g: LipFunction) -> LipFunction:
    """Pointwise product g * weight; vanishes at the base with g."""
    if weight.space is not g.space:
        raise SpaceMismatch("weight and function live over different spaces")
    return LipFunction(g.space, {lab: g.values[lab] * weight.values[lab]
                                 for lab in g.space.labels})


def weighting_norm_bound(weight: Weight) -> Num:
    """sup|w| + sup_{x in supp w} d(0, x) * Lip(w): the multiplication bound."""
    space = weight.space
    sup_d = max((space.d(space.base, lab) for lab in weight.support()),
                default=0)
    return weight.sup_norm() + sup_d * weight.lip_constant()


# ---------------------------------------------------------------------------
# moduli


class ModulusFunction:
    """Nondecreasing modulus on [0, inf) with w(0) = 0.

    Two representations: the closed form t**alpha (optionally capped by an
    n-Lipschitz majorant after inf-convolution) and a continuous piecewise
    linear function given by breakpoints and values.  ``c1`` is the
    subadditivity constant carried with the modulus.
    """

    def __init__(self, kind: str, *, alpha: Optional[Fraction] = None,
                 cap_n: Optional[int] = None,
                 breakpoints: Optional[Sequence[Num]] = None,
                 values: Optional[Sequence[Num]] = None,
                 c1: Num = 1, tail_slope: Optional[Num] = None):
        if kind not in ("power", "pwl"):
            raise NotMonotone(f"unknown modulus kind {kind!r}")
        self.kind = kind
        self.c1 = c1
        self.left_continuous = True
        if kind == "power":
            alpha = Fraction(alpha)
            if not 0 < alpha <= 1:
                raise NotMonotone("power modulus needs alpha in (0, 1]")
            self.alpha = alpha
            self.cap_n = cap_n
        else:
            bp = [Fraction(b) if not isinstance(b, float) else b
                  for b in breakpoints]
            vv = [Fraction(v) if not isinstance(v, float) else v
                  for v in values]
            if len(bp) != len(vv) or not bp or bp[0] != 0 or vv[0] != 0:
                raise NotMonotone("pwl modulus needs matching lists from (0, 0)")
            if any(bp[i] >= bp[i + 1] for i in range(len(bp) - 1)):
                raise NotMonotone("pwl breakpoints must increase")
            if any(vv[i] > vv[i + 1] for i in range(len(vv) - 1)):
                raise NotMonotone("pwl modulus must be nondecreasing")
            self.breakpoints = bp
            self.values = vv
            if tail_slope is None:
                tail_slope = ((vv[-1] - vv[-2]) / (bp[-1] - bp[-2])
                              if len(bp) >= 2 else Fraction(0))
            if tail_slope < 0:
                raise NotMonotone("tail slope must be nonnegative")
            self.tail_slope = tail_slope

    @classmethod
    def power(cls, alpha, c1: Num = 1) -> "ModulusFunction":
        return cls("power", alpha=Fraction(alpha), c1=c1)

    @classmethod
    def piecewise_linear(cls, breakpoints, values, c1: Num = 1,
                         tail_slope: Optional[Num] = None) -> "ModulusFunction":
        return cls("pwl", breakpoints=breakpoints, values=values, c1=c1,
                   tail_slope=tail_slope)

    def __call__(self, t: Num) -> Num:
        if t < 0:
            raise NotMonotone("modulus argument must be nonnegative")
        if self.kind == "power":
            val = power(t, self.alpha) if not isinstance(t, float) \
                else float(t) ** float(self.alpha)
            if self.cap_n is not None:
                cap = self.cap_n * t
                val = cap if cap < val else val
            return val
        bp, vv = self.breakpoints, self.values
        if t >= bp[-1]:
            return vv[-1] + self.tail_slope * (t - bp[-1])
        lo = 0
        for i in range(len(bp) - 1):
            if bp[i] <= t <= bp[i + 1]:
                lo = i
                break
        slope = (vv[lo + 1] - vv[lo]) / (bp[lo + 1] - bp[lo])
        return vv[lo] + slope * (t - bp[lo])

    def subadditivity_defect(self, samples: Sequence[Num]) -> Num:
        """max over sampled (a, b) of w(a+b) - w(a) - c1*w(b); <= 0 when the
        declared constant is honest on the sample."""
        worst = None
        for a in samples:
            for b in samples:
                gap = self(a + b) - self(a) - self.c1 * self(b)
                if worst is None or gap > worst:
                    worst = gap
        return worst

    def to_json_dict(self) -> dict:
        if self.kind == "power":
            return {"kind": "power", "alpha": str(self.alpha)}
        return {"kind": "pwl",
                "breakpoints": [number_to_json(b, not isinstance(b, float))
                                for b in self.breakpoints],
                "values": [number_to_json(v, not isinstance(v, float))
                           for v in self.values]}

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "ModulusFunction":
        if data["kind"] == "power":
            return cls.power(Fraction(data["alpha"]))
        return cls.piecewise_linear(
            [parse_number(b) for b in data["breakpoints"]],
            [parse_number(v) for v in data["values"]])


def inf_convolve(omega: ModulusFunction, n: int) -> ModulusFunction:
    """Inf-convolution with n*Id: the largest n-Lipschitz minorant of omega.

    For a piecewise-linear modulus the infimum is attained at a breakpoint
    or at the argument itself, so the result is again piecewise linear and
    exact.  For the concave closed form t**alpha it reduces to
    min(omega(t), n t).
    """
    if n <= 0:
        raise NotMonotone("need n >= 1")
    if omega.kind == "power":
        # t**alpha is concave, so the largest n-Lipschitz minorant is the
        # pointwise min with the ray of slope n
        return ModulusFunction("power", alpha=omega.alpha, cap_n=n,
                               c1=omega.c1)
    bp, vv = omega.breakpoints, omega.values
    # best ray through an earlier breakpoint: slope n, minimal intercept
    new_bp: List[Num] = []
    new_vv: List[Num] = []

    def emit(t, v):
        if new_bp and new_bp[-1] == t:
            return
        new_bp.append(t)
        new_vv.append(v)

    best_icpt = vv[0] - n * bp[0]  # = 0 at the origin
    emit(bp[0], vv[0])
    for i in range(len(bp) - 1):
        t0, t1 = bp[i], bp[i + 1]
        v0, v1 = vv[i], vv[i + 1]
        seg_slope = (v1 - v0) / (t1 - t0)
        # lower envelope of omega's segment and the ray n*t + best_icpt
        ray0 = n * t0 + best_icpt
        ray1 = n * t1 + best_icpt
        if seg_slope == n or (ray0 >= v0 and ray1 >= v1):
            emit(t1, min(v1, ray1))
        elif ray0 <= v0 and ray1 <= v1:
            emit(t1, ray1)
        else:
            cross = (best_icpt - (v0 - seg_slope * t0)) / (seg_slope - n)
            cv = n * cross + best_icpt
            emit(cross, cv)
            emit(t1, min(v1, ray1))
        cand = vv[i + 1] - n * bp[i + 1]
        if cand < best_icpt:
            best_icpt = cand
    # beyond the last breakpoint the minorant follows min of omega's tail
    # line and the best slope-n ray; both start from the same point there
    sigma = omega.tail_slope
    v_last, t_last = vv[-1], bp[-1]
    e_last = new_vv[-1]
    if sigma >= n:
        tail = n
    elif v_last == e_last:
        tail = sigma
    else:
        # ray is below omega's tail line until they cross; emit the crossing
        cross = (v_last - sigma * t_last - best_icpt) / (n - sigma)
        if cross > t_last:
            emit(cross, best_icpt + n * cross)
        tail = sigma
    return ModulusFunction.piecewise_linear(new_bp, new_vv, c1=omega.c1,
                                            tail_slope=tail)


def separation_family(f: "PointMap", omega: ModulusFunction, n: int, y: str,
                      c2: Optional[Num] = None) -> LipFunction:
    """The n-th separating function g_n built from the modulus.

    Validates the two-sided modulus inequality
    ``c2 * w(d(f(x), f(x'))) <= d(x, x') <= w(d(f(x), f(x')))`` on all pairs
    (c2 is computed as the best constant when not supplied), then returns
    ``g_n(z) = w_n(d(z, f(y))) - w_n(d(f(y), 0))`` on the codomain.
    """
    dom, cod = f.domain, f.codomain
    dom.index(y)
    tol = 0 if dom.mode == EXACT and cod.mode == EXACT else 1e-9
    ratios = []
    for a, b in dom.pairs():
        dxy = dom.d(a, b)
        wfd = omega(cod.d(f(a), f(b)))
        if float(dxy) > float(wfd) * (1 + tol) + tol * 1e-3:
            raise ModuliHypothesisViolated((a, b), f"d={dxy} > w(d(f,f))={wfd}")
        ratios.append((dxy, wfd))
    if c2 is None:
        c2 = min((d / w for d, w in ratios if w != 0), default=1)
    else:
        for (a, b), (d, w) in zip(dom.pairs(), ratios):
            if float(c2 * w) > float(d) * (1 + tol) + tol * 1e-3:
                raise ModuliHypothesisViolated((a, b),
                                               f"c2*w = {c2 * w} > d = {d}")
    if not c2 > 0:
        raise ModuliHypothesisViolated(None, "no positive c2 exists")
    omega_n = inf_convolve(omega, n)
    fy = f(y)
    offset = omega_n(cod.d(fy, cod.base))
    values = {z: omega_n(cod.d(z, fy)) - offset for z in cod.labels}
    values[cod.base] = 0 * offset
    return LipFunction(cod, values)


# ---------------------------------------------------------------------------
# locally constant approximants on the line


@dataclass
class IntervalFamily:
    """Ordered disjoint open intervals; sign says which axis side they live on."""

    intervals: List[Tuple[Num, Num]]

    def __post_init__(self):
        for lo, hi in self.intervals:
            if not lo < hi:
                raise OverlappingIntervals(f"empty interval ({lo}, {hi})")
            if lo < 0 < hi:
                raise OverlappingIntervals("intervals must not straddle 0")
        marked = sorted(self.intervals)
        for (l1, h1), (l2, h2) in zip(marked, marked[1:]):
            if l2 < h1:
                raise OverlappingIntervals(f"({l1},{h1}) meets ({l2},{h2})")

    def side(self, k: int) -> str:
        return "+" if self.intervals[k][0] >= 0 else "-"

    def length(self, k: int) -> Num:
        lo, hi = self.intervals[k]
        return hi - lo

    def tail_length(self, n: int) -> Num:
        """Total length of intervals after the first n."""
        return sum((self.length(k) for k in range(n, len(self.intervals))),
                   start=Fraction(0))


def psi_n(family: IntervalFamily, n: int):
    """Locally constant approximant of the identity off the first n gaps.

    psi_n(x) adds the lengths of positive-side gaps among the first n lying
    entirely below x and subtracts those of negative-side gaps above x.
    1-Lipschitz on the complement of the family; psi_0 is identically 0.
    """
    if n < 0 or n > len(family.intervals):
        raise OverlappingIntervals(f"n must lie in 0..{len(family.intervals)}")
    chosen = family.intervals[:n]

    def evaluate(x: Num) -> Num:
        total = 0
        for lo, hi in chosen:
            if lo >= 0 and x >= hi:
                total += hi - lo
            elif hi <= 0 and x <= lo:
                total -= hi - lo
        return total

    return evaluate
