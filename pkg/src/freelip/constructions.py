"""Exact generators for the counterexample families.

Every family yields spaces, maps and witness molecules together with
closed-form expected values computed in rational arithmetic, so the norm
solvers can be cross-checked against independent formulas.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import AlphaOutOfRange, InputError, StageTooLarge, WidthOverflow
from .functions import IntervalFamily
from .molecule import Molecule, canonicalize
from .numbers import Num
from .operators import PointMap
from .space import (
    EXACT,
    FiniteMetricSpace,
    line_space,
    product_space,
    snowflake,
)

MAX_LINE_STAGE = 12
MAX_DUST_STAGE = 6


@dataclass
class SVCStage:
    """Stage-k state of a fat Cantor construction on [0, 1].

    ``removed`` is ordered by construction stage, left to right within a
    stage, matching the indexing of the removed-interval families.
    """

    k: int
    removed: List[Tuple[Fraction, Fraction]]
    endpoints: List[Fraction]
    stage_measure: Fraction
    remaining: List[Tuple[Fraction, Fraction]]
    total_removed_measure: Fraction  # removed length of the infinite limit


@dataclass
class WitnessInstance:
    family: str
    stage: int
    domain: FiniteMetricSpace
    codomain: FiniteMetricSpace
    pmap: PointMap
    molecule: Molecule
    expected: Dict[str, Num]
    domain_positions: Optional[Dict[str, Num]] = None
    codomain_positions: Optional[Dict[str, Num]] = None
    notes: str = ""


def _build_fat_cantor(k: int, width_of_stage, total_removed: Fraction
                      ) -> SVCStage:
    """Remove middles of ``width_of_stage(s)`` at stage s = 1..k."""
    remaining: List[Tuple[Fraction, Fraction]] = [(Fraction(0), Fraction(1))]
    removed: List[Tuple[Fraction, Fraction]] = []
    for s in range(1, k + 1):
        width = Fraction(width_of_stage(s))
        nxt: List[Tuple[Fraction, Fraction]] = []
        for a, b in remaining:
            if width >= b - a:
                raise WidthOverflow(
                    f"stage-{s} width {width} exhausts interval ({a}, {b})")
            mid = (a + b) / 2
            lo, hi = mid - width / 2, mid + width / 2
            removed.append((lo, hi))
            nxt.append((a, lo))
            nxt.append((hi, b))
        # removals within a stage arrive left to right; the flat list is
        # therefore ordered stage-by-stage as the families require
        remaining = nxt
    endpoints = sorted({p for a, b in remaining for p in (a, b)})
    measure = sum((b - a for a, b in remaining), start=Fraction(0))
    return SVCStage(k, removed, endpoints, measure, remaining, total_removed)


def svc_stage(k: int) -> SVCStage:
    """Smith-Volterra-Cantor stage: remove middles of width 4**-s at stage s.

    lambda(C_k) = 1/2 + 2**-(k+1); all remaining intervals at stage k share
    the length 2**-(k+1) + 2**-(2k+1).
    """
    if not 1 <= k <= MAX_LINE_STAGE:
        raise StageTooLarge(f"stage must lie in 1..{MAX_LINE_STAGE}")
    return _build_fat_cantor(k, lambda s: Fraction(1, 4**s), Fraction(1, 2))


def _measure_map_values(stage: SVCStage) -> Dict[Fraction, Fraction]:
    """f(x) = lambda([0, x] minus the limit set) at every stage endpoint.

    The limit set splits its mass equally between the surviving intervals,
    so each stage-k interval carries (1 - total removed) / 2**k of it.
    """
    per_interval = (1 - stage.total_removed_measure) / (2 ** stage.k)
    values: Dict[Fraction, Fraction] = {}
    for i, (a, b) in enumerate(stage.remaining):
        values[a] = a - i * per_interval
        values[b] = b - (i + 1) * per_interval
    return values


def svc_map(k: int) -> Dict[Fraction, Fraction]:
    """Exact values of the measure map at all stage-k SVC endpoints."""
    return _measure_map_values(svc_stage(k))


def _line_witness(family: str, stage_obj: SVCStage, family_name: str,
                  expected_extra: Dict[str, Num]) -> WitnessInstance:
    """Shared assembly: endpoints with the line metric, the measure map,
    and the kernel-approximating molecule delta(1) - sum(delta(y) - delta(x))."""
    values = _measure_map_values(stage_obj)
    dom_positions = {str(p): p for p in stage_obj.endpoints}
    domain = line_space(f"{family_name}-dom-{stage_obj.k}", dom_positions, "0")
    cod_positions = {str(values[p]): values[p] for p in stage_obj.endpoints}
    codomain = line_space(f"{family_name}-cod-{stage_obj.k}", cod_positions, "0")
    assignment = {str(p): str(values[p]) for p in stage_obj.endpoints}
    pmap = PointMap(domain, codomain, assignment)
    terms: List[Tuple[str, Fraction]] = [("1", Fraction(1))]
    for x, y in stage_obj.removed:
        terms.append((str(x), Fraction(1)))
        terms.append((str(y), Fraction(-1)))
    mu = canonicalize(domain, terms)
    expected: Dict[str, Num] = dict(expected_extra)
    return WitnessInstance(family, stage_obj.k, domain, codomain, pmap, mu,
                           expected, dom_positions, cod_positions)


def svc_witness(k: int) -> WitnessInstance:
    """Stage-k truncation of the measure-map kernel element.

    Expected exactly: |mu_k| = 1/2 + 2**-(k+1) and |f_hat mu_k| = 2**-(k+1),
    both via the line oracle; the ratio decays to zero like 2**-k.
    """
    stage_obj = svc_stage(k)
    norm_mu = Fraction(1, 2) + Fraction(1, 2 ** (k + 1))
    norm_image = Fraction(1, 2 ** (k + 1))
    inst = _line_witness("svc", stage_obj, "svc", {
        "norm_mu": norm_mu,
        "norm_image": norm_image,
        "ratio": norm_image / norm_mu,
    })
    return inst


def snowflake_witness(alpha, n_stages: int) -> WitnessInstance:
    """Snowflaked fat-Cantor witness with stage widths t_s = 4**(-s/alpha).

    Requires 1/alpha to be an integer so the widths stay rational (the
    modulus bound then holds with equality, maximizing the witness).  The
    domain carries the snowflaked metric |x - y|**alpha (floating); the
    image side stays exact, with |f_hat mu_N| = sum_{s>N} 2**(s-1) t_s.
    """
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise AlphaOutOfRange("alpha must lie in (0, 1)")
    recip = 1 / alpha
    if recip.denominator != 1:
        raise AlphaOutOfRange(
            "snowflake witness needs 1/alpha integral for exact widths")
    m = int(recip)
    if not 1 <= n_stages <= MAX_LINE_STAGE:
        raise StageTooLarge(f"stages must lie in 1..{MAX_LINE_STAGE}")
    r = Fraction(1, 4**m)  # t_s = r**s
    if 2 * r >= 1:
        raise WidthOverflow("total removed length must stay below 1")
    total_removed = r / (1 - 2 * r)  # sum 2**(s-1) r**s
    stage_obj = _build_fat_cantor(n_stages, lambda s: r**s, total_removed)
    # tail sum_{s>N} 2**(s-1) r**s of the removed widths
    norm_image = Fraction(1, 2) * (2 * r) ** (n_stages + 1) / (1 - 2 * r)
    inst = _line_witness("snowflake", stage_obj, f"snow{m}", {
        "norm_image": norm_image,
        "norm_mu_lower": Fraction(1, 2),
        "ratio_upper": norm_image / Fraction(1, 2),
        "removed_rho_total": Fraction(1, 2),  # sum 2**(s-1) (t_s)**alpha
    })
    snow_domain = snowflake(inst.domain, alpha)
    mu = Molecule(snow_domain, dict(inst.molecule.terms))
    pmap = PointMap(snow_domain, inst.codomain, dict(inst.pmap.assignment))
    return WitnessInstance("snowflake", n_stages, snow_domain, inst.codomain,
                           pmap, mu, inst.expected, None,
                           inst.codomain_positions,
                           notes=f"alpha={alpha}, widths 4**(-s/alpha)")


def _stage_of_index(n: int) -> int:
    """Removed-interval index -> construction stage (1-based, 2**(s-1) per stage)."""
    s = 1
    while n >= 2**s:
        s += 1
    return s


def discrete_witness(variant: str, k: int) -> WitnessInstance:
    """Countable discrete spaces mapped onto SVC removed-interval endpoints.

    ``unbounded``: pairs sit on the real line at x_n = n + 1 with gaps
    4**-s.  ``bounded``: all distances are 1 except d(x_n, y_n) = 4**-s.
    The map targets the SVC removed endpoints (stage order, left to right)
    and 1 -> 1, so the image molecule is exactly the stage-k SVC witness.
    """
    if variant not in ("unbounded", "bounded"):
        raise InputError("variant must be 'unbounded' or 'bounded'")
    if not 1 <= k <= MAX_LINE_STAGE:
        raise StageTooLarge(f"stage must lie in 1..{MAX_LINE_STAGE}")
    stage_obj = svc_stage(k)
    count = 2**k - 1
    labels = ["0", "1"] + [f"x{n}" for n in range(1, count + 1)] \
        + [f"y{n}" for n in range(1, count + 1)]
    dom_positions: Optional[Dict[str, Num]] = None
    if variant == "unbounded":
        dom_positions = {"0": Fraction(0), "1": Fraction(1)}
        for n in range(1, count + 1):
            s = _stage_of_index(n)
            dom_positions[f"x{n}"] = Fraction(n + 1)
            dom_positions[f"y{n}"] = Fraction(n + 1) + Fraction(1, 4**s)
        domain = line_space(f"discreteR-dom-{k}", dom_positions, "0")
    else:
        index = {lab: i for i, lab in enumerate(labels)}
        one = Fraction(1)
        mat = [[one] * len(labels) for _ in labels]
        for i in range(len(labels)):
            mat[i][i] = Fraction(0)
        for n in range(1, count + 1):
            s = _stage_of_index(n)
            i, j = index[f"x{n}"], index[f"y{n}"]
            mat[i][j] = mat[j][i] = Fraction(1, 4**s)
        domain = FiniteMetricSpace(f"discreteB-dom-{k}", labels, "0", mat,
                                   EXACT, _validated=True)
    cod_positions: Dict[str, Num] = {"0": Fraction(0), "1": Fraction(1)}
    assignment = {"0": "0", "1": "1"}
    for n, (x_prime, y_prime) in enumerate(stage_obj.removed, start=1):
        cod_positions[str(x_prime)] = x_prime
        cod_positions[str(y_prime)] = y_prime
        assignment[f"x{n}"] = str(x_prime)
        assignment[f"y{n}"] = str(y_prime)
    codomain = line_space(f"discrete-cod-{k}", cod_positions, "0")
    pmap = PointMap(domain, codomain, assignment)
    terms: List[Tuple[str, Fraction]] = [("1", Fraction(1))]
    for n in range(1, count + 1):
        terms.append((f"x{n}", Fraction(1)))
        terms.append((f"y{n}", Fraction(-1)))
    mu = canonicalize(domain, terms)
    expected: Dict[str, Num] = {
        "norm_image": Fraction(1, 2) + Fraction(1, 2 ** (k + 1)),
        "norm_mu_lower": Fraction(1, 2),
        # sum over realized pairs of |delta(y) - delta(x)| = sum 2**(s-1) 4**-s
        "pair_norm_total": Fraction(1, 2) * (1 - Fraction(1, 2**k)),
    }
    if variant == "unbounded":
        # on the line: |Phi mu| integrates 1 over (0,1) plus each pair gap
        expected["norm_mu"] = 1 + expected["pair_norm_total"]
    return WitnessInstance("discrete-" + variant, k, domain, codomain, pmap,
                           mu, expected, dom_positions, cod_positions)


def middle_thirds_endpoints(k: int) -> List[Fraction]:
    """Endpoints of the stage-k middle-thirds construction (2 * 2**k points)."""
    intervals = [(Fraction(0), Fraction(1))]
    for _ in range(k):
        nxt = []
        for a, b in intervals:
            third = (b - a) / 3
            nxt.append((a, a + third))
            nxt.append((b - third, b))
        intervals = nxt
    return sorted({p for a, b in intervals for p in (a, b)})


def cantor_dust(k: int, p) -> FiniteMetricSpace:
    """Product of two stage-k middle-thirds endpoint sets, l_p metric.

    Exact up to stage 4; stages 5 and 6 use floating storage since the
    matrix grows like 16**k entries.
    """
    if not 1 <= k <= MAX_DUST_STAGE:
        raise StageTooLarge(f"stage must lie in 1..{MAX_DUST_STAGE}")
    pts = middle_thirds_endpoints(k)
    positions: Dict[str, Num] = {str(q): q for q in pts}
    axis = line_space(f"thirds-{k}", positions, "0")
    if len(pts) ** 2 > 1100:  # keep exact matrices at desk scale
        axis = FiniteMetricSpace(axis.name, axis.labels, axis.base,
                                 [[float(v) for v in row]
                                  for row in axis._dist],
                                 "floating", _validated=True)
    dust = product_space(axis, axis, p)
    dust.name = f"dust-{k}-l{'inf' if p != 1 else '1'}"
    return dust


def rtree_example(n_max: int) -> WitnessInstance:
    """Star-tree map whose linearization misses exactly one direction.

    The codomain is the convergent line sequence y_n = 1 - 1/n with the
    extra point y_inf = 1; the domain is a star of branches carrying x_n' at
    distance 1 and x_{n+1} at distance 1 + (y gap).  The linearization maps
    the branch molecules onto the codomain basis exactly, so the rank
    deficiency is exactly one: the delta(y_inf) direction.
    """
    if n_max < 2:
        raise InputError("need n_max >= 2")
    cod_positions: Dict[str, Num] = {
        f"y{n}": 1 - Fraction(1, n) for n in range(1, n_max + 1)}
    cod_positions["yinf"] = Fraction(1)
    codomain = line_space(f"rtree-cod-{n_max}", cod_positions, "y1")
    labels = ["0"] + [f"x{n}'" for n in range(1, n_max)] \
        + [f"x{n}" for n in range(2, n_max + 1)]
    arm: Dict[str, Fraction] = {"0": Fraction(0)}
    branch: Dict[str, int] = {"0": -1}
    for n in range(1, n_max):
        gap = Fraction(1, n) - Fraction(1, n + 1)
        arm[f"x{n}'"] = Fraction(1)
        arm[f"x{n + 1}"] = 1 + gap
        branch[f"x{n}'"] = n
        branch[f"x{n + 1}"] = n
    mat = []
    for a in labels:
        row = []
        for b in labels:
            if a == b:
                row.append(Fraction(0))
            elif branch[a] == branch[b] and branch[a] != -1:
                row.append(abs(arm[a] - arm[b]))
            else:
                row.append(arm[a] + arm[b])
        mat.append(row)
    domain = FiniteMetricSpace(f"rtree-dom-{n_max}", labels, "0", mat, EXACT,
                               _validated=True)
    assignment = {"0": "y1"}
    for n in range(1, n_max):
        assignment[f"x{n}'"] = f"y{n}"
    for n in range(2, n_max + 1):
        assignment[f"x{n}"] = f"y{n}"
    pmap = PointMap(domain, codomain, assignment)
    mu = canonicalize(codomain, {"yinf": Fraction(1),
                                 f"y{n_max}": Fraction(-1)})
    return WitnessInstance(
        "rtree", n_max, domain, codomain, pmap, mu,
        expected={"missed_direction_norm": Fraction(1, n_max),
                  "rank": n_max - 1,
                  "rank_deficiency": 1},
        codomain_positions=cod_positions,
        notes="molecule lives on the codomain: the missed direction")


def xsquared_grid(n: int) -> WitnessInstance:
    """x -> x**2 on the grid {k/n}: injective linearization that degenerates.

    The distortion floor is a(f) = 1/n at the pair (0, 1/n) and the
    Lipschitz constant (2n-1)/n at the top pair, so the embedding modulus
    upper bound decreases like 1/n while the rank stays full.
    """
    if n < 2:
        raise InputError("need n >= 2")
    dom_positions: Dict[str, Num] = {
        str(Fraction(j, n)): Fraction(j, n) for j in range(n + 1)}
    domain = line_space(f"xsq-dom-{n}", dom_positions, "0")
    cod_positions: Dict[str, Num] = {
        str(Fraction(j, n) ** 2): Fraction(j, n) ** 2 for j in range(n + 1)}
    codomain = line_space(f"xsq-cod-{n}", cod_positions, "0")
    assignment = {str(Fraction(j, n)): str(Fraction(j, n) ** 2)
                  for j in range(n + 1)}
    pmap = PointMap(domain, codomain, assignment)
    mu = canonicalize(domain, {str(Fraction(1, n)): Fraction(n)})
    return WitnessInstance(
        "xsquared", n, domain, codomain, pmap, mu,
        expected={"a": Fraction(1, n), "b": Fraction(2 * n - 1, n),
                  "rank": n},
        domain_positions=dom_positions, codomain_positions=cod_positions,
        notes="molecule is the elementary m at the worst pair (0, 1/n)")


def svc_complement_family(k: int) -> IntervalFamily:
    """Bounded gaps of the stage-k SVC endpoint set, for the approximants.

    The finite endpoint set is negligible, so the identity approximants
    converge on it.  Removed intervals come first (stage order, left to
    right), followed by the interiors of the surviving stage-k intervals;
    the tail after the first n gaps bounds the pointwise error.
    """
    stage_obj = svc_stage(k)
    gaps: List[Tuple[Num, Num]] = list(stage_obj.removed)
    gaps.extend((a, b) for a, b in stage_obj.remaining)
    return IntervalFamily(gaps)
