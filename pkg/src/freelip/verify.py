"""Seeded property suites over every module, plus negative-control fixtures.

``run_verification`` drives the checks the modules promise as invariants;
the CLI ``verify`` subcommand wraps it.  Reports are deterministic for a
fixed configuration: suites iterate in a fixed order and no timing or
environment data is recorded.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

from . import constructions as con
from .errors import FreeLipError, TriangleViolation
from .functions import (
    LipFunction,
    ModulusFunction,
    inf_convolve,
    lip_constant,
    mcshane_extend,
    plateau,
    psi_n,
    separation_family,
    weighting_norm_bound,
    weighting_operator,
)
from .molecule import Molecule, canonicalize, delta, elementary
from .norms import norm_dual_lp, norm_flow, norm_line
from .numbers import rel_close
from .operators import (
    PointMap,
    bilip_constants,
    check_nonreturning,
    check_support_preservation,
    composition_support_laws,
    compose_Cf,
    embedding_modulus,
    linearize,
)
from .space import (
    EXACT,
    FiniteMetricSpace,
    check_cover_condition,
    distance_set_measure,
    line_space,
    product_space,
    random_space,
    snowflake,
    truncate_metric,
    validate_space,
)

SUITE_NAMES = ("metric", "norms", "functions", "operators", "constructions")
FIXTURES = ("triangle-violation", "collapsing-map")


@dataclass
class RunConfig:
    seed: int = 12345
    tolerance: float = 1e-9
    suites: Sequence[str] = SUITE_NAMES
    fixture: Optional[str] = None
    samples: int = 30  # random instances per repeated check


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


class _Suite:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.results: List[CheckResult] = []

    def check(self, name: str, passed: bool, detail: str = "") -> None:
        self.results.append(CheckResult(name, bool(passed), detail))

    def expect(self, name: str, fn: Callable[[], bool]) -> None:
        try:
            self.check(name, fn())
        except FreeLipError as exc:
            self.check(name, False, f"{type(exc).__name__}: {exc}")


# -- shared random generators -------------------------------------------------


def random_molecule(rng: random.Random, space: FiniteMetricSpace,
                    max_support: int = 6) -> Molecule:
    labels = list(space.nonbase)
    rng.shuffle(labels)
    size = rng.randint(1, min(max_support, len(labels)))
    if space.mode == EXACT:
        terms = {lab: Fraction(rng.randint(-8, 8) or 1, rng.randint(1, 6))
                 for lab in labels[:size]}
    else:
        terms = {lab: rng.uniform(-2, 2) or 1.0 for lab in labels[:size]}
    return canonicalize(space, terms)


def random_map(rng: random.Random, dom: FiniteMetricSpace,
               cod: FiniteMetricSpace, injective: Optional[bool] = None
               ) -> PointMap:
    targets = list(cod.nonbase)
    want_inj = rng.random() < 0.5 if injective is None else injective
    assignment = {dom.base: cod.base}
    if want_inj and len(targets) >= len(dom.nonbase):
        picked = rng.sample(targets, len(dom.nonbase))
        assignment.update(zip(dom.nonbase, picked))
    else:
        for lab in dom.nonbase:
            assignment[lab] = rng.choice(targets + [cod.base])
    return PointMap(dom, cod, assignment)


def _random_line(rng: random.Random, n: int, exact: bool = True):
    positions = {"0": Fraction(0)}
    used = {Fraction(0)}
    while len(positions) < n:
        p = Fraction(rng.randint(-300, 300), 8)
        if p not in used:
            used.add(p)
            positions[f"q{len(positions)}"] = p
    if not exact:
        positions = {lab: float(v) for lab, v in positions.items()}
    return line_space(f"rline-{rng.random():.6f}", positions, "0"), positions


# -- suites -------------------------------------------------------------------


def _axiom_scan(space: FiniteMetricSpace) -> bool:
    labs = space.labels
    for i, a in enumerate(labs):
        if space.d(a, a) != 0:
            return False
        for b in labs[i + 1:]:
            if space.d(a, b) != space.d(b, a) or not space.d(a, b) > 0:
                return False
    slack = 0 if space.mode == EXACT else 1e-12
    for a in labs:
        for b in labs:
            for c in labs:
                if space.d(a, b) > space.d(a, c) + space.d(c, b) + slack:
                    return False
    return True


def suite_metric(cfg: RunConfig) -> List[CheckResult]:
    s = _Suite(cfg)
    rng = random.Random(cfg.seed)
    for trial in range(max(4, cfg.samples // 6)):
        seed = rng.randint(0, 10**9)
        exact_sp = random_space(seed, rng.randint(3, 9), "shortestpath")
        float_sp = random_space(seed, rng.randint(3, 9), "euclidean2d")
        s.check(f"random-space-axioms[{trial}]",
                _axiom_scan(exact_sp) and _axiom_scan(float_sp))
        snow = snowflake(exact_sp, Fraction(1, 2))
        s.check(f"snowflake-valid[{trial}]", _axiom_scan(snow))
        twice = snowflake(snowflake(exact_sp, Fraction(1, 2)), Fraction(1, 2))
        quarter = snowflake(exact_sp, Fraction(1, 4))
        s.check(f"snowflake-composes[{trial}]",
                all(rel_close(twice.d(a, b), quarter.d(a, b), cfg.tolerance)
                    for a, b in twice.pairs()))
        trunc = truncate_metric(exact_sp)
        s.check(f"truncate-idempotent[{trial}]",
                all(truncate_metric(trunc).d(a, b) == trunc.d(a, b)
                    and trunc.d(a, b) <= exact_sp.d(a, b)
                    for a, b in trunc.pairs()))
        small_a = random_space(seed + 1, 3, "shortestpath")
        small_b = random_space(seed + 2, 3, "shortestpath")
        s.check(f"product-valid[{trial}]",
                _axiom_scan(product_space(small_a, small_b, 1))
                and _axiom_scan(product_space(small_a, small_b, "inf")))
        x = exact_sp.labels[1]
        m1 = distance_set_measure(exact_sp, x, Fraction(1, 100))
        m2 = distance_set_measure(exact_sp, x, Fraction(1, 10))
        bound = 2 * Fraction(1, 10) * len(exact_sp) + exact_sp.diameter()
        s.check(f"distance-measure-monotone[{trial}]",
                m1 <= m2 <= bound)
    s.check("random-space-deterministic",
            random_space(42, 6, "shortestpath").to_json_dict()
            == random_space(42, 6, "shortestpath").to_json_dict())
    sp = random_space(7, 5, "shortestpath")
    verdict = check_cover_condition(sp, sp.diameter(), Fraction(2), "b")
    s.check("cover-ball-satisfiable", verdict.satisfied and verdict.conclusive)
    return s.results


def suite_norms(cfg: RunConfig) -> List[CheckResult]:
    s = _Suite(cfg)
    rng = random.Random(cfg.seed + 1)
    tol = cfg.tolerance
    # duality and oracle equivalence on random instances
    for trial in range(cfg.samples):
        sp = random_space(rng.randint(0, 10**9), rng.randint(4, 12),
                          "euclidean2d" if trial % 2 else "shortestpath")
        mu = random_molecule(rng, sp)
        lp, potential = norm_dual_lp(mu)
        fv, plan = norm_flow(mu)
        s.check(f"duality-gap[{trial}]", rel_close(lp, fv, tol),
                f"lp={float(lp):.12g} flow={float(fv):.12g}")
        s.check(f"dual-feasible[{trial}]",
                float(potential.lip_constant()) <= 1 + tol)
        s.check(f"plan-conserves[{trial}]",
                plan.conservation_defect(mu) <= tol * 10)
    # the three routes agree on line spaces
    for trial in range(cfg.samples // 2):
        sp, positions = _random_line(rng, rng.randint(3, 10))
        mu = random_molecule(rng, sp)
        lv, _ = norm_line(mu, positions)
        lp, _ = norm_dual_lp(mu)
        fv, _ = norm_flow(mu)
        s.check(f"line-oracle-agrees[{trial}]",
                rel_close(lv, lp, tol) and rel_close(lv, fv, tol))
    # exact equality when everything runs rationally
    sp, positions = _random_line(rng, 6)
    for trial in range(4):
        mu = random_molecule(rng, sp, max_support=5)
        lv, _ = norm_line(mu, positions)
        lp, _ = norm_dual_lp(mu, rational=True)
        fv, _ = norm_flow(mu, rational=True)
        s.check(f"rational-exact-equality[{trial}]", lv == lp == fv,
                f"line={lv} lp={lp} flow={fv}")
    # norm axioms and elementary values
    sp = random_space(cfg.seed, 7, "shortestpath")
    for trial in range(4):
        mu = random_molecule(rng, sp)
        nu = random_molecule(rng, sp)
        c = Fraction(rng.randint(-6, 6) or 2, rng.randint(1, 4))
        s.check(f"homogeneity[{trial}]",
                norm_flow(c * mu, rational=True)[0]
                == abs(c) * norm_flow(mu, rational=True)[0])
        s.check(f"triangle[{trial}]",
                float(norm_flow(mu + nu)[0])
                <= float(norm_flow(mu)[0]) + float(norm_flow(nu)[0]) + tol)
    s.check("elementary-norm-one",
            all(norm_flow(elementary(sp, x, y), rational=True)[0] == 1
                for x, y in list(sp.pairs())[:10] if x != y))
    s.check("delta-differences",
            all(norm_flow(delta(sp, x) - delta(sp, y), rational=True)[0]
                == sp.d(x, y) for x, y in list(sp.pairs())[:10]))
    s.check("delta-norm-is-distance",
            all(norm_flow(delta(sp, x), rational=True)[0] == sp.d(sp.base, x)
                for x in sp.nonbase))
    # subspace consistency: enlarging the ambient space changes nothing
    big, positions = _random_line(rng, 9)
    mu = random_molecule(rng, big, max_support=4)
    small = big.restrict(sorted(mu.support()))
    mu_small = canonicalize(small, dict(mu.terms))
    s.check("restriction-invariance",
            norm_flow(mu, rational=True)[0]
            == norm_flow(mu_small, rational=True)[0])
    zero = canonicalize(sp, {})
    s.check("zero-short-circuit", norm_flow(zero)[0] == 0
            and norm_dual_lp(zero)[0] == 0)
    return s.results


def suite_functions(cfg: RunConfig) -> List[CheckResult]:
    s = _Suite(cfg)
    rng = random.Random(cfg.seed + 2)
    for trial in range(max(4, cfg.samples // 4)):
        sp = random_space(rng.randint(0, 10**9), rng.randint(4, 9),
                          "shortestpath")
        labs = list(sp.labels)
        rng.shuffle(labs)
        known = [sp.base] + [lab for lab in labs if lab != sp.base][:3]
        partial = {sp.base: Fraction(0)}
        for lab in known[1:]:
            partial[lab] = Fraction(rng.randint(-8, 8), 4)
        bound = max((abs(partial[a] - partial[b]) / sp.d(a, b)
                     for a in partial for b in partial if a != b),
                    default=Fraction(1))
        ext = mcshane_extend(sp, partial, bound)
        s.check(f"mcshane-restricts[{trial}]",
                all(ext.values[lab] == partial[lab] for lab in partial))
        s.check(f"mcshane-bound[{trial}]", ext.lip_constant() <= bound)
        x = rng.choice(sp.labels)
        r = sp.diameter() / rng.randint(2, 6)
        w = plateau(sp, x, r)
        inner = sp.ball(x, r)
        outer = set(sp.labels) - set(sp.ball(x, 2 * r))
        s.check(f"plateau-sets[{trial}]",
                all(w.values[z] == 1 for z in inner)
                and all(w.values[z] == 0 for z in outer)
                and all(0 <= v <= 1 for v in w.values.values()))
        s.check(f"plateau-slope[{trial}]",
                w.lip_constant() <= Fraction(1) / Fraction(r))
        g = LipFunction(sp, {lab: Fraction(rng.randint(-6, 6), 3)
                             for lab in sp.nonbase} | {sp.base: Fraction(0)})
        prod = weighting_operator(w, g)
        s.check(f"weighting-bound[{trial}]",
                prod.lip_constant()
                <= weighting_norm_bound(w) * lip_constant(g))
    # inf-convolution chain on a pwl modulus
    omega = ModulusFunction.piecewise_linear(
        [Fraction(0), Fraction(1, 4), Fraction(1), Fraction(2)],
        [Fraction(0), Fraction(3, 2), Fraction(2), Fraction(9, 4)])
    grid = [Fraction(k, 8) for k in range(0, 25)]
    prev = None
    ok_mono = ok_below = ok_lip = True
    for n in (1, 2, 5, 9):
        om_n = inf_convolve(omega, n)
        vals = [om_n(t) for t in grid]
        ok_below &= all(v <= omega(t) for v, t in zip(vals, grid))
        if prev is not None:
            ok_mono &= all(p <= v for p, v in zip(prev, vals))
        ok_lip &= all(abs(om_n(a) - om_n(b)) <= n * abs(a - b)
                      for a in grid for b in grid)
        prev = vals
    s.check("infconv-below", ok_below)
    s.check("infconv-monotone-in-n", ok_mono)
    s.check("infconv-n-lipschitz", ok_lip)
    big_n = inf_convolve(omega, 64)
    s.check("infconv-converges",
            all(rel_close(big_n(t), omega(t), 1e-6) for t in grid))
    sub = omega.subadditivity_defect(grid[1:])
    sub_n = inf_convolve(omega, 3).subadditivity_defect(grid[1:])
    s.check("infconv-keeps-subadditivity",
            sub <= 0 and sub_n <= Fraction(0))
    # separation family on the snowflake identity
    base_sp = random_space(cfg.seed + 9, 6, "shortestpath")
    snow = snowflake(base_sp, Fraction(1, 2))
    ident = PointMap(snow, base_sp,
                     {lab: lab for lab in base_sp.labels})
    omega_pow = ModulusFunction.power(Fraction(1, 2))
    y = base_sp.labels[2]
    good_lip = True
    close = True
    for n in (2, 8, 32, 128, 100000):
        g_n = separation_family(ident, omega_pow, n, y)
        pulled = compose_Cf(ident, g_n)
        good_lip &= float(lip_constant(pulled)) <= 1 + cfg.tolerance
        if n == 100000:
            x = base_sp.labels[1]
            target = snow.d(x, y)
            close = abs(float(g_n.values[ident(x)] - g_n.values[ident(y)])
                        - float(target)) <= 1e-4 * max(1.0, float(target))
    s.check("separation-lip-bound", good_lip)
    s.check("separation-converges", close)
    # identity approximants on the fat-Cantor gaps
    fam = con.svc_complement_family(3)
    stage = con.svc_stage(3)
    pts = stage.endpoints
    for n in (0, 3, 7, len(fam.intervals)):
        psi = psi_n(fam, n)
        tail = fam.tail_length(n)
        ok_err = all(abs(psi(p) - p) <= tail for p in pts)
        ok_lip = all(abs(psi(a) - psi(b)) <= abs(a - b)
                     for a in pts for b in pts)
        s.check(f"psi-error-and-lip[n={n}]", ok_err and ok_lip)
    return s.results


def suite_operators(cfg: RunConfig) -> List[CheckResult]:
    s = _Suite(cfg)
    rng = random.Random(cfg.seed + 3)
    tol = cfg.tolerance
    for trial in range(max(6, cfg.samples // 3)):
        dom = random_space(rng.randint(0, 10**9), rng.randint(3, 7),
                           "shortestpath")
        cod = random_space(rng.randint(0, 10**9), rng.randint(3, 9),
                           "shortestpath")
        f = random_map(rng, dom, cod)
        op = linearize(f)
        s.check(f"rank-law[{trial}]",
                op.is_injective == f.is_injective(),
                f"rank={op.rank()} inj={f.is_injective()}")
        s.check(f"rank-counts-image[{trial}]",
                op.rank() == len({f(x) for x in dom.nonbase} - {cod.base}))
        mu = random_molecule(rng, dom)
        rep = check_support_preservation(f, mu)
        s.check(f"support-inclusion[{trial}]", rep.inclusion_holds)
        if f.is_injective():
            s.check(f"support-equality-injective[{trial}]",
                    rep.equality_holds)
            nr = check_nonreturning(f, dom.nonbase[0], dom.diameter())
            s.check(f"nonreturning-positive[{trial}]",
                    nr.rho_sup == float("inf") or nr.rho_sup > 0)
        g_vals = {lab: Fraction(rng.randint(-5, 5), 2) for lab in cod.nonbase}
        g_vals[cod.base] = Fraction(0)
        g = LipFunction(cod, g_vals)
        pulled = compose_Cf(f, g)
        s.check(f"adjoint-identity[{trial}]",
                pulled.pair(mu) == g.pair(linearize(f).apply(mu)))
        s.check(f"composition-bound[{trial}]",
                lip_constant(pulled) <= lip_constant(g) * f.lip_constant())
        norm_mu = norm_flow(mu)[0]
        norm_img = norm_flow(op.apply(mu))[0]
        s.check(f"operator-norm-bound[{trial}]",
                float(norm_img) <= float(f.lip_constant() * norm_mu) + tol)
    # functoriality of linearization
    d1 = random_space(cfg.seed + 11, 4, "shortestpath")
    d2 = random_space(cfg.seed + 12, 5, "shortestpath")
    d3 = random_space(cfg.seed + 13, 6, "shortestpath")
    f = random_map(rng, d1, d2)
    g = random_map(rng, d2, d3)
    gf = f.then(g)
    mat_g = linearize(g).matrix()
    mat_f = linearize(f).matrix()
    prod = [[sum(mat_g[i][k] * mat_f[k][j] for k in range(len(mat_f)))
             for j in range(len(mat_f[0]))] for i in range(len(mat_g))]
    s.check("functoriality-matrix", prod == linearize(gf).matrix())
    mu = random_molecule(rng, d1)
    s.check("functoriality-apply",
            linearize(gf).apply(mu)
            == linearize(g).apply(linearize(f).apply(mu)))
    laws = composition_support_laws(f, g, [random_molecule(rng, d1)
                                           for _ in range(6)])
    s.check("composition-support-laws", laws.all_hold)
    # operator norm equals the Lipschitz constant through elementary sups
    f = random_map(rng, d1, d2)
    ratios = [norm_flow(linearize(f).apply(elementary(d1, x, y)),
                        rational=True)[0]
              for x, y in d1.pairs()]
    s.check("operator-norm-identity", max(ratios) == f.lip_constant())
    # modulus bracket ordering on an injective instance
    xs = con.xsquared_grid(4)
    br = embedding_modulus(linearize(xs.pmap))
    bl = bilip_constants(xs.pmap)
    s.check("modulus-vs-bilip",
            br.lower is not None and br.lower <= bl.lower <= bl.upper
            and br.method == "exact-vertex")
    return s.results


def suite_constructions(cfg: RunConfig) -> List[CheckResult]:
    s = _Suite(cfg)
    tol = cfg.tolerance
    for k in (1, 2, 3, 4):
        w = con.svc_witness(k)
        mu_line, _ = norm_line(w.molecule, w.domain_positions)
        image = linearize(w.pmap).apply(w.molecule)
        img_line, _ = norm_line(image, w.codomain_positions)
        s.check(f"svc-exact[{k}]",
                mu_line == w.expected["norm_mu"]
                and img_line == w.expected["norm_image"])
        lp, _ = norm_dual_lp(w.molecule)
        fv, _ = norm_flow(w.molecule)
        s.check(f"svc-solvers[{k}]",
                rel_close(lp, mu_line, tol) and rel_close(fv, mu_line, tol))
        values = con.svc_map(k)
        by_endpoint = [values[p] for p in sorted(values)]
        s.check(f"svc-map-increasing[{k}]",
                all(a < b for a, b in zip(by_endpoint, by_endpoint[1:])))
        rep = check_support_preservation(w.pmap, w.molecule)
        s.check(f"svc-support-equality[{k}]", rep.equality_holds)
    for n_stage in (1, 2, 3):
        sw = con.snowflake_witness(Fraction(1, 2), n_stage)
        image = linearize(sw.pmap).apply(sw.molecule)
        img_line, _ = norm_line(image, sw.codomain_positions)
        lp, _ = norm_dual_lp(sw.molecule)
        s.check(f"snowflake-exact[{n_stage}]",
                img_line == sw.expected["norm_image"]
                and lp >= 0.5 - tol)
    for variant in ("unbounded", "bounded"):
        dw = con.discrete_witness(variant, 2)
        image = linearize(dw.pmap).apply(dw.molecule)
        img_line, _ = norm_line(image, dw.codomain_positions)
        lp, _ = norm_dual_lp(dw.molecule)
        s.check(f"discrete-{variant}",
                img_line == dw.expected["norm_image"]
                and float(lp) >= 0.5 - tol
                and dw.pmap.is_injective())
    rt = con.rtree_example(6)
    op = linearize(rt.pmap)
    miss, _ = norm_line(rt.molecule, rt.codomain_positions)
    branch_ok = True
    for n in range(2, 6):
        m_dom = elementary(rt.domain, f"x{n}", f"x{n - 1}'")
        m_cod = elementary(rt.codomain, f"y{n}", f"y{n - 1}")
        branch_ok &= op.apply(m_dom) == m_cod
    s.check("rtree-branch-molecules", branch_ok)
    s.check("rtree-rank-deficiency",
            op.rank() == rt.expected["rank"]
            and miss == rt.expected["missed_direction_norm"])
    xs = con.xsquared_grid(5)
    bl = bilip_constants(xs.pmap)
    s.check("xsquared-constants",
            bl.lower == xs.expected["a"] and bl.upper == xs.expected["b"]
            and linearize(xs.pmap).rank() == xs.expected["rank"])
    dust = con.cantor_dust(3, "inf")
    dust1 = con.cantor_dust(3, 1)
    m_inf = distance_set_measure(dust, dust.base, Fraction(1, 100))
    m_1 = distance_set_measure(dust1, dust1.base, Fraction(1, 100))
    s.check("dust-contrast", float(m_1) > 3 * float(m_inf),
            f"l1={float(m_1):.4f} linf={float(m_inf):.4f}")
    return s.results


def _fixture_checks(name: str) -> List[CheckResult]:
    """Negative controls: deliberately broken inputs must fail their suites."""
    results: List[CheckResult] = []
    if name == "triangle-violation":
        try:
            validate_space("broken", ["0", "a", "b", "c"], "0",
                           [[0, 1, 1, 5], [1, 0, 1, 1], [1, 1, 0, 1],
                            [5, 1, 1, 0]])
            results.append(CheckResult("fixture-triangle", False,
                                       "violation was not detected"))
        except TriangleViolation as exc:
            results.append(CheckResult(
                "fixture-triangle", False,
                f"fixture engaged: {exc} (deterministic failure)"))
    elif name == "collapsing-map":
        dom = line_space("fix-dom", {"0": Fraction(0), "a": Fraction(1),
                                     "b": Fraction(2)}, "0")
        cod = line_space("fix-cod", {"0": Fraction(0), "c": Fraction(1)}, "0")
        collapsing = PointMap(dom, cod, {"0": "0", "a": "c", "b": "c"})
        claimed_injective = True  # the fixture's (false) claim
        op = linearize(collapsing)
        results.append(CheckResult(
            "fixture-collapsing-rank",
            op.is_injective == claimed_injective,
            f"rank={op.rank()}, kernel size={len(op.kernel_basis())}"))
    else:
        results.append(CheckResult("fixture-unknown", False,
                                   f"no fixture named {name!r}"))
    return results


SUITES: Dict[str, Callable[[RunConfig], List[CheckResult]]] = {
    "metric": suite_metric,
    "norms": suite_norms,
    "functions": suite_functions,
    "operators": suite_operators,
    "constructions": suite_constructions,
}


def run_verification(cfg: RunConfig) -> dict:
    """Run the selected suites; the report is stable for a fixed config."""
    report: dict = {"config": {"seed": cfg.seed, "tolerance": cfg.tolerance,
                               "suites": list(cfg.suites),
                               "fixture": cfg.fixture,
                               "samples": cfg.samples},
                    "suites": {}}
    failures = 0
    for name in cfg.suites:
        if name not in SUITES:
            raise FreeLipError(f"unknown suite {name!r}")
        results = SUITES[name](cfg)
        report["suites"][name] = [
            {"check": r.name, "passed": r.passed,
             **({"detail": r.detail} if r.detail else {})}
            for r in results]
        failures += sum(not r.passed for r in results)
    if cfg.fixture:
        results = _fixture_checks(cfg.fixture)
        report["suites"]["fixture"] = [
            {"check": r.name, "passed": r.passed,
             **({"detail": r.detail} if r.detail else {})}
            for r in results]
        failures += sum(not r.passed for r in results)
    report["failures"] = failures
    report["passed"] = failures == 0
    return report
