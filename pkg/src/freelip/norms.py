"""Three independent routes to the free-space (transportation-cost) norm.

* ``norm_dual_lp``  -- the Lipschitz-potential LP, solved by HiGHS in
  floating mode and by an exact rational simplex (sympy) on request.
* ``norm_flow``     -- primal min-cost flow via a dense transportation
  simplex written for generic arithmetic (Fractions or floats).
* ``norm_line``     -- the exact step-function oracle available when the
  space embeds in the real line.

The dual LP is solved independently of the flow so that the duality gap
is a genuine cross-check, not an identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csr_matrix

from .errors import NotALineSpace, SolverFailure, SpaceMismatch
from .molecule import Molecule
from .numbers import REL_TOL, Num
from .space import EXACT, FiniteMetricSpace, infer_line_positions

#: auto-switch caps: exact solvers only engage on instances this small
EXACT_LP_AUTO_CAP = 14
EXACT_FLOW_AUTO_CAP = 48


# ---------------------------------------------------------------------------
# certificates


@dataclass
class TransportPlan:
    """Primal certificate: nonnegative flows between support points."""

    flows: Dict[Tuple[str, str], Num]
    cost: Num

    def conservation_defect(self, mu: Molecule) -> float:
        """Largest violation of flow conservation against mu's coefficients,
        with the base point absorbing the overall imbalance."""
        base = mu.space.base
        balance = dict(mu.terms)
        balance[base] = -sum(mu.terms.values())
        worst = 0.0
        nodes = set(balance)
        for (src, dst), f in self.flows.items():
            nodes.add(src)
            nodes.add(dst)
            if float(f) < 0:
                worst = max(worst, -float(f))
        for node in nodes:
            out = sum(f for (s, _), f in self.flows.items() if s == node)
            inc = sum(f for (_, t), f in self.flows.items() if t == node)
            worst = max(worst, abs(float(out - inc - balance.get(node, 0))))
        return worst

    def recomputed_cost(self, space: FiniteMetricSpace) -> Num:
        return sum((f * space.d(s, t) for (s, t), f in self.flows.items()),
                   start=Fraction(0) if space.mode == EXACT else 0.0)


@dataclass
class StepFunction:
    """Piecewise-constant function on intervals between sorted breakpoints."""

    breakpoints: List[Num]
    values: List[Num]  # one per open interval, len(breakpoints) - 1

    def __call__(self, t) -> Num:
        for i in range(len(self.values)):
            if self.breakpoints[i] < t < self.breakpoints[i + 1]:
                return self.values[i]
        return 0

    def integral_abs(self) -> Num:
        total = 0
        for i, v in enumerate(self.values):
            total += abs(v) * (self.breakpoints[i + 1] - self.breakpoints[i])
        return total


# ---------------------------------------------------------------------------
# transportation simplex (generic arithmetic)


def _northwest_corner(supply: list, demand: list):
    m, n = len(supply), len(demand)
    s_rem, d_rem = list(supply), list(demand)
    basis: list = []
    flows: dict = {}
    i = j = 0
    while True:
        if i == m - 1 and j == n - 1:
            basis.append((i, j))
            flows[(i, j)] = s_rem[i]
            break
        f = min(s_rem[i], d_rem[j])
        basis.append((i, j))
        flows[(i, j)] = f
        s_rem[i] -= f
        d_rem[j] -= f
        if s_rem[i] == 0 and i < m - 1:
            i += 1
        else:
            j += 1
    return basis, flows


def _tree_potentials(basis, m, n, cost):
    """Solve u_i + v_j = c_ij on the basis spanning tree, u_0 = 0."""
    adj: dict = {k: [] for k in range(m + n)}
    for (i, j) in basis:
        adj[i].append((m + j, (i, j)))
        adj[m + j].append((i, (i, j)))
    u = [None] * m
    v = [None] * n
    u[0] = 0 * cost[0][0]  # zero of the right arithmetic type
    stack = [0]
    seen = {0}
    while stack:
        node = stack.pop()
        for nxt, (i, j) in adj[node]:
            if nxt in seen:
                continue
            seen.add(nxt)
            if nxt >= m:
                v[nxt - m] = cost[i][j] - u[i]
            else:
                u[nxt] = cost[i][j] - v[j]
            stack.append(nxt)
    if any(x is None for x in u) or any(x is None for x in v):
        raise SolverFailure("basis graph is not spanning")
    return u, v, adj


def _find_cycle(adj, m, src, dst):
    """Path of basic cells linking source node src to sink node m+dst."""
    parent = {src: None}
    stack = [src]
    while stack:
        node = stack.pop()
        if node == m + dst:
            break
        for nxt, cell in adj[node]:
            if nxt not in parent:
                parent[nxt] = (node, cell)
                stack.append(nxt)
    path_cells = []
    node = m + dst
    while parent[node] is not None:
        node, cell = parent[node]
        path_cells.append(cell)
    path_cells.reverse()
    return path_cells


def _transportation_simplex(supply: list, demand: list, cost: list,
                            exact: bool):
    """Dense transportation simplex; Dantzig entering with a Bland fallback
    after degenerate stalls.  Works unchanged on Fractions and floats."""
    m, n = len(supply), len(demand)
    basis, flows = _northwest_corner(supply, demand)
    basis_set = set(basis)
    tol = 0 if exact else 1e-12 * max(1.0, max(max(float(c) for c in row)
                                               for row in cost))
    cost_arr = None if exact else np.asarray(cost, dtype=float)
    max_iter = 200 * (m + n) + 2000
    degenerate_streak = 0
    bland = False
    for _ in range(max_iter):
        u, v, adj = _tree_potentials(basis, m, n, cost)
        entering = None
        if exact or bland:
            best = -tol
            for i in range(m):
                for j in range(n):
                    if (i, j) in basis_set:
                        continue
                    red = cost[i][j] - u[i] - v[j]
                    if red < best:
                        if bland:
                            entering = (i, j)
                            break
                        best = red
                        entering = (i, j)
                if bland and entering:
                    break
        else:
            red = cost_arr - np.asarray([float(x) for x in u])[:, None] \
                - np.asarray([float(x) for x in v])[None, :]
            for (bi, bj) in basis:
                red[bi, bj] = np.inf
            flat = int(np.argmin(red))
            i, j = divmod(flat, n)
            if red[i, j] < -max(tol, 1e-12):
                entering = (i, j)
        if entering is None:
            value = sum((flows[c] * cost[c[0]][c[1]] for c in basis),
                        start=0 * cost[0][0])
            return flows, basis, value
        path = _find_cycle(adj, m, entering[0], entering[1])
        minus = path[0::2]  # alternate signs starting after the entering cell
        theta = min(flows[c] for c in minus)
        leaving = next(c for c in minus if flows[c] == theta)
        flows[entering] = 0 * cost[0][0]
        basis.append(entering)
        basis_set.add(entering)
        sign = -1
        for cell in path:
            flows[cell] = flows[cell] + sign * theta
            if not exact and -1e-9 < float(flows[cell]) < 0:
                flows[cell] = 0.0
            sign = -sign
        flows[entering] += theta
        basis.remove(leaving)
        basis_set.remove(leaving)
        del flows[leaving]
        if theta == 0:
            degenerate_streak += 1
            if degenerate_streak > 3 * (m + n):
                bland = True
        else:
            degenerate_streak = 0
    raise SolverFailure("transportation simplex did not converge")


def _auto_rational(mu: Molecule, cap: int, rational: Optional[bool]) -> bool:
    if rational is not None:
        return rational
    if mu.space.mode != EXACT:
        return False
    if not all(isinstance(c, (Fraction, int)) for c in mu.terms.values()):
        return False
    return len(mu.terms) + 1 <= cap


def norm_flow(mu: Molecule, rational: Optional[bool] = None
              ) -> Tuple[Num, TransportPlan]:
    """Free-space norm as optimal transport cost over supp(mu) + base.

    Metric costs let every unit of flow travel directly from its source to
    its sink (intermediate stops never help), so the problem reduces to a
    dense transportation tableau.
    """
    space = mu.space
    if mu.is_zero:
        zero = Fraction(0) if space.mode == EXACT else 0.0
        return zero, TransportPlan({}, zero)
    exact = _auto_rational(mu, EXACT_FLOW_AUTO_CAP, rational)
    balance: Dict[str, Num] = dict(mu.terms)
    total = sum(mu.terms.values())
    balance[space.base] = balance.get(space.base, 0) - total
    if exact:
        balance = {lab: Fraction(c) for lab, c in balance.items()}
    else:
        balance = {lab: float(c) for lab, c in balance.items()}
    order = {lab: k for k, lab in enumerate(space.labels)}
    sources = sorted((lab for lab, c in balance.items() if c > 0),
                     key=order.__getitem__)
    sinks = sorted((lab for lab, c in balance.items() if c < 0),
                   key=order.__getitem__)
    if not sources or not sinks:
        zero = Fraction(0) if exact else 0.0
        return zero, TransportPlan({}, zero)
    supply = [balance[lab] for lab in sources]
    demand = [-balance[lab] for lab in sinks]
    if exact:
        cost = [[Fraction(space.d(s, t)) for t in sinks] for s in sources]
    else:
        cost = [[float(space.d(s, t)) for t in sinks] for s in sources]
    flows, _, value = _transportation_simplex(supply, demand, cost, exact)
    plan = {(sources[i], sinks[j]): f for (i, j), f in flows.items() if f != 0}
    return value, TransportPlan(plan, value)


# ---------------------------------------------------------------------------
# dual LP


def _dual_lp_float(space: FiniteMetricSpace, labels: Sequence[str],
                   coeffs: Sequence[float]):
    s = len(labels)
    idx = [space.index(lab) for lab in labels]
    if space.mode == EXACT:
        dmat = np.array([[float(space._dist[a][b]) for b in idx] for a in idx])
        d0 = np.array([float(space._dist[a][space.index(space.base)])
                       for a in idx])
    else:
        dmat = space._dist[np.ix_(idx, idx)]
        d0 = space._dist[np.ix_(idx, [space.index(space.base)])].ravel()
    iu, ju = np.triu_indices(s, 1)
    npairs = len(iu)
    if npairs:
        rows = np.repeat(np.arange(2 * npairs), 2)
        cols = np.empty(4 * npairs, dtype=int)
        vals = np.empty(4 * npairs)
        cols[0::4], cols[1::4] = iu, ju
        cols[2::4], cols[3::4] = iu, ju
        vals[0::4], vals[1::4] = 1.0, -1.0
        vals[2::4], vals[3::4] = -1.0, 1.0
        b = np.empty(2 * npairs)
        b[0::2] = dmat[iu, ju]
        b[1::2] = dmat[iu, ju]
        a_ub = csr_matrix((vals, (rows, cols)), shape=(2 * npairs, s))
    else:
        a_ub, b = None, None
    res = linprog(-np.asarray(coeffs, dtype=float), A_ub=a_ub, b_ub=b,
                  bounds=list(zip(-d0, d0)), method="highs")
    if res.status != 0:
        raise SolverFailure(f"dual LP failed: {res.message}")
    return -float(res.fun), {lab: float(x) for lab, x in zip(labels, res.x)}


def _dual_lp_exact(space: FiniteMetricSpace, labels: Sequence[str],
                   coeffs: Sequence[Fraction]):
    import sympy
    from sympy.solvers.simplex import lpmax

    s = len(labels)
    us = sympy.symbols(f"u0:{s}")
    constraints = []
    for a in range(s):
        d0 = sympy.Rational(Fraction(space.d(labels[a], space.base)))
        constraints.append(us[a] <= d0)
        constraints.append(us[a] >= -d0)
        for b in range(a + 1, s):
            dab = sympy.Rational(Fraction(space.d(labels[a], labels[b])))
            constraints.append(us[a] - us[b] <= dab)
            constraints.append(us[b] - us[a] <= dab)
    objective = sum(sympy.Rational(Fraction(c)) * u
                    for c, u in zip(coeffs, us))
    try:
        opt, sol = lpmax(objective, constraints)
    except Exception as exc:  # infeasibility is impossible; numeric only
        raise SolverFailure(f"exact dual LP failed: {exc}") from exc
    value = Fraction(int(opt.p), int(opt.q)) if opt.is_Rational else Fraction(str(opt))
    potential = {}
    for lab, u in zip(labels, us):
        r = sympy.Rational(sol[u])
        potential[lab] = Fraction(int(r.p), int(r.q))
    return value, potential


def norm_dual_lp(mu: Molecule, rational: Optional[bool] = None):
    """Free-space norm as the optimal Lipschitz potential on supp(mu) + base.

    Returns (value, LipFunction on the restricted subspace).  The potential
    is a genuine dual certificate: feasible with objective equal to the norm.
    """
    from .functions import LipFunction

    space = mu.space
    sup_labels = [lab for lab in space.labels if lab in mu.terms]
    restricted = space.restrict(sup_labels)
    if mu.is_zero:
        zero = Fraction(0) if space.mode == EXACT else 0.0
        return zero, LipFunction(restricted, {space.base: zero})
    exact = _auto_rational(mu, EXACT_LP_AUTO_CAP, rational)
    coeffs = [mu.terms[lab] for lab in sup_labels]
    if exact:
        value, potential = _dual_lp_exact(space, sup_labels,
                                          [Fraction(c) for c in coeffs])
        zero = Fraction(0)
    else:
        value, potential = _dual_lp_float(space, sup_labels,
                                          [float(c) for c in coeffs])
        zero = 0.0
    potential[space.base] = zero
    return value, LipFunction(restricted, potential)


# ---------------------------------------------------------------------------
# line oracle


def _validate_line_positions(space: FiniteMetricSpace, positions: Mapping,
                             labels: Sequence[str]) -> None:
    if positions.get(space.base, None) != 0:
        raise NotALineSpace("base must sit at position 0")
    exact = space.mode == EXACT
    tol = 1e-9
    pts = [space.base] + [lab for lab in labels if lab != space.base]
    for i, a in enumerate(pts):
        if a not in positions:
            raise NotALineSpace(f"no position for {a!r}")
        for b in pts[i + 1:]:
            want = space.d(a, b)
            got = abs(positions[a] - positions[b])
            bad = (got != want) if exact else (
                abs(float(got) - float(want)) > tol * max(1.0, abs(float(want))))
            if bad:
                raise NotALineSpace(
                    f"|pos({a}) - pos({b})| = {got} but d = {want}")


def norm_line(mu: Molecule, positions: Optional[Mapping[str, Num]] = None
              ) -> Tuple[Num, StepFunction]:
    """Exact norm through the line isometry: integrate |Phi(mu)|.

    Phi maps delta(x) to the indicator of [0, x] (negated for x < 0), so
    Phi(mu) is constant between consecutive support positions.  Exact in
    exact mode; must agree with the LP and flow routes.
    """
    space = mu.space
    if positions is None:
        positions = infer_line_positions(space)
    _validate_line_positions(space, positions, sorted(mu.terms))
    zero = Fraction(0) if space.mode == EXACT else 0.0
    if mu.is_zero:
        return zero, StepFunction([zero, zero], [zero])
    pts = sorted({positions[lab] for lab in mu.terms} | {zero})
    coeff_at = {positions[lab]: mu.terms[lab] for lab in mu.terms}
    values = []
    for k in range(len(pts) - 1):
        lo, hi = pts[k], pts[k + 1]
        if lo >= 0:
            val = sum(c for p, c in coeff_at.items() if p >= hi)
        else:
            val = -sum(c for p, c in coeff_at.items() if p <= lo)
        values.append(val)
    step = StepFunction(list(pts), values)
    return step.integral_abs(), step


# ---------------------------------------------------------------------------
# dispatch


def norm(mu: Molecule, method: str = "all",
         positions: Optional[Mapping[str, Num]] = None,
         rational: Optional[bool] = None, tol: float = REL_TOL) -> dict:
    """Compute the norm by the requested route(s); 'all' reports the gap."""
    out: dict = {"method": method}
    if method in ("lp", "all"):
        v, potential = norm_dual_lp(mu, rational=rational)
        out["lp"] = v
        out["potential_lip"] = potential.lip_constant()
    if method in ("flow", "all"):
        v, plan = norm_flow(mu, rational=rational)
        out["flow"] = v
        out["plan_defect"] = plan.conservation_defect(mu)
    if method == "line" or (method == "all" and positions is not None):
        try:
            v, _ = norm_line(mu, positions=positions)
            out["line"] = v
        except NotALineSpace:
            if method == "line":
                raise
    if method == "all":
        vals = [float(out[k]) for k in ("lp", "flow", "line") if k in out]
        spread = max(vals) - min(vals)
        out["gap"] = spread / max(1.0, max(abs(v) for v in vals))
    for key in ("line", "flow", "lp"):
        if key in out:
            out["norm"] = out[key]
            break
    return out
