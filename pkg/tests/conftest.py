"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the library's solver code paths:
norms come from enumerating spanning-tree potentials (LP vertices),
measures from an event-count sweep, constants from raw pairwise scans.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import pytest

from freelip.molecule import Molecule
from freelip.space import FiniteMetricSpace


def axiom_scan(space: FiniteMetricSpace, slack=0) -> bool:
    labs = space.labels
    for i, a in enumerate(labs):
        if space.d(a, a) != 0:
            return False
        for b in labs[i + 1:]:
            if space.d(a, b) != space.d(b, a) or not space.d(a, b) > 0:
                return False
    for a in labs:
        for b in labs:
            for c in labs:
                if space.d(a, b) > space.d(a, c) + space.d(c, b) + slack:
                    return False
    return True


def brute_norm(mu: Molecule):
    """LP-vertex oracle for tiny molecules (support + base <= 6 points).

    The dual optimum sits at a vertex of the potential polytope; every
    vertex is pinned by a spanning tree of tight constraints with sign
    choices, so enumerating tree assignments and filtering feasibility
    finds the exact maximum.
    """
    space = mu.space
    nodes = [space.base] + sorted(mu.terms)
    n = len(nodes)
    assert n <= 6, "oracle is exponential; keep instances tiny"
    if n == 1:
        return Fraction(0) if space.mode == "exact" else 0.0
    edges = list(itertools.combinations(range(n), 2))
    best = None
    for tree in itertools.combinations(edges, n - 1):
        # connectivity check via union-find
        parent = list(range(n))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        ok = True
        for i, j in tree:
            ri, rj = find(i), find(j)
            if ri == rj:
                ok = False
                break
            parent[ri] = rj
        if not ok:
            continue
        adjacency = {i: [] for i in range(n)}
        for i, j in tree:
            adjacency[i].append(j)
            adjacency[j].append(i)
        for signs in itertools.product((1, -1), repeat=n - 1):
            sign_of = dict(zip(tree, signs))
            u = {0: Fraction(0) if space.mode == "exact" else 0.0}
            stack = [0]
            while stack:
                i = stack.pop()
                for j in adjacency[i]:
                    if j in u:
                        continue
                    edge = (i, j) if (i, j) in sign_of else (j, i)
                    d = space.d(nodes[i], nodes[j])
                    step = sign_of[edge] * d
                    u[j] = u[i] + (step if edge == (i, j) else -step)
                    stack.append(j)
            feasible = all(
                abs(u[i] - u[j]) <= space.d(nodes[i], nodes[j])
                for i, j in edges)
            if not feasible:
                continue
            value = sum(mu.terms[nodes[i]] * u[i] for i in range(1, n))
            if best is None or value > best:
                best = value
    return best


def sweep_measure_oracle(distances, eps):
    """Event-count measure of the union of [d - eps, d + eps] cap [0, inf)."""
    events = []
    for d in distances:
        lo = max(0 * eps, d - eps)
        events.append((lo, 1))
        events.append((d + eps, -1))
    events.sort(key=lambda t: (float(t[0]), -t[1]))
    depth = 0
    total = 0 * eps
    last = None
    for coord, delta in events:
        if depth > 0 and last is not None:
            total += coord - last
        depth += delta
        last = coord
    return total


@pytest.fixture
def path_space_3():
    """d(0,a) = d(0,b) = 1, d(a,b) = 2: the concatenated segment."""
    from freelip.space import validate_space
    return validate_space("path3", ["0", "a", "b"], "0",
                          [[0, 1, 1], [1, 0, 2], [1, 2, 0]])
