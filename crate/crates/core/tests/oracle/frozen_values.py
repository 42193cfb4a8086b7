"""Reference values for tests/frozen.rs.

Families are enumerated by brute force and each modulus is solved as a
generic convex program with cvxpy, independent of the Rust solver.

    python3 crates/core/tests/oracle/frozen_values.py
"""

import itertools

import cvxpy as cp
import networkx as nx
import numpy as np

EDGES = [
    ("a", "b", 1.0),
    ("a", "c", 2.0),
    ("b", "c", 0.5),
    ("b", "d", 1.5),
    ("c", "d", 1.0),
    ("c", "e", 0.75),
    ("d", "e", 2.5),
]
VERTS = sorted({u for u, _, _ in EDGES} | {v for _, v, _ in EDGES})
M = len(EDGES)
SIGMA = np.array([w for _, _, w in EDGES])

EXPLICIT_ROWS = [
    {0: 1, 1: 1},
    {1: 2, 2: 1},
    {0: 1, 2: 1, 3: 1},
    {3: 2},
]
EXPLICIT_SIGMA = np.array([1.0, 0.5, 2.0, 1.0])


def graph():
    g = nx.Graph()
    for i, (u, v, w) in enumerate(EDGES):
        g.add_edge(u, v, id=i, w=w)
    return g


def paths(a, b):
    g = graph()
    rows = []
    for p in nx.all_simple_paths(g, a, b):
        r = np.zeros(M)
        for u, v in zip(p, p[1:]):
            r[g[u][v]["id"]] = 1
        rows.append(r)
    return np.array(rows)


def minimal_cuts(a, b):
    others = [v for v in VERTS if v not in (a, b)]
    cuts = set()
    for k in range(len(others) + 1):
        for extra in itertools.combinations(others, k):
            s = {a, *extra}
            cuts.add(frozenset(i for i, (u, v, _) in enumerate(EDGES) if (u in s) != (v in s)))
    minimal = [c for c in cuts if not any(d < c for d in cuts)]
    return np.array([[1.0 if i in c else 0.0 for i in range(M)] for c in minimal])


def trees():
    rows = []
    for combo in itertools.combinations(range(M), len(VERTS) - 1):
        t = nx.Graph()
        t.add_nodes_from(VERTS)
        t.add_edges_from((EDGES[i][0], EDGES[i][1]) for i in combo)
        if nx.is_connected(t):
            rows.append([1.0 if i in combo else 0.0 for i in range(M)])
    return np.array(rows)


def modulus(n, sigma, p):
    rho = cp.Variable(n.shape[1], nonneg=True)
    prob = cp.Problem(cp.Minimize(sigma @ cp.power(rho, p)), [n @ rho >= 1])
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-10, tol_gap_rel=1e-10, tol_feas=1e-10)
    return prob.value


def vertices(n):
    """Extreme points of {x >= 0 : n x >= 1} by basis enumeration."""
    m = n.shape[1]
    a = np.vstack([n, np.eye(m)])
    rhs = np.concatenate([np.ones(len(n)), np.zeros(m)])
    out = []
    for basis in itertools.combinations(range(len(a)), m):
        sub = a[list(basis)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        x = np.linalg.solve(sub, rhs[list(basis)])
        if (a @ x >= rhs - 1e-9).all() and not any(np.allclose(x, y) for y in out):
            out.append(x)
    return sorted(out, key=tuple)


def effective_resistance(a, b):
    idx = {v: i for i, v in enumerate(VERTS)}
    lap = np.zeros((len(VERTS), len(VERTS)))
    for u, v, w in EDGES:
        i, j = idx[u], idx[v]
        lap[i, i] += w
        lap[j, j] += w
        lap[i, j] -= w
        lap[j, i] -= w
    e = np.zeros(len(VERTS))
    e[idx[a]], e[idx[b]] = 1, -1
    return e @ np.linalg.pinv(lap) @ e


if __name__ == "__main__":
    for p in (1.5, 2.0, 3.0):
        print(f"connect(a,e) p={p}: {modulus(paths('a', 'e'), SIGMA, p):.12f}")
    print(f"cut(a,e) p=2: {modulus(minimal_cuts('a', 'e'), SIGMA, 2.0):.12f}")
    for p in (2.0, 3.0):
        print(f"trees p={p}: {modulus(trees(), SIGMA, p):.12f}")
    print(f"R_eff(a,e): {effective_resistance('a', 'e'):.12f}")
    print(f"R_eff(b,d): {effective_resistance('b', 'd'):.12f}")
    n = np.array([[r.get(e, 0.0) for e in range(4)] for r in EXPLICIT_ROWS])
    for p in (1.5, 2.0, 3.0):
        print(f"explicit p={p}: {modulus(n, EXPLICIT_SIGMA, p):.12f}")
    vs = vertices(n)
    for v in vs:
        print("explicit blocker vertex:", np.round(v, 12).tolist())
    print(f"explicit Mod_1: {min(EXPLICIT_SIGMA @ v for v in vs):.12f}")
    print(f"tree count: {len(trees())}")
