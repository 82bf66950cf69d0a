"""Exact walk quantities via scipy on networkx-built graphs."""
import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from constructions import h2, meatball, souvlaki
from electrical import reff


def harmonic(g, fixed):
    """fixed: dict vertex -> value. Returns dict for all vertices."""
    nodes = list(g.nodes)
    idx = {v: i for i, v in enumerate(nodes)}
    A = nx_adj(g, nodes)
    free = [i for i, v in enumerate(nodes) if v not in fixed]
    fix = [i for i, v in enumerate(nodes) if v in fixed]
    deg = np.asarray(A.sum(axis=1)).ravel()
    L = sp.diags(deg) - A
    Lff = L[free][:, free].tocsc()
    b = -L[free][:, fix] @ np.array([fixed[nodes[i]] for i in fix])
    x = spla.spsolve(Lff, b)
    out = {nodes[i]: x[k] for k, i in enumerate(free)}
    out.update(fixed)
    return out


def nx_adj(g, nodes):
    import networkx as nx
    return nx.to_scipy_sparse_array(g, nodelist=nodes, format="csr").astype(float)


def roof(n):
    g = meatball(n, 3 * 2 ** n)
    S = [(None, 0, 0, k) for k in range(3 * 2 ** n + 1)]
    F = [v for v in g.nodes if v[1] == n]
    fixed = {v: 0.0 for v in S}
    fixed.update({v: 1.0 for v in F})
    h = harmonic(g, fixed)
    L = S[: 2 ** n]
    return [sum(h[w] for w in g[v]) / g.degree(v) for v in L]


def escape_h2(r):
    g = h2(r)
    bnd = [(r, c) for c in range(3 ** r)]
    R = reff(list(g.nodes), [(u, v, 1.0) for u, v in g.edges], (0, 0), bnd)
    return 1.0 / (g.degree((0, 0)) * R)


def occupation(N, T):
    import networkx as nx
    g, _ = souvlaki(N)
    nodes = list(g.nodes)
    A = nx_adj(g, nodes)
    deg = np.asarray(A.sum(axis=1)).ravel()
    P = (sp.diags(1 / deg) @ A).T.tocsr()
    on = np.array([1.0 if v[0] == "s" else 0.0 for v in nodes])
    p = np.zeros(len(nodes))
    p[nodes.index(("s", 0))] = 1
    acc = 0.0
    for _ in range(T):
        p = P @ p
        acc += on @ p
    return acc / T


if __name__ == "__main__":
    for n in (2, 3, 4):
        r = roof(n)
        print("roof", n, repr(min(r)), [round(x, 12) for x in r])
    for r in range(1, 7):
        print("escape-h2", r, repr(escape_h2(r)))
    print("occupation", repr(occupation(3, 10000)))
