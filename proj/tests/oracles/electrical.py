"""Resistances and flow energies computed with scipy on independently built graphs."""
import itertools
import sys

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from fractions import Fraction

from constructions import souvlaki, meatball


def reff(nodes, edges, src, sinks):
    """edges: (u, v, conductance). Sources shorted, sinks grounded."""
    idx = {v: i for i, v in enumerate(nodes)}
    n = len(nodes)
    rows, cols, vals = [], [], []
    for u, v, c in edges:
        a, b = idx[u], idx[v]
        rows += [a, b, a, b]
        cols += [a, b, b, a]
        vals += [c, c, -c, -c]
    L = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    g = {idx[s] for s in sinks}
    keep = [i for i in range(n) if i not in g]
    pos = {i: k for k, i in enumerate(keep)}
    Lr = L[keep][:, keep].tocsc()
    b = np.zeros(len(keep))
    b[pos[idx[src]]] = 1.0
    x = spla.spsolve(Lr, b)
    return x[pos[idx[src]]]


def gadget(n, subdivided=False):
    nodes, edges = [], []
    lv = {i: [(i, x) for x in range(2 ** (n - abs(i)))] for i in range(-n, n + 1)}
    for i in lv:
        nodes += lv[i]
    for i in range(-n, n):
        a = min(abs(i), abs(i + 1))
        r = 2 ** (n - a)
        for u in lv[i]:
            for v in lv[i + 1]:
                if not subdivided:
                    edges.append((u, v, 1.0 / r))
                else:
                    prev = u
                    for s in range(1, r):
                        m = ("sub", u, v, s)
                        nodes.append(m)
                        edges.append((prev, m, 1.0))
                        prev = m
                    edges.append((prev, v, 1.0))
    return nodes, edges, lv[n][0], lv[-n][0]


def lumped_souvlaki(N):
    """Cocircular classes as single vertices with bundled conductances."""
    nodes, edges = set(), []
    a = 0
    for n in range(1, N + 1):
        b = 3 * 2 ** n
        w = [(0, b)]
        for _ in range(n):
            w.append((2 * w[-1][0] - 1, 2 * w[-1][1] + 1))
        def name(h, k):
            return ("s", a + k) if h == 0 else (n, h, k)
        for h in range(n + 1):
            lo, hi = w[h]
            for k in range(lo, hi + 1):
                nodes.add(name(h, k))
                if k < hi and (h > 0 or n == 1 or k >= 2 ** n - 1):
                    edges.append((name(h, k), name(h, k + 1), 3.0 ** h + (2 * 3.0 ** h if h else 0)))
                if h < n:
                    edges.append((name(h, k), name(h + 1, 2 * k), 3.0 ** (h + 1)))
        a += b + 1 - 2 ** (n + 1)
    last = a - 1 + 2 ** (N + 1)
    return sorted(nodes, key=str), edges, last


def atomic_energy(n, j, bottom_count):
    """Direct sum over path edges of the capped atomic flow (exact rationals)."""
    H = min(j, n)
    xl = 2 ** n - j
    xr1 = bottom_count - 2 ** (n + 1) - 1 + 2 * j - 1
    unit = Fraction(1, 2 ** n)
    e_out = sum(3 ** h * (unit / 3 ** h) ** 2 for h in range(1, H + 1))
    e_in = sum(2 * 3 ** h * (unit / 2 / 3 ** h) ** 2 for h in range(1, H + 1))
    a = unit / 3 ** H
    e_mid = 3 ** H * (2 ** H * (xr1 - xl) * a ** 2 + 2 ** H * (a / 2) ** 2)
    return e_out, e_mid, e_in


if __name__ == "__main__" and "--dyadic" in sys.argv:
    # deepest grid level of the dyadic graph: cube grid of side 2^n, opposite corners
    for n in range(1, 6):
        s = 2 ** n
        nodes = list(itertools.product(range(s), repeat=3))
        edges = []
        for a, b, c in nodes:
            for d in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
                x = (a + d[0], b + d[1], c + d[2])
                if max(x) < s:
                    edges.append(((a, b, c), x, 1.0))
        print("dyadic-grid", n, repr(reff(nodes, edges, (0, 0, 0), [(s - 1, s - 1, s - 1)])))

elif __name__ == "__main__":
    for n in range(1, 9):
        nodes, edges, p, q = gadget(n)
        print("gadget", n, repr(reff(nodes, edges, p, [q])))
    for n in range(1, 4):
        nodes, edges, p, q = gadget(n, True)
        print("gadget-sub", n, repr(reff(nodes, edges, p, [q])))
    for n, j in ((2, 1), (2, 4), (3, 5)):
        eo, em, ei = atomic_energy(n, j, 3 * 2 ** n + 1)
        print("atomic", n, j, eo, em, ei, float(eo + em + ei))
    for n in range(1, 7):
        tot = sum(sum(atomic_energy(n, j, 3 * 2 ** n + 1)) for j in range(1, 2 ** n + 1))
        print("g(n)", n, repr(float(tot)), repr(float(tot * 2 ** n)))
    for N in range(2, 5):
        g, offs = souvlaki(N)
        last = max(x for (t, x, *r) in g.nodes if t == "s")
        bnd = [("s", x) for x in range(last - 2 ** (N + 1) + 1, last + 1)]
        full = reff(list(g.nodes), [(u, v, 1.0) for u, v in g.edges], ("s", 0), bnd)
        ln, le, ll = lumped_souvlaki(N)
        lump = reff(ln, le, ("s", 0), [("s", x) for x in range(ll - 2 ** (N + 1) + 1, ll + 1)])
        print("souvlaki-reff", N, repr(full), repr(lump))
    for N in (5, 6):
        ln, le, ll = lumped_souvlaki(N)
        print("souvlaki-reff", N, repr(reff(ln, le, ("s", 0), [("s", x) for x in range(ll - 2 ** (N + 1) + 1, ll + 1)])))
    # flow energy of the union with the 1/2 feeder on the first skewer edge
    for N in range(2, 7):
        tot = Fraction(1, 4) + sum(sum(sum(atomic_energy(n, j, 3 * 2 ** n + 1)) for j in range(1, 2 ** n + 1))
                                   for n in range(1, N + 1))
        print("souvlaki-energy", N, repr(float(tot)))
