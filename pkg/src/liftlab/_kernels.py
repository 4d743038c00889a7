"""Compiled inner loops for the per-trial hot paths."""

import numpy as np
from numba import njit


@njit(cache=True)
def permutation_cycles(perm):
    """Cycle labels of ``perm``, numbered by smallest element, and those elements."""
    n = perm.size
    labels = np.full(n, -1, np.int64)
    firsts = np.empty(n, np.int64)
    c = 0
    for j in range(n):
        if labels[j] < 0:
            firsts[c] = j
            x = j
            while labels[x] < 0:
                labels[x] = c
                x = perm[x]
            c += 1
    return c, labels, firsts[:c].copy()


@njit(cache=True)
def _walk(k, h, perms, alive, labels, i, j, c):
    """Label alive vertices after (i, j) along the cycle with c; return count."""
    n = 0
    while True:
        j = perms[i, j]
        i = i + 1 if i + 1 < k else 0
        v = i * h + j
        if not alive[v] or labels[v] >= 0:
            return n
        labels[v] = c
        n += 1


@njit(cache=True)
def cycle_part_chunks(k, h, perms, alive):
    """Components of the lifted k-cycle restricted to ``alive`` vertices.

    ``perms[i]`` maps fibre i to fibre i+1 (mod k).  A component is either
    the path following a dead vertex or a whole cycle with no dead vertex.
    Labels are numbered by smallest vertex; dead vertices get -1.
    """
    size = k * h
    labels = np.full(size, -1, np.int64)
    c = 0
    for i in range(k):
        for j in range(h):
            if not alive[i * h + j] and _walk(k, h, perms, alive, labels, i, j, c) > 0:
                c += 1
    for i in range(k):
        for j in range(h):
            v = i * h + j
            if alive[v] and labels[v] < 0:
                labels[v] = c
                _walk(k, h, perms, alive, labels, i, j, c)
                c += 1
    smallest = np.full(c, size, np.int64)
    for v in range(size):
        if labels[v] >= 0 and smallest[labels[v]] == size:
            smallest[labels[v]] = v
    remap = np.empty(c, np.int64)
    remap[np.argsort(smallest)] = np.arange(c)
    for v in range(size):
        if labels[v] >= 0:
            labels[v] = remap[labels[v]]
    return c, labels


@njit(cache=True)
def _find(parent, parity, x):
    root = x
    p = 0
    while parent[root] != root:
        p ^= parity[root]
        root = parent[root]
    y = x
    py = p
    while parent[y] != y:
        nxt = parent[y]
        pn = py ^ parity[y]
        parent[y] = root
        parity[y] = py
        y = nxt
        py = pn
    return root, p


@njit(cache=True)
def forest_parity(n, us, vs):
    """Union-find with parity over the edges (us[e], vs[e]) on n vertices.

    Returns the number of edges closing a cycle and, for every vertex, its
    parity relative to its tree's root (a proper 2-colouring if the count is 0).
    """
    parent = np.arange(n)
    parity = np.zeros(n, np.int8)
    rank = np.zeros(n, np.int32)
    cycles = 0
    for e in range(us.size):
        ru, pu = _find(parent, parity, us[e])
        rv, pv = _find(parent, parity, vs[e])
        if ru == rv:
            cycles += 1
            continue
        if rank[ru] < rank[rv]:
            ru, rv = rv, ru
        parent[rv] = ru
        parity[rv] = pu ^ pv ^ 1
        if rank[ru] == rank[rv]:
            rank[ru] += 1
    out = np.empty(n, np.int8)
    for x in range(n):
        out[x] = _find(parent, parity, x)[1]
    return cycles, out
