"""Cut-system complexes: vertices, elementary moves, 2-cells, and queries.

The 1-skeleton has cut systems of size k as vertices and elementary moves as
edges; triangle, rectangle, and pentagon cells are detected from their
defining curve data (never by cycle search, which misidentifies coincidental
short cycles).  The Schmutz graph, the curve complex as a disjointness graph,
BFS distances, exact diameters, and Betti numbers of the finite shadows round
out the toolkit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import intlin
from .sympcurves import f2_pairing


class NotFound(KeyError):
    pass


class InfiniteDiameter(ValueError):
    pass


class NeedsSeed(ValueError):
    pass


def vertex_of(universe, curves):
    return tuple(sorted(curves, key=universe.key))


def is_move(universe, v, w, context=()):
    """Elementary move: swap one curve for another meeting it exactly once."""
    sv, sw = set(v), set(w)
    out = sv - sw
    into = sw - sv
    if len(out) != 1 or len(into) != 1:
        return False
    a, b = next(iter(out)), next(iter(into))
    if universe.inter(a, b) != 1:
        return False
    return universe.cut_ok(v, context) and universe.cut_ok(w, context)


@dataclass(frozen=True)
class Move:
    source: tuple
    target: tuple
    out_curve: object
    in_curve: object


@dataclass(frozen=True)
class Cell:
    kind: str  # triangle | rectangle | pentagon
    cycle: tuple  # boundary vertices in cyclic order

    def __len__(self):
        return len(self.cycle)


class ComplexGraph:
    """Immutable 2-complex: vertex list, adjacency, and cell list."""

    def __init__(self, universe, k, vertices, edges, cells, tag=None):
        self.universe = universe
        self.k = k
        self.vertices = sorted(vertices, key=lambda v: tuple(universe.key(c) for c in v))
        self.index = {v: i for i, v in enumerate(self.vertices)}
        self.adj = {v: [] for v in self.vertices}
        self.edges = []
        for v, w in edges:
            if self.index[v] > self.index[w]:
                v, w = w, v
            self.edges.append((v, w))
            self.adj[v].append(w)
            self.adj[w].append(v)
        self.edges = sorted(set(self.edges), key=lambda e: (self.index[e[0]], self.index[e[1]]))
        for v in self.adj:
            self.adj[v] = sorted(set(self.adj[v]), key=self.index.get)
        self.cells = cells
        self.tag = tag or getattr(universe, "tag", "?")

    def degree(self, v):
        return len(self.adj[v])

    # -- exports ---------------------------------------------------------

    def _curve_json(self, c):
        return c.to_json() if hasattr(c, "to_json") else c

    def to_json(self):
        vid = self.index
        return {
            "backend": self.tag,
            "k": self.k,
            "vertices": [[self._curve_json(c) for c in v] for v in self.vertices],
            "edges": [[vid[a], vid[b]] for a, b in self.edges],
            "cells": [
                {"kind": c.kind, "cycle": [vid[v] for v in c.cycle]} for c in self.cells
            ],
        }

    def to_dot(self):
        vid = self.index
        lines = ["graph complex {"]
        for v in self.vertices:
            label = ",".join(str(c) for c in v)
            lines.append(f'  n{vid[v]} [label="{label}"];')
        for a, b in self.edges:
            lines.append(f"  n{vid[a]} -- n{vid[b]};")
        for c in self.cells:
            lines.append(f"  // {c.kind}: {[vid[v] for v in c.cycle]}")
        lines.append("}")
        return "\n".join(lines)


def _enumerate_vertices(universe, k):
    curves = list(universe.all_curves())
    out = []
    for combo in combinations(curves, k):
        if universe.cut_ok(combo):
            out.append(vertex_of(universe, combo))
    return out, curves


def _edges_between(universe, vertices, curves):
    vset = set(vertices)
    edges = []
    for v in vertices:
        for c in v:
            rest = tuple(x for x in v if x != c)
            for c2 in curves:
                if c2 == c or c2 in rest:
                    continue
                if universe.inter(c, c2) != 1:
                    continue
                w = vertex_of(universe, rest + (c2,))
                if w in vset and universe.key(c2) > universe.key(c):
                    if universe.cut_ok(w):
                        edges.append((v, w))
    return edges


def _triangles(universe, curves, commons):
    cells = []
    for common in commons:
        pool = [
            c
            for c in curves
            if c not in common and universe.cut_ok((c,) + tuple(common))
        ]
        for b0, b1, b2 in combinations(pool, 3):
            if (
                universe.inter(b0, b1) == 1
                and universe.inter(b0, b2) == 1
                and universe.inter(b1, b2) == 1
            ):
                cyc = tuple(vertex_of(universe, (b,) + tuple(common)) for b in (b0, b1, b2))
                cells.append(Cell("triangle", cyc))
    return cells


def _rectangles(universe, curves, commons):
    cells = []
    for common in commons:
        pool = [
            c
            for c in curves
            if c not in common and universe.cut_ok((c,) + tuple(common))
        ]
        pairs = [
            (x, y)
            for x, y in combinations(pool, 2)
            if universe.inter(x, y) == 1
        ]
        for i, (b0, b1) in enumerate(pairs):
            for c0, c1 in pairs[i + 1 :]:
                if {b0, b1} & {c0, c1}:
                    continue
                if any(universe.inter(b, c) != 0 for b in (b0, b1) for c in (c0, c1)):
                    continue
                vs = {}
                ok = True
                for b in (b0, b1):
                    for c in (c0, c1):
                        if not universe.cut_ok((b, c) + tuple(common)):
                            ok = False
                            break
                        vs[b, c] = vertex_of(universe, (b, c) + tuple(common))
                    if not ok:
                        break
                if ok:
                    cyc = (vs[b0, c0], vs[b0, c1], vs[b1, c1], vs[b1, c0])
                    cells.append(Cell("rectangle", cyc))
    return cells


def _pentagons(universe, curves, commons):
    cells = []
    seen = set()
    for common in commons:
        pool = [
            c
            for c in curves
            if c not in common and universe.cut_ok((c,) + tuple(common))
        ]
        pset = set(pool)

        def vertex_ok(x, y):
            return universe.cut_ok((x, y) + tuple(common))

        for b0 in pool:
            for b1 in pool:
                if b1 == b0 or universe.inter(b0, b1) != 1:
                    continue
                for b2 in pool:
                    if b2 in (b0, b1) or universe.inter(b1, b2) != 1:
                        continue
                    if not vertex_ok(b0, b2):
                        continue
                    for b3 in pool:
                        if b3 in (b0, b1, b2) or universe.inter(b2, b3) != 1:
                            continue
                        if not vertex_ok(b1, b3):
                            continue
                        for b4 in pset:
                            if b4 in (b0, b1, b2, b3):
                                continue
                            if (
                                universe.inter(b3, b4) != 1
                                or universe.inter(b4, b0) != 1
                            ):
                                continue
                            if not (vertex_ok(b2, b4) and vertex_ok(b3, b0) and vertex_ok(b4, b1)):
                                continue
                            bs = (b0, b1, b2, b3, b4)
                            key = frozenset(universe.key(b) for b in bs)
                            canon = _pentagon_canon(universe, bs)
                            if (key, canon) in seen:
                                continue
                            seen.add((key, canon))
                            cyc = tuple(
                                vertex_of(universe, (bs[i % 5], bs[(i + 2) % 5]) + tuple(common))
                                for i in (0, 2, 4, 1, 3)
                            )
                            cells.append(Cell("pentagon", cyc))
    return cells


def _pentagon_canon(universe, bs):
    keys = [universe.key(b) for b in bs]
    best = None
    for r in range(5):
        for step in (1, -1):
            seq = tuple(keys[(r + step * i) % 5] for i in range(5))
            if best is None or seq < best:
                best = seq
    return best


def build_gamma(universe, k, seeds=None, radius=None):
    """The complex on cut systems of size k over an enumerable universe,
    or the ball of the given radius around seed vertices otherwise."""
    if universe.enumerable:
        vertices, curves = _enumerate_vertices(universe, k)
    else:
        if seeds is None:
            raise NeedsSeed("non-enumerable universe needs seed vertices")
        vertices, curves = _ball_vertices(universe, k, seeds, radius or 0)
    edges = _edges_between(universe, vertices, curves)
    commons = [()]
    if k >= 2:
        commons = [
            tuple(c)
            for c in combinations(curves, k - 1)
            if universe.cut_ok(c)
        ]
    cells = _triangles(universe, curves, commons)
    if k >= 2:
        commons2 = (
            [()]
            if k == 2
            else [tuple(c) for c in combinations(curves, k - 2) if universe.cut_ok(c)]
        )
        cells += _rectangles(universe, curves, commons2)
        cells += _pentagons(universe, curves, commons2)
    cells = _prune_cells_to_graph(universe, vertices, edges, cells)
    return ComplexGraph(universe, k, vertices, edges, cells)


def _ball_vertices(universe, k, seeds, radius):
    """Vertices within the given move-radius of the seeds, using the seeds'
    curves as the candidate pool (bounded exploration)."""
    curves = sorted({c for v in seeds for c in v}, key=universe.key)
    vertices = {vertex_of(universe, v) for v in seeds}
    frontier = set(vertices)
    for _ in range(radius):
        new = set()
        for v in frontier:
            for c in v:
                rest = tuple(x for x in v if x != c)
                for c2 in curves:
                    if c2 == c or c2 in rest or universe.inter(c, c2) != 1:
                        continue
                    w = vertex_of(universe, rest + (c2,))
                    if w not in vertices and universe.cut_ok(w):
                        new.add(w)
        vertices |= new
        frontier = new
    return sorted(vertices, key=lambda v: tuple(universe.key(c) for c in v)), curves


def _prune_cells_to_graph(universe, vertices, edges, cells):
    vset = set(vertices)
    eset = set()
    for a, b in edges:
        eset.add((a, b))
        eset.add((b, a))
    out = []
    for cell in cells:
        cyc = cell.cycle
        if all(v in vset for v in cyc) and all(
            (cyc[i], cyc[(i + 1) % len(cyc)]) in eset for i in range(len(cyc))
        ):
            out.append(cell)
    key = lambda c: (c.kind, tuple(tuple(universe.key(x) for x in v) for v in c.cycle))
    return sorted(out, key=key)


def build_schmutz(universe):
    """Non-separating curves, edges at intersection exactly one.

    Built directly from the definition; must coincide with build_gamma(., 1).
    """
    curves = list(universe.all_curves())
    vertices = [vertex_of(universe, (c,)) for c in curves if universe.cut_ok((c,))]
    edges = []
    for (v,), (w,) in combinations([v for v in vertices], 2):
        if universe.inter(v, w) == 1:
            edges.append(((v,), (w,)))
    return ComplexGraph(universe, 1, vertices, edges, [], tag=f"{universe.tag}-schmutz")


def build_curve_graph(universe):
    """The curve complex as a disjointness graph (reporting only, no cells)."""
    curves = list(universe.all_curves())
    vertices = [(c,) for c in curves]
    edges = [
        ((u,), (w,))
        for (u,), (w,) in combinations(vertices, 2)
        if universe.inter(u, w) == 0
    ]
    return ComplexGraph(universe, 1, vertices, edges, [], tag=f"{universe.tag}-curves")


def bfs(graph, v, w):
    """Exact distance and one geodesic; (inf, None) when disconnected."""
    if v not in graph.index or w not in graph.index:
        raise NotFound("unknown vertex")
    if v == w:
        return 0, [v]
    prev = {v: None}
    frontier = [v]
    while frontier:
        nxt = []
        for x in frontier:
            for y in graph.adj[x]:
                if y not in prev:
                    prev[y] = x
                    if y == w:
                        path = [y]
                        while prev[path[-1]] is not None:
                            path.append(prev[path[-1]])
                        path.reverse()
                        return len(path) - 1, path
                    nxt.append(y)
        frontier = nxt
    return float("inf"), None


def eccentricity(graph, v):
    dist = {v: 0}
    frontier = [v]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for x in frontier:
            for y in graph.adj[x]:
                if y not in dist:
                    dist[y] = d
                    nxt.append(y)
        frontier = nxt
    if len(dist) != len(graph.vertices):
        raise InfiniteDiameter("graph is disconnected")
    return max(dist.values())


def diameter(graph):
    """Exact max eccentricity of a finite connected graph."""
    if not graph.vertices:
        return 0
    n = len(graph.vertices)
    if n <= 2048:
        # dense boolean closure
        a = np.zeros((n, n), dtype=bool)
        for v, w in graph.edges:
            a[graph.index[v], graph.index[w]] = True
            a[graph.index[w], graph.index[v]] = True
        reach = a | np.eye(n, dtype=bool)
        dist = np.full((n, n), -1, dtype=np.int32)
        np.fill_diagonal(dist, 0)
        dist[a & (dist < 0)] = 1
        d = 1
        cur = reach
        while True:
            nxt = cur @ a | cur
            newly = nxt & ~cur
            if not newly.any():
                break
            d += 1
            dist[newly] = d
            cur = nxt
        if (dist < 0).any():
            raise InfiniteDiameter("graph is disconnected")
        return int(dist.max())
    return max(eccentricity(graph, v) for v in graph.vertices)


# --- implicit F2 universes: fast exact eccentricity -------------------------


def _swap_mask_table(g):
    """mask[u] with pairing(u, v) = parity(mask[u] & v)."""
    n = 1 << (2 * g)
    u = np.arange(n, dtype=np.uint32)
    even = u & np.uint32(0x55555555 & (n - 1))
    odd = u & np.uint32(0xAAAAAAAA & (n - 1))
    return (even << 1) | (odd >> 1)


def _parity_matrix(g):
    """P[u, v] = f2 pairing of u and v, as a dense boolean matrix."""
    n = 1 << (2 * g)
    masks = _swap_mask_table(g)
    v = np.arange(n, dtype=np.uint32)
    anded = masks[:, None] & v[None, :]
    return (np.bitwise_count(anded) & 1).astype(bool)


def f2_gamma1_eccentricity(g, start=None):
    """Eccentricity of a vertex in the mod-2 Schmutz shadow at genus g.

    The symplectic group acts transitively on nonzero vectors, so this equals
    the diameter.
    """
    p = _parity_matrix(g)
    n = p.shape[0]
    start = start if start is not None else 1  # the class a_1
    dist = np.full(n, -1, dtype=np.int32)
    dist[start] = 0
    frontier = np.array([start], dtype=np.int64)
    d = 0
    while frontier.size:
        d += 1
        nbr = p[frontier].any(axis=0)
        nbr &= dist < 0
        nbr[0] = False
        idx = np.where(nbr)[0]
        dist[idx] = d
        frontier = idx
    if (dist[1:] < 0).any():
        raise InfiniteDiameter("Schmutz shadow is disconnected")
    return int(dist[1:].max())


def f2_gamma_k2_eccentricity(g, progress=None):
    """Eccentricity of the base vertex {a1, a2} in the k = 2 shadow at genus g.

    Witt extension makes Sp(2g, F2) transitive on cut systems of a fixed
    size, so the graph is vertex-transitive and this is its exact diameter.
    Vertices are encoded u * 2^(2g) + v with u < v.
    """
    p = _parity_matrix(g)
    n = p.shape[0]
    a1, a2 = 1, 4  # bitmask classes of the first two handle a-curves
    visited = np.zeros(n * n, dtype=bool)
    start = np.int64(min(a1, a2)) * n + max(a1, a2)
    visited[start] = True
    frontier = np.array([start], dtype=np.int64)
    d = 0
    total = 1
    ecc = 0
    while frontier.size:
        us = (frontier // n).astype(np.int64)
        vs = (frontier % n).astype(np.int64)
        new_codes = []
        for keep, rep in ((us, vs), (vs, us)):
            # replace `rep`: candidates x with <x, rep> = 1, <x, keep> = 0
            chunk = 4096
            for i in range(0, keep.size, chunk):
                ks = keep[i : i + chunk]
                rs = rep[i : i + chunk]
                cand = p[:, rs] & ~p[:, ks]  # n x chunk
                xs, cols = np.nonzero(cand)
                kk = ks[cols]
                lo = np.minimum(xs, kk)
                hi = np.maximum(xs, kk)
                new_codes.append(lo * n + hi)
        codes = np.unique(np.concatenate(new_codes)) if new_codes else np.array([], dtype=np.int64)
        codes = codes[~visited[codes]]
        if codes.size == 0:
            break
        visited[codes] = True
        d += 1
        ecc = d
        total += codes.size
        if progress:
            progress(d, codes.size)
        frontier = codes
    return ecc, total


def f2_count_vertices_k2(g):
    """Number of cut systems of size 2 over F2 at genus g (pairs that are
    orthogonal, nonzero, and distinct)."""
    n = 1 << (2 * g)
    # each nonzero u has 2^(2g-1) orthogonal vectors including 0 and u
    per = (n // 2) - 2
    return (n - 1) * per // 2


# --- chain homology -----------------------------------------------------------


def chain_homology(graph):
    """Betti numbers (b0, b1) of the 2-complex, over Z via Smith normal form,
    cross-checked against rational ranks."""
    vid = graph.index
    nv, ne = len(graph.vertices), len(graph.edges)
    eid = {e: i for i, e in enumerate(graph.edges)}
    d1 = [[0] * nv for _ in range(ne)]
    for (a, b), i in eid.items():
        d1[i][vid[a]] = -1
        d1[i][vid[b]] = 1
    d2 = [[0] * ne for _ in range(len(graph.cells))]
    for ci, cell in enumerate(graph.cells):
        cyc = cell.cycle
        for t in range(len(cyc)):
            a, b = cyc[t], cyc[(t + 1) % len(cyc)]
            if (a, b) in eid:
                d2[ci][eid[a, b]] += 1
            else:
                d2[ci][eid[b, a]] -= 1
    r1 = len(intlin.invariant_factors(d1)) if ne else 0
    r2 = len(intlin.invariant_factors(d2)) if graph.cells else 0
    q1 = intlin.rational_rank(d1) if ne else 0
    q2 = intlin.rational_rank(d2) if graph.cells else 0
    if (r1, r2) != (q1, q2):
        raise ArithmeticError("Smith and rational ranks disagree")
    b0 = nv - r1
    b1 = ne - r1 - r2
    return b0, b1
