"""Weighted space-time decoder graph and the cutoff Dijkstra search.

One graph per check type: a node is an (ancilla, round) lattice point, and
one extra virtual node represents the open boundary of that type.  Spatial
edges connect ancillas that share a data block within the same round and
cost w when the block is on the risk list for that round, z otherwise
(both 1 in Manhattan mode).  Temporal edges of cost t connect an ancilla
to itself in adjacent rounds.  Boundary edges carry the block between a
lattice-edge ancilla and the boundary node; the boundary node itself is a
sink and never expands, so pair distances cannot tunnel through it.

All arithmetic is int64 at a fixed binary scale so that path weights and
tie-breaks are exact; public entry points convert back to floats.  The
search expands a node only while its distance is below the cutoff, and
every distance at or above the cutoff is reported as unreachable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .layout import CodeLayout

SCALE = 1 << 16
INF = np.int64(-1)

# Default weights per p_d/p_g column: (z, t, cutoff as (a*n + b)).
_WEIGHT_TABLE = (
    (1.0, 12.0, 3.5, (3, 1)),
    (1 / 2, 12.0, 3.5, (3, 1)),
    (1 / 3, 4.5, 0.85, (2, 4)),
    (1 / 5, 4.0, 0.5, (1, 10)),
    (1 / 10, 3.0, 0.4, (1, 6)),
    (1 / 20, 3.0, 0.35, (1, 5)),
)


@dataclass(frozen=True)
class DecoderWeights:
    """Matching-graph weights: listed w, unlisted z, time t, cutoff c.

    ``z`` may be infinite (wizard limit: pairs may only connect along
    listed blocks).  ``cutoff`` may be infinite for an exact search.
    """

    w: float = 1.0
    z: float = 1.0
    t: float = 1.0
    cutoff: float = float("inf")

    def __post_init__(self) -> None:
        if not (self.w > 0 and self.z >= self.w and self.t > 0 and self.cutoff > 0):
            raise ValueError(f"invalid decoder weights {self}")

    @classmethod
    def manhattan(cls) -> "DecoderWeights":
        return cls(1.0, 1.0, 1.0, float("inf"))

    @classmethod
    def from_table(cls, ratio: float, n: int) -> "DecoderWeights":
        """Tuned defaults per local/global rate ratio and lattice size."""
        best = min(_WEIGHT_TABLE, key=lambda row: abs(row[0] - ratio))
        _, z, t, (ca, cb) = best
        return cls(1.0, z, t, float(ca * n + cb))

    def scaled(self) -> tuple[int, int, int, int]:
        """(w, z, t, c) in fixed-point ints; z/c < 0 encode infinity."""
        w = int(round(self.w * SCALE))
        z = -1 if np.isinf(self.z) else int(round(self.z * SCALE))
        t = int(round(self.t * SCALE))
        c = -1 if np.isinf(self.cutoff) else int(round(self.cutoff * SCALE))
        return w, z, t, c


@dataclass
class DecoderGraph:
    """Static space-time adjacency for one check type over R rounds."""

    kind: str
    n_rounds: int
    n_ancillas: int
    n_blocks: int
    adj_ptr: np.ndarray    # (n_nodes + 1,)
    adj_node: np.ndarray   # neighbour node id (n_nodes == boundary)
    adj_block: np.ndarray  # data block of spatial/boundary edges, -1 for time
    boundary_spatial_dist: np.ndarray  # per-ancilla unit-edge distance bound

    @property
    def n_nodes(self) -> int:
        return self.n_rounds * self.n_ancillas

    @property
    def boundary_node(self) -> int:
        return self.n_nodes

    def node_of(self, ancilla: int, round_ordinal: int) -> int:
        return round_ordinal * self.n_ancillas + ancilla


_GRAPH_CACHE: dict[tuple[int, str, int], DecoderGraph] = {}


def build_decoder_graph(layout: CodeLayout, kind: str, n_rounds: int) -> DecoderGraph:
    key = (id(layout), kind, n_rounds)
    got = _GRAPH_CACHE.get(key)
    if got is not None:
        return got
    geo = layout.checks(kind)
    a_count = geo.n_ancillas
    nn = n_rounds * a_count

    # per-ancilla neighbour templates from the static geometry
    nbr: list[list[tuple[int, int]]] = [[] for _ in range(a_count)]
    for a, b, blk in geo.edges:
        nbr[a].append((int(b), int(blk)))
        nbr[b].append((int(a), int(blk)))
    bnd: list[list[int]] = [[] for _ in range(a_count)]
    for a, blk in geo.boundary:
        bnd[int(a)].append(int(blk))
    for lst in nbr:
        lst.sort()

    ptr = np.zeros(nn + 2, dtype=np.int64)
    nodes: list[int] = []
    blocks: list[int] = []
    for r in range(n_rounds):
        for a in range(a_count):
            node = r * a_count + a
            if r > 0:
                nodes.append(node - a_count)
                blocks.append(-1)
            if r + 1 < n_rounds:
                nodes.append(node + a_count)
                blocks.append(-1)
            for b, blk in nbr[a]:
                nodes.append(r * a_count + b)
                blocks.append(blk)
            for blk in bnd[a]:
                nodes.append(nn)
                blocks.append(blk)
            ptr[node + 1] = len(nodes)
    ptr[nn + 1] = len(nodes)  # boundary node is a sink: no outgoing edges
    graph = DecoderGraph(
        kind=kind,
        n_rounds=n_rounds,
        n_ancillas=a_count,
        n_blocks=layout.n_blocks,
        adj_ptr=ptr,
        adj_node=np.array(nodes, dtype=np.int32),
        adj_block=np.array(blocks, dtype=np.int32),
        boundary_spatial_dist=geo.boundary_dist.copy(),
    )
    _GRAPH_CACHE[key] = graph
    return graph


@njit(cache=True)
def _dijkstra_kernel(adj_ptr, adj_node, adj_block, n_ancillas, source,
                     w_i, z_i, t_i, c_i, risk, n_rounds, dist, prev,
                     heap, touched, target):
    """Cutoff Dijkstra from one node; returns the count of touched nodes.

    ``dist``/``prev`` are full-size scratch arrays; only entries listed in
    ``touched`` are valid afterwards (callers reset them via that list).
    Distances at or beyond the cutoff are left as -1 (unreachable).  A
    non-negative ``target`` stops the search once that node is settled.
    """
    n_nodes = len(adj_ptr) - 2
    hsize = 0
    heap[0] = np.int64(source)  # packed (dist << 24) | node, dist 0
    hsize = 1
    n_touch = 0
    dist[source] = 0
    prev[source] = -1
    touched[n_touch] = source
    n_touch += 1

    while hsize > 0:
        top = heap[0]
        hsize -= 1
        heap[0] = heap[hsize]
        # sift down
        i = 0
        while True:
            l = 2 * i + 1
            if l >= hsize:
                break
            r = l + 1
            c = l
            if r < hsize and heap[r] < heap[l]:
                c = r
            if heap[c] < heap[i]:
                tmp = heap[i]
                heap[i] = heap[c]
                heap[c] = tmp
                i = c
            else:
                break
        d = top >> 24
        u = np.int32(top & 0xFFFFFF)
        if dist[u] != d:
            continue  # stale heap entry
        if u == target:
            break  # settled: the predecessor chain to it is final
        if u == n_nodes:
            continue  # boundary node is a sink
        if c_i >= 0 and d >= c_i:
            continue  # cutoff: do not expand
        rnd = u // n_ancillas
        for k in range(adj_ptr[u], adj_ptr[u + 1]):
            v = adj_node[k]
            blk = adj_block[k]
            if blk < 0:
                wgt = np.int64(t_i)
            elif risk[blk * n_rounds + rnd] == 1:
                wgt = np.int64(w_i)
            else:
                if z_i < 0:
                    continue  # unlisted edges are forbidden (z infinite)
                wgt = np.int64(z_i)
            nd = d + wgt
            old = dist[v]
            if old < 0 or nd < old:
                if old < 0:
                    touched[n_touch] = v
                    n_touch += 1
                dist[v] = nd
                prev[v] = u
                heap[hsize] = (nd << 24) | np.int64(v)
                hsize += 1
                # sift up
                i = hsize - 1
                while i > 0:
                    p = (i - 1) // 2
                    if heap[i] < heap[p]:
                        tmp = heap[i]
                        heap[i] = heap[p]
                        heap[p] = tmp
                        i = p
                    else:
                        break
    # enforce the cutoff on reported distances
    for i in range(n_touch):
        v = touched[i]
        if c_i >= 0 and dist[v] >= c_i:
            dist[v] = -1
            prev[v] = -1
    return n_touch


@njit(cache=True)
def _pairwise_kernel(adj_ptr, adj_node, adj_block, n_ancillas, n_rounds,
                     event_nodes, w_i, z_i, t_i, c_i, cap_i, risk,
                     dmat, bdist):
    """Distance matrix and boundary distances for all event nodes.

    ``cap_i`` additionally bounds expansion (-1 for none); entries beyond
    the cutoff or the cap are -1.
    """
    n_nodes = len(adj_ptr) - 2
    ne = len(event_nodes)
    dist = np.full(n_nodes + 1, -1, dtype=np.int64)
    prev = np.full(n_nodes + 1, -1, dtype=np.int32)
    heap = np.empty(len(adj_node) + n_nodes + 64, dtype=np.int64)
    touched = np.empty(n_nodes + 1, dtype=np.int32)
    node_event = np.full(n_nodes + 1, -1, dtype=np.int32)
    for i in range(ne):
        node_event[event_nodes[i]] = i
    eff_c = c_i
    if cap_i >= 0 and (eff_c < 0 or cap_i < eff_c):
        eff_c = cap_i
    for i in range(ne):
        nt = _dijkstra_kernel(adj_ptr, adj_node, adj_block, n_ancillas,
                              event_nodes[i], w_i, z_i, t_i, eff_c, risk,
                              n_rounds, dist, prev, heap, touched,
                              np.int32(-1))
        for k in range(nt):
            v = touched[k]
            if dist[v] >= 0:
                j = node_event[v]
                if j >= 0:
                    dmat[i, j] = dist[v]
        if dist[n_nodes] >= 0:
            bdist[i] = dist[n_nodes]
        for k in range(nt):
            v = touched[k]
            dist[v] = -1
            prev[v] = -1
    return 0


def approx_dijkstra(graph: DecoderGraph, source: int, weights: DecoderWeights,
                    risk_mask: np.ndarray | None = None):
    """Single-source cutoff shortest paths over the space-time graph.

    Returns (dist, prev) as float distances (inf beyond the cutoff) and
    predecessor node ids (-1 where unreachable or at the source).
    """
    w_i, z_i, t_i, c_i = weights.scaled()
    risk = _risk_flat(graph, risk_mask)
    nn = graph.n_nodes
    dist = np.full(nn + 1, -1, dtype=np.int64)
    prev = np.full(nn + 1, -1, dtype=np.int32)
    heap = np.empty(len(graph.adj_node) + nn + 64, dtype=np.int64)
    touched = np.empty(nn + 1, dtype=np.int32)
    _dijkstra_kernel(graph.adj_ptr, graph.adj_node, graph.adj_block,
                     graph.n_ancillas, source, w_i, z_i, t_i, c_i, risk,
                     graph.n_rounds, dist, prev, heap, touched, np.int32(-1))
    out = np.where(dist < 0, np.inf, dist / SCALE)
    return out, prev


def _risk_flat(graph: DecoderGraph, risk_mask: np.ndarray | None) -> np.ndarray:
    if risk_mask is None:
        return np.zeros(graph.n_blocks * graph.n_rounds, dtype=np.uint8)
    if risk_mask.shape != (graph.n_blocks, graph.n_rounds):
        raise ValueError(
            f"risk mask shape {risk_mask.shape} != "
            f"{(graph.n_blocks, graph.n_rounds)}")
    return np.ascontiguousarray(risk_mask, dtype=np.uint8).reshape(-1)


def pairwise_distances(graph: DecoderGraph, event_nodes: np.ndarray,
                       weights: DecoderWeights,
                       risk_mask: np.ndarray | None = None,
                       expansion_cap: float | None = None):
    """Event-to-event and event-to-boundary distances (ints at SCALE).

    Returns (dmat, bdist) with -1 encoding unreachable.  ``expansion_cap``
    optionally bounds the search radius further than the cutoff; distances
    at or beyond it are reported unreachable (used by the decoder, whose
    matching provably never consumes them).
    """
    w_i, z_i, t_i, c_i = weights.scaled()
    cap_i = -1 if expansion_cap is None else int(round(expansion_cap * SCALE))
    risk = _risk_flat(graph, risk_mask)
    ne = len(event_nodes)
    dmat = np.full((ne, ne), -1, dtype=np.int64)
    bdist = np.full(ne, -1, dtype=np.int64)
    if ne:
        _pairwise_kernel(graph.adj_ptr, graph.adj_node, graph.adj_block,
                         graph.n_ancillas, graph.n_rounds,
                         np.ascontiguousarray(event_nodes, dtype=np.int32),
                         w_i, z_i, t_i, c_i, cap_i, risk, dmat, bdist)
    return dmat, bdist


class PathFinder:
    """Reusable-buffer witness-path extraction over one decoder graph.

    Each query reruns the deterministic search from the source with an
    early exit once the target settles, then walks the predecessor chain;
    time edges contribute no blocks.
    """

    def __init__(self, graph: DecoderGraph, weights: DecoderWeights,
                 risk_mask: np.ndarray | None = None,
                 expansion_cap: float | None = None):
        self.graph = graph
        self.w_i, self.z_i, self.t_i, self.c_i = weights.scaled()
        if expansion_cap is not None:
            cap_i = int(round(expansion_cap * SCALE))
            if self.c_i < 0 or cap_i < self.c_i:
                self.c_i = cap_i
        self.risk = _risk_flat(graph, risk_mask)
        nn = graph.n_nodes
        self._dist = np.full(nn + 1, -1, dtype=np.int64)
        self._prev = np.full(nn + 1, -1, dtype=np.int32)
        self._heap = np.empty(len(graph.adj_node) + nn + 64, dtype=np.int64)
        self._touched = np.empty(nn + 1, dtype=np.int32)

    def blocks_between(self, source: int, target: int) -> list[int]:
        g = self.graph
        nt = _dijkstra_kernel(g.adj_ptr, g.adj_node, g.adj_block,
                              g.n_ancillas, source, self.w_i, self.z_i,
                              self.t_i, self.c_i, self.risk, g.n_rounds,
                              self._dist, self._prev, self._heap,
                              self._touched, np.int32(target))
        try:
            if self._dist[target] < 0:
                raise ValueError(f"no path from node {source} to node {target}")
            blocks: list[int] = []
            v = target
            while v != source:
                u = int(self._prev[v])
                blk = _edge_block(g, u, v, self.w_i, self.z_i, self.t_i,
                                  self.risk)
                if blk >= 0:
                    blocks.append(blk)
                v = u
        finally:
            for i in range(nt):
                v2 = self._touched[i]
                self._dist[v2] = -1
                self._prev[v2] = -1
        blocks.reverse()
        return blocks


def witness_path(graph: DecoderGraph, source: int, target: int,
                 weights: DecoderWeights, risk_mask: np.ndarray | None = None,
                 expansion_cap: float | None = None) -> list[int]:
    """Blocks along the minimum-weight path from source to target node."""
    return PathFinder(graph, weights, risk_mask, expansion_cap).blocks_between(
        source, target)


def _edge_block(graph: DecoderGraph, u: int, v: int, w_i: int, z_i: int,
                t_i: int, risk: np.ndarray) -> int:
    """Data block of the (u, v) edge the search used; -1 for a time edge.

    Parallel edges exist only towards the boundary node; the search kept
    the first minimum-weight one, so resolve ties the same way.
    """
    rnd = u // graph.n_ancillas
    best_blk = -2
    best_w = -1
    for k in range(graph.adj_ptr[u], graph.adj_ptr[u + 1]):
        if graph.adj_node[k] != v:
            continue
        blk = int(graph.adj_block[k])
        if blk < 0:
            wgt = t_i
        elif risk[blk * graph.n_rounds + rnd] == 1:
            wgt = w_i
        else:
            if z_i < 0:
                continue
            wgt = z_i
        if best_blk == -2 or wgt < best_w:
            best_blk = blk
            best_w = wgt
    if best_blk == -2:
        raise ValueError(f"nodes {u} and {v} are not adjacent")
    return best_blk
