"""Syndrome decoding: events, weighted matching, and path corrections.

The pipeline turns a syndrome record plus the risk list into a correction
frame.  Differences between consecutive rounds of each check type become
syndrome events; a cutoff Dijkstra over the weighted space-time graph
yields pairwise and boundary distances; a minimum-weight perfect matching
(solved as a maximum-profit matching where an unmatched event pays its own
boundary distance) selects the pairing; and the correcting Paulis are
applied along each matched pair's minimum-weight witness path.

Modes:

  standard    unit spatial and time weights (Manhattan), risk list ignored;
              the conventional reference decoder.
  risk_list   spatial edges cost w through blocks whose detect circuit
              fired in that round and z otherwise; time edges cost t; the
              search stops at the cutoff.
  wizard      same machinery with an oracle truth list and z infinite:
              pairs may only connect along listed blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import matching as M
from .cycles import RiskList, SyndromeRecord
from .graphs import (SCALE, DecoderGraph, DecoderWeights, PathFinder,
                     build_decoder_graph, pairwise_distances)
from .layout import CONCATENATED, CodeLayout
from .pauli import PauliFrame

MODE_STANDARD = "standard"
MODE_RISK_LIST = "risk_list"
MODE_WIZARD = "wizard"
MODES = (MODE_STANDARD, MODE_RISK_LIST, MODE_WIZARD)

_MAX_CUTOFF_RETRIES = 4


class DecodingError(RuntimeError):
    """The matching stage could not produce a usable pairing."""


@dataclass(frozen=True)
class SyndromeEvent:
    """A change in one check's outcome between consecutive rounds."""

    ancilla: int
    round_ordinal: int
    check_type: str


def extract_events(record: SyndromeRecord):
    """Difference-encode the record; first round compares against even.

    Returns (x_events, z_events), each sorted by (round, ancilla).
    """
    out = []
    for kind, bits in (("x", record.x_bits), ("z", record.z_bits)):
        if bits.size == 0:
            out.append([])
            continue
        flips = np.diff(bits, axis=0, prepend=np.zeros((1, bits.shape[1]), dtype=np.uint8))
        rr, aa = np.nonzero(flips % 2)
        out.append([SyndromeEvent(int(a), int(r), kind) for r, a in zip(rr, aa)])
    return out[0], out[1]


def mwpm(event_nodes: np.ndarray, dmat: np.ndarray, bdist: np.ndarray):
    """Minimum-weight pairing of events with individual boundary options.

    ``dmat``/``bdist`` are int64 with -1 encoding unreachable.  Minimising
    (sum of pair distances + boundary distances of unpaired events) equals
    maximising pair profits b_i + b_j - d_ij over a plain matching, so the
    blossom solver runs on the positive-profit edges only.  Events whose
    boundary is unreachable get a dominating stand-in cost, which forces
    them into pairs whenever any pairing exists.

    Returns (pairs, boundary) with pairs as (i, j) index tuples.  Raises
    DecodingError if an event can neither pair nor reach the boundary.
    """
    ne = len(event_nodes)
    if ne == 0:
        return [], []
    finite_max = 1
    if np.any(dmat >= 0):
        finite_max = max(finite_max, int(dmat.max()))
    if np.any(bdist >= 0):
        finite_max = max(finite_max, int(bdist.max()))
    big = (finite_max + 1) * (ne + 2)
    b_eff = np.where(bdist < 0, big, bdist)

    iu, ju = np.triu_indices(ne, k=1)
    dd = dmat[iu, ju]
    ok = dd >= 0
    iu, ju, dd = iu[ok], ju[ok], dd[ok]
    profit = b_eff[iu] + b_eff[ju] - dd
    keep = profit > 0
    mate = M.max_weight_matching(ne, iu[keep], ju[keep], profit[keep])

    pairs = []
    boundary = []
    for i in range(ne):
        j = int(mate[i])
        if j < 0:
            if bdist[i] < 0:
                raise DecodingError(
                    f"event {i} is unmatched and cannot reach the boundary")
            boundary.append(i)
        elif j > i:
            pairs.append((i, j))
    return pairs, boundary


@dataclass
class DecodeResult:
    correction: PauliFrame
    x_events: list[SyndromeEvent]
    z_events: list[SyndromeEvent]
    x_pairs: list[tuple[int, int]] = field(default_factory=list)
    x_boundary: list[int] = field(default_factory=list)
    z_pairs: list[tuple[int, int]] = field(default_factory=list)
    z_boundary: list[int] = field(default_factory=list)
    cutoff_retries: int = 0

    def to_json_dict(self) -> dict:
        def evs(events):
            return [[e.ancilla, e.round_ordinal] for e in events]
        return {
            "format": "phasesurf-decode-v1",
            "x_events": evs(self.x_events),
            "z_events": evs(self.z_events),
            "x_pairs": [list(p) for p in self.x_pairs],
            "x_boundary": list(self.x_boundary),
            "z_pairs": [list(p) for p in self.z_pairs],
            "z_boundary": list(self.z_boundary),
            "correction": {"x": self.correction.x.tolist(),
                           "z": self.correction.z.tolist()},
            "cutoff_retries": self.cutoff_retries,
        }


def _apply_block_correction(layout: CodeLayout, kind: str, block: int,
                            frame: PauliFrame) -> None:
    """One block's worth of correcting Pauli for a matched-path edge.

    X-check events are cured by logical-Z chains (Z on both physical
    qubits of a concatenated block), z-check events by logical-X chains
    (X on the first physical qubit).
    """
    q0 = int(layout.block_qubits[block, 0])
    if kind == "x":
        frame.z[q0] ^= 1
        if layout.variant == CONCATENATED:
            frame.z[int(layout.block_qubits[block, 1])] ^= 1
    else:
        frame.x[q0] ^= 1


def apply_correction(layout: CodeLayout, graph: DecoderGraph,
                     event_nodes: np.ndarray, pairs, boundary,
                     weights: DecoderWeights, risk_mask, frame: PauliFrame,
                     expansion_cap: float | None = None) -> PauliFrame:
    """XOR the witness-path corrections of a matching into ``frame``.

    Corrections lie on the data blocks of each path's spatial and boundary
    edges; time edges contribute nothing.
    """
    finder = PathFinder(graph, weights, risk_mask, expansion_cap)
    for i, j in pairs:
        blocks = finder.blocks_between(int(event_nodes[i]), int(event_nodes[j]))
        for blk in blocks:
            _apply_block_correction(layout, graph.kind, blk, frame)
    for i in boundary:
        blocks = finder.blocks_between(int(event_nodes[i]), graph.boundary_node)
        for blk in blocks:
            _apply_block_correction(layout, graph.kind, blk, frame)
    return frame


def _event_nodes(graph: DecoderGraph, events) -> np.ndarray:
    return np.array([graph.node_of(e.ancilla, e.round_ordinal) for e in events],
                    dtype=np.int32)


def _boundary_cap(graph: DecoderGraph, weights: DecoderWeights) -> float | None:
    """Expansion radius beyond which no pair can outbid its boundaries.

    A boundary path costs at most (unit-edge distance) * max(w, z), so any
    pair distance beyond twice that bound has non-positive matching profit
    and may be reported unreachable without changing the matching.
    """
    if np.isinf(weights.z):
        return None
    worst = float(graph.boundary_spatial_dist.max()) * max(weights.w, weights.z)
    return 2.0 * worst + 2.0


def _decode_side(layout: CodeLayout, kind: str, events, n_rounds: int,
                 weights: DecoderWeights, risk_mask, frame: PauliFrame):
    """Distances, matching, and corrections for one check type."""
    graph = build_decoder_graph(layout, kind, n_rounds)
    nodes = _event_nodes(graph, events)
    cap = _boundary_cap(graph, weights)
    retries = 0
    wts = weights
    while True:
        dmat, bdist = pairwise_distances(graph, nodes, wts, risk_mask, cap)
        try:
            pairs, boundary = mwpm(nodes, dmat, bdist)
            break
        except (DecodingError, M.MatchingError):
            # pathological cutoff: widen it and try again (bounded)
            if retries >= _MAX_CUTOFF_RETRIES or np.isinf(wts.cutoff):
                raise
            retries += 1
            wts = DecoderWeights(wts.w, wts.z, wts.t, wts.cutoff * 2)
    apply_correction(layout, graph, nodes, pairs, boundary, wts, risk_mask,
                     frame, cap)
    return pairs, boundary, retries


def decode(record: SyndromeRecord, risk: RiskList, layout: CodeLayout,
           weights: DecoderWeights, mode: str = MODE_RISK_LIST) -> DecodeResult:
    """Full pipeline: events -> distances -> matching -> corrections.

    The x side (phase errors) uses the requested mode; the z side has no
    detect information and always uses Manhattan weights.
    """
    if mode not in MODES:
        raise ValueError(f"unknown decode mode {mode!r}")
    x_events, z_events = extract_events(record)
    correction = PauliFrame.zeros(layout.n_qubits)

    if mode == MODE_STANDARD:
        x_weights = DecoderWeights.manhattan()
        x_risk = None
    else:
        x_weights = weights
        x_risk = risk.as_mask(layout.n_blocks, record)

    result = DecodeResult(correction=correction, x_events=x_events,
                          z_events=z_events)
    if record.n_x_rounds:
        result.x_pairs, result.x_boundary, r1 = _decode_side(
            layout, "x", x_events, record.n_x_rounds, x_weights, x_risk,
            correction)
        result.cutoff_retries += r1
    if record.n_z_rounds:
        result.z_pairs, result.z_boundary, r2 = _decode_side(
            layout, "z", z_events, record.n_z_rounds,
            DecoderWeights.manhattan(), None, correction)
        result.cutoff_retries += r2
    return result
