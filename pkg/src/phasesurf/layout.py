"""Planar lattice geometry for both code variants.

Data blocks sit on an n x n integer grid.  Stabiliser ancillas sit on the
half-integer plaquette centers between them, coloured in a checkerboard
pattern; the two smooth and two rough boundaries keep weight-2 checks of
one type each, which leaves a single logical qubit (n^2 - 1 independent
checks over n^2 blocks).

In the standard variant a block is one physical qubit.  In the
concatenated variant a block is two physical qubits plus a detect ancilla;
block-level logicals follow the two-qubit phase-detect code: X on either
physical qubit, Z on both, with XX as the block stabiliser.

Coordinates are stored doubled so that everything stays integer: a block
at (r, c) has coordinate (2r, 2c) and a plaquette center at (r+1/2, c+1/2)
has coordinate (2r+1, 2c+1).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .pauli import PauliFrame

STANDARD = "standard"
CONCATENATED = "concatenated"

# Member-block order around a plaquette center: NW, NE, SW, SE.
_DIRECTIONS = ((0, 0), (0, 1), (1, 0), (1, 1))
DIRECTION_NAMES = ("nw", "ne", "sw", "se")


class StabiliserViolationError(ValueError):
    """A residual frame anticommutes with a stabiliser: pipeline bug."""


@dataclass
class CheckGeometry:
    """Geometry of one check type (x or z) over the block lattice."""

    kind: str
    coords: np.ndarray        # (A, 2) doubled lattice coordinates
    anc_blocks: np.ndarray    # (A, 4) member block per direction, -1 if absent
    edges: np.ndarray         # (E, 3) [anc_a, anc_b, shared block]
    boundary: np.ndarray      # (K, 2) [anc, block] blocks seen by one ancilla
    block_ancs: np.ndarray    # (B, 2) ancillas per block, -1 if absent
    spatial_dist: np.ndarray  # (A, A) unit-edge graph distance
    boundary_dist: np.ndarray  # (A,) unit-edge distance to the open boundary

    @property
    def n_ancillas(self) -> int:
        return len(self.coords)


def _bfs_tables(n_anc: int, edges: np.ndarray, boundary: np.ndarray):
    """All-pairs unit-edge distances plus distance to the boundary node."""
    adj: list[list[int]] = [[] for _ in range(n_anc)]
    for a, b, _blk in edges:
        adj[a].append(b)
        adj[b].append(a)
    dist = np.full((n_anc, n_anc), -1, dtype=np.int32)
    for src in range(n_anc):
        d = dist[src]
        d[src] = 0
        queue = [src]
        while queue:
            nxt: list[int] = []
            for u in queue:
                for v in adj[u]:
                    if d[v] < 0:
                        d[v] = d[u] + 1
                        nxt.append(v)
            queue = nxt
    bdist = np.full(n_anc, -1, dtype=np.int32)
    queue = []
    for a, _blk in boundary:
        if bdist[a] < 0:
            bdist[a] = 1
            queue.append(int(a))
    while queue:
        nxt = []
        for u in queue:
            for v in adj[u]:
                if bdist[v] < 0:
                    bdist[v] = bdist[u] + 1
                    nxt.append(v)
        queue = nxt
    return dist, bdist


def _build_check_geometry(kind: str, n: int, block_index: dict[tuple[int, int], int],
                          n_blocks: int) -> CheckGeometry:
    """Enumerate kept plaquette centers of one colour and their memberships.

    Centers at (r+1/2, c+1/2), r, c in [-1, n-1], are x-type iff r+c is
    even.  Interior centers of both types are kept; the north/south edges
    keep only x-type halves and the west/east edges only z-type halves, so
    z-error chains terminate on the west/east boundaries (logical Z is a
    horizontal chain) and x-error chains on north/south.
    """
    want_x = kind == "x"
    coords = []
    members = []
    for r in range(-1, n):
        for c in range(-1, n):
            is_x = (r + c) % 2 == 0
            if is_x is not want_x:
                continue
            on_ns = r in (-1, n - 1)
            on_we = c in (-1, n - 1)
            if on_ns and on_we:
                continue  # corners touch a single block
            if on_ns and not want_x:
                continue
            if on_we and want_x:
                continue
            blocks = []
            for dr, dc in _DIRECTIONS:
                rr, cc = r + dr, c + dc
                blocks.append(block_index.get((rr, cc), -1))
            if sum(b >= 0 for b in blocks) < 2:
                continue
            coords.append((2 * r + 1, 2 * c + 1))
            members.append(blocks)
    coords_arr = np.array(coords, dtype=np.int32).reshape(-1, 2)
    members_arr = np.array(members, dtype=np.int32).reshape(-1, 4)

    block_ancs = np.full((n_blocks, 2), -1, dtype=np.int32)
    for a, blocks in enumerate(members_arr):
        for b in blocks:
            if b < 0:
                continue
            if block_ancs[b, 0] < 0:
                block_ancs[b, 0] = a
            elif block_ancs[b, 1] < 0:
                block_ancs[b, 1] = a
            else:
                raise AssertionError(f"block {b} touched by >2 {kind}-ancillas")

    edges = []
    boundary = []
    for b in range(n_blocks):
        a0, a1 = block_ancs[b]
        if a0 >= 0 and a1 >= 0:
            edges.append((min(a0, a1), max(a0, a1), b))
        elif a0 >= 0:
            boundary.append((a0, b))
        else:
            raise AssertionError(f"block {b} touched by no {kind}-ancilla")
    edges_arr = np.array(sorted(edges), dtype=np.int32).reshape(-1, 3)
    boundary_arr = np.array(sorted(boundary), dtype=np.int32).reshape(-1, 2)

    dist, bdist = _bfs_tables(len(coords_arr), edges_arr, boundary_arr)
    return CheckGeometry(kind, coords_arr, members_arr, edges_arr, boundary_arr,
                         block_ancs, dist, bdist)


@dataclass
class CodeLayout:
    """Immutable lattice bookkeeping shared by the engine and the decoder."""

    variant: str
    n: int
    block_coords: np.ndarray   # (B, 2) doubled coordinates (2r, 2c)
    block_qubits: np.ndarray   # (B, 2) physical qubits; column 1 is -1 for standard
    detect_qubits: np.ndarray  # (B,) detect ancilla per block, -1 for standard
    x_anc_qubits: np.ndarray   # (Ax,) physical qubit of each x-check ancilla
    z_anc_qubits: np.ndarray   # (Az, 2) qubits of each z-check ancilla (col 1 -1 for standard)
    n_qubits: int
    x_checks: CheckGeometry
    z_checks: CheckGeometry
    logical_x_blocks: np.ndarray  # vertical chain, spans north-south
    logical_z_blocks: np.ndarray  # horizontal chain, spans west-east

    @property
    def n_blocks(self) -> int:
        return len(self.block_coords)

    @property
    def n_data_qubits(self) -> int:
        per_block = 1 if self.variant == STANDARD else 2
        return per_block * self.n_blocks

    def checks(self, kind: str) -> CheckGeometry:
        if kind == "x":
            return self.x_checks
        if kind == "z":
            return self.z_checks
        raise ValueError(f"unknown check kind {kind!r}")

    def first_qubits(self) -> np.ndarray:
        """Physical qubit coupled by x-checks, per block."""
        return self.block_qubits[:, 0]

    def x_stab_support(self, anc: int) -> list[int]:
        """Qubits carrying X in the x-check operator of ancilla ``anc``."""
        return [int(self.block_qubits[b, 0])
                for b in self.x_checks.anc_blocks[anc] if b >= 0]

    def z_stab_support(self, anc: int) -> list[int]:
        """Qubits carrying Z in the z-check operator of ancilla ``anc``."""
        qubits: list[int] = []
        for b in self.z_checks.anc_blocks[anc]:
            if b < 0:
                continue
            qubits.append(int(self.block_qubits[b, 0]))
            if self.variant == CONCATENATED:
                qubits.append(int(self.block_qubits[b, 1]))
        return qubits

    def block_logical_content(self, residual: PauliFrame) -> tuple[np.ndarray, np.ndarray]:
        """Block-level (x_bar, z_bar) bits of a residual frame.

        For the concatenated variant the block must be inside the two-qubit
        code space (even z-parity); x-parity odd means a logical X since XX
        is the block stabiliser, and z on both qubits is the logical Z.
        """
        q0 = self.block_qubits[:, 0]
        if self.variant == STANDARD:
            return residual.x[q0].copy(), residual.z[q0].copy()
        q1 = self.block_qubits[:, 1]
        if np.any(residual.z[q0] ^ residual.z[q1]):
            bad = np.nonzero(residual.z[q0] ^ residual.z[q1])[0]
            raise StabiliserViolationError(
                f"residual violates the block XX stabiliser on blocks {bad.tolist()}"
            )
        return residual.x[q0] ^ residual.x[q1], residual.z[q0].copy()

    def check_syndrome(self, kind: str, frame: PauliFrame) -> np.ndarray:
        """Ideal syndrome of ``frame`` for one check type (test oracle).

        The x-check reads the z-parity of the coupled (first) qubits; the
        z-check reads the x-parity of all member physical qubits.
        """
        geo = self.checks(kind)
        syn = np.zeros(geo.n_ancillas, dtype=np.uint8)
        for a in range(geo.n_ancillas):
            if kind == "x":
                bits = [int(frame.z[q]) for q in self.x_stab_support(a)]
            else:
                bits = [int(frame.x[q]) for q in self.z_stab_support(a)]
            syn[a] = sum(bits) % 2
        return syn

    def logical_parity(self, residual: PauliFrame) -> tuple[bool, bool]:
        """Adjudicate a post-correction residual frame.

        Returns (x_failed, z_failed): x_failed iff the residual anticommutes
        with the logical Z operator, z_failed iff it anticommutes with the
        logical X.  Raises StabiliserViolationError if the residual fails to
        commute with any stabiliser, which signals a decoder pipeline bug.
        """
        a_bits, b_bits = self.block_logical_content(residual)
        for kind in ("x", "z"):
            syn = self.check_syndrome(kind, residual)
            if syn.any():
                raise StabiliserViolationError(
                    f"residual violates {int(syn.sum())} {kind}-checks"
                )
        x_failed = bool(int(a_bits[self.logical_z_blocks].sum()) % 2)
        z_failed = bool(int(b_bits[self.logical_x_blocks].sum()) % 2)
        return x_failed, z_failed

    def to_json(self) -> str:
        payload = {
            "format": "phasesurf-layout-v1",
            "variant": self.variant,
            "n": self.n,
            "blocks": [
                {
                    "coord": [int(v) for v in self.block_coords[b]],
                    "qubits": [int(q) for q in self.block_qubits[b] if q >= 0],
                    "detect": int(self.detect_qubits[b]),
                }
                for b in range(self.n_blocks)
            ],
            "checks": {
                kind: {
                    "coords": self.checks(kind).coords.tolist(),
                    "blocks": self.checks(kind).anc_blocks.tolist(),
                }
                for kind in ("x", "z")
            },
            "logical_x_blocks": self.logical_x_blocks.tolist(),
            "logical_z_blocks": self.logical_z_blocks.tolist(),
        }
        return json.dumps(payload, sort_keys=True)


def adjacent_blocks(layout: CodeLayout, ancilla: tuple[str, int]) -> list[int]:
    """Member blocks of one ancilla, in the fixed NW, NE, SW, SE order."""
    kind, idx = ancilla
    geo = layout.checks(kind)
    if not 0 <= idx < geo.n_ancillas:
        raise KeyError(f"unknown ancilla {ancilla!r}")
    return [int(b) for b in geo.anc_blocks[idx] if b >= 0]


def build(variant: str, n: int) -> CodeLayout:
    """Construct the planar layout for an n x n block lattice."""
    if variant not in (STANDARD, CONCATENATED):
        raise ValueError(f"unknown variant {variant!r}")
    if n < 2:
        raise ValueError(f"lattice size n={n} must be at least 2")

    block_index: dict[tuple[int, int], int] = {}
    coords = []
    for r in range(n):
        for c in range(n):
            block_index[(r, c)] = len(coords)
            coords.append((2 * r, 2 * c))
    n_blocks = len(coords)
    block_coords = np.array(coords, dtype=np.int32)

    x_checks = _build_check_geometry("x", n, block_index, n_blocks)
    z_checks = _build_check_geometry("z", n, block_index, n_blocks)

    if variant == STANDARD:
        block_qubits = np.stack(
            [np.arange(n_blocks, dtype=np.int32),
             np.full(n_blocks, -1, dtype=np.int32)], axis=1)
        detect_qubits = np.full(n_blocks, -1, dtype=np.int32)
        next_q = n_blocks
        x_anc_qubits = np.arange(next_q, next_q + x_checks.n_ancillas, dtype=np.int32)
        next_q += x_checks.n_ancillas
        z_anc_qubits = np.stack(
            [np.arange(next_q, next_q + z_checks.n_ancillas, dtype=np.int32),
             np.full(z_checks.n_ancillas, -1, dtype=np.int32)], axis=1)
        next_q += z_checks.n_ancillas
    else:
        base = 3 * np.arange(n_blocks, dtype=np.int32)
        block_qubits = np.stack([base, base + 1], axis=1)
        detect_qubits = base + 2
        next_q = 3 * n_blocks
        x_anc_qubits = np.arange(next_q, next_q + x_checks.n_ancillas, dtype=np.int32)
        next_q += x_checks.n_ancillas
        zb = next_q + 2 * np.arange(z_checks.n_ancillas, dtype=np.int32)
        z_anc_qubits = np.stack([zb, zb + 1], axis=1)
        next_q += 2 * z_checks.n_ancillas

    logical_x_blocks = np.array(
        [block_index[(r, 0)] for r in range(n)], dtype=np.int32)
    logical_z_blocks = np.array(
        [block_index[(0, c)] for c in range(n)], dtype=np.int32)

    layout = CodeLayout(
        variant=variant,
        n=n,
        block_coords=block_coords,
        block_qubits=block_qubits,
        detect_qubits=detect_qubits,
        x_anc_qubits=x_anc_qubits,
        z_anc_qubits=z_anc_qubits,
        n_qubits=int(next_q),
        x_checks=x_checks,
        z_checks=z_checks,
        logical_x_blocks=logical_x_blocks,
        logical_z_blocks=logical_z_blocks,
    )
    n_stabs = x_checks.n_ancillas + z_checks.n_ancillas
    if n_stabs != n_blocks - 1:
        raise AssertionError(
            f"{n_stabs} checks over {n_blocks} blocks do not leave one logical qubit")
    return layout
