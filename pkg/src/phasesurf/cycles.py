"""Noisy stabiliser-check schedule executed at gate level.

One scheduled round is either a DX round (local error detection on every
block, concatenated variant only, followed by all x-checks) or a Z round
(all z-checks).  DX and Z rounds interleave at ratio F : 1; a pure-phase
experiment runs DX rounds only.  A final noiseless round closes all open
syndromes so the decoder's residual is adjudicable.

Circuits follow the fixed forms:

  error detect   detect ancilla in |+>, CNOT(da->q1), CNOT(da->q2),
                 x-basis readout; on detection a Z correction is applied to
                 the first or second physical qubit (policy) and the block
                 joins the risk list.  All operations at the local tier.
  x-check        ancilla in |+>, CNOT(anc->first qubit) per member block in
                 NW, NE, SW, SE lock step, x-basis readout.  Global tier.
  z-check        standard: ancilla in |0>, CNOT(data->anc) per member,
                 z-basis readout.  Concatenated: ancilla pair prepared as a
                 logical |0> (|+>, |0>, CNOT within the pair), transversal
                 CNOTs from each member block, both qubits read out in the
                 z basis; the check bit is the parity of the two outcomes.
                 Global tier.

Noise is applied after each ideal gate; initialisation and readout faults
keep only the component that anticommutes with the prepared/measured basis
operator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import pauli as P
from .layout import CONCATENATED, STANDARD, CodeLayout
from .pauli import GLOBAL, LOCAL, FaultTally, NoiseModel, PauliFrame

ROUND_DX = "dx"
ROUND_Z = "z"


@dataclass
class Schedule:
    """Round plan: F x-check rounds per z-check round, 3n rounds by default."""

    frequency: int = 1
    total_rounds: int | None = None
    final_perfect_round: bool = True
    x_only: bool = False

    def __post_init__(self) -> None:
        if self.frequency < 1:
            raise ValueError("frequency must be >= 1")
        if self.total_rounds is not None and self.total_rounds < 1:
            raise ValueError("total_rounds must be >= 1")

    def rounds_for(self, n: int) -> int:
        return self.total_rounds if self.total_rounds is not None else 3 * n

    def round_kinds(self, n: int) -> list[str]:
        kinds = []
        in_pattern = 0
        for _ in range(self.rounds_for(n)):
            if self.x_only or in_pattern < self.frequency:
                kinds.append(ROUND_DX)
                in_pattern += 1
            else:
                kinds.append(ROUND_Z)
                in_pattern = 0
        return kinds


@dataclass
class SyndromeRecord:
    """Measured check bits, one row per scheduled round of each type."""

    x_bits: np.ndarray            # (Rx, Ax) uint8
    z_bits: np.ndarray            # (Rz, Az) uint8
    x_rounds: np.ndarray          # (Rx,) schedule round of each x row
    z_rounds: np.ndarray          # (Rz,)
    detect_bits: np.ndarray | None = None  # (Rx, B) uint8, concatenated only

    @property
    def n_x_rounds(self) -> int:
        return self.x_bits.shape[0]

    @property
    def n_z_rounds(self) -> int:
        return self.z_bits.shape[0]

    def x_ordinal_of_round(self) -> dict[int, int]:
        return {int(sr): k for k, sr in enumerate(self.x_rounds)}


@dataclass
class RiskList:
    """(block, schedule round) pairs where the phase-error detect fired."""

    entries: np.ndarray  # (K, 2) int32

    @classmethod
    def empty(cls) -> "RiskList":
        return cls(np.zeros((0, 2), dtype=np.int32))

    def __len__(self) -> int:
        return len(self.entries)

    def as_set(self) -> set[tuple[int, int]]:
        return {(int(b), int(r)) for b, r in self.entries}

    def as_mask(self, n_blocks: int, record: SyndromeRecord) -> np.ndarray:
        """Boolean (B, Rx) mask aligned with the x-round ordinals."""
        mask = np.zeros((n_blocks, record.n_x_rounds), dtype=np.uint8)
        ordinal = record.x_ordinal_of_round()
        for b, sr in self.entries:
            k = ordinal.get(int(sr))
            if k is not None:
                mask[int(b), k] = 1
        return mask


class TrialNoise:
    """Stochastic fault source for one trial (a thin sampler over one rng)."""

    def __init__(self, model: NoiseModel, rng: np.random.Generator | None = None,
                 tally: FaultTally | None = None):
        self.model = model
        self.rng = model.rng if rng is None else rng
        self.tally = tally

    def flips(self, tier: str, count: int, basis: str) -> np.ndarray:
        x, z = P.sample_one_qubit_errors(self.rng, self.model.rate(tier),
                                         self.model.f_depo, count)
        out = z if basis == "x" else x
        if self.tally is not None:
            self.tally.add_basis_flips(out, basis)
        return out

    def pair_errors(self, tier: str, count: int):
        bits = P.sample_two_qubit_errors(self.rng, self.model.rate(tier),
                                         self.model.f_depo, count)
        if self.tally is not None:
            x1, z1, x2, z2 = bits
            self.tally.add_gate_bits((x1, z1), (x2, z2))
        return bits


class PerfectNoise:
    """Noiseless source used for the final round and for injection runs."""

    def flips(self, tier: str, count: int, basis: str) -> np.ndarray:
        return np.zeros(count, dtype=np.uint8)

    def pair_errors(self, tier: str, count: int):
        z = np.zeros(count, dtype=np.uint8)
        return z, z.copy(), z.copy(), z.copy()


class SitePlanNoise(PerfectNoise):
    """Dry-run source that enumerates fault sites without injecting any."""

    def __init__(self) -> None:
        self.sites: list[tuple[str, str]] = []  # (kind, tier); one entry per op

    def flips(self, tier: str, count: int, basis: str) -> np.ndarray:
        self.sites.extend(("1q", tier) for _ in range(count))
        return super().flips(tier, count, basis)

    def pair_errors(self, tier: str, count: int):
        self.sites.extend(("2q", tier) for _ in range(count))
        return super().pair_errors(tier, count)


class InjectionNoise(PerfectNoise):
    """Noiseless source that places one chosen Pauli fault at one op site.

    For a two-qubit site the payload indexes the 15 non-identity pairs; for
    a one-qubit site any payload means "the anticommuting component", i.e.
    the outcome or preparation flips.
    """

    def __init__(self, site: int, payload: int = 0):
        self.site = site
        self.payload = payload
        self._cursor = 0

    def flips(self, tier: str, count: int, basis: str) -> np.ndarray:
        out = np.zeros(count, dtype=np.uint8)
        if self._cursor <= self.site < self._cursor + count:
            out[self.site - self._cursor] = 1
        self._cursor += count
        return out

    def pair_errors(self, tier: str, count: int):
        bits = [np.zeros(count, dtype=np.uint8) for _ in range(4)]
        if self._cursor <= self.site < self._cursor + count:
            row = P._PAULI2[self.payload]
            k = self.site - self._cursor
            for j in range(4):
                bits[j][k] = row[j]
        self._cursor += count
        return bits[0], bits[1], bits[2], bits[3]


def _as_noise(noise) -> object:
    return TrialNoise(noise) if isinstance(noise, NoiseModel) else noise


def _direction_gates(layout: CodeLayout, kind: str):
    """Static per-direction (ancilla index, block index) gate lists."""
    geo = layout.checks(kind)
    gates = []
    for d in range(4):
        mask = geo.anc_blocks[:, d] >= 0
        gates.append((np.nonzero(mask)[0].astype(np.int32),
                      geo.anc_blocks[mask, d].astype(np.int32)))
    return gates


_GATE_CACHE: dict[tuple[int, str, str, int], list] = {}


def _gates(layout: CodeLayout, kind: str):
    key = (id(layout), layout.variant, kind, layout.n)
    if key not in _GATE_CACHE:
        _GATE_CACHE[key] = _direction_gates(layout, kind)
    return _GATE_CACHE[key]


def correction_policy(model: NoiseModel) -> str:
    """Which physical qubit takes the detected-phase correction.

    The first qubit when local gates are much better (p_d/p_g < 0.5), the
    second otherwise, so that a likely-spurious correction stays invisible
    to the parity checks and can be undone by the next detect round.
    """
    ratio = model.p_d / model.p_g if model.p_g > 0 else 1.0
    return "first" if ratio < 0.5 else "second"


def run_error_detection(layout: CodeLayout, frame: PauliFrame, noise,
                        schedule_round: int = 0, policy: str = "first"):
    """Local XX detection on every block; returns (detections, risk entries)."""
    if layout.variant != CONCATENATED:
        raise ValueError("error detection requires the concatenated variant")
    if policy not in ("first", "second"):
        raise ValueError(f"unknown correction policy {policy!r}")
    noise = _as_noise(noise)
    nb = layout.n_blocks
    q0 = layout.block_qubits[:, 0]
    q1 = layout.block_qubits[:, 1]
    da = layout.detect_qubits

    frame.x[da] = 0
    frame.z[da] = noise.flips(LOCAL, nb, "x")
    for q in (q0, q1):
        # CNOT(da -> q): x copies down, z copies up; then the gate fault.
        frame.x[q] ^= frame.x[da]
        frame.z[da] ^= frame.z[q]
        ex_a, ez_a, ex_q, ez_q = noise.pair_errors(LOCAL, nb)
        frame.x[da] ^= ex_a
        frame.z[da] ^= ez_a
        frame.x[q] ^= ex_q
        frame.z[q] ^= ez_q
    detections = frame.z[da] ^ noise.flips(LOCAL, nb, "x")

    fired = np.nonzero(detections)[0]
    target = q0 if policy == "first" else q1
    frame.z[target[fired]] ^= 1
    risk_entries = [(int(b), int(schedule_round)) for b in fired]
    return detections, risk_entries


def run_x_check_round(layout: CodeLayout, frame: PauliFrame, noise) -> np.ndarray:
    """All x-checks of one round; returns the measured bits per ancilla."""
    noise = _as_noise(noise)
    anc = layout.x_anc_qubits
    na = len(anc)
    frame.x[anc] = 0
    frame.z[anc] = noise.flips(GLOBAL, na, "x")
    for anc_idx, blocks in _gates(layout, "x"):
        a_q = anc[anc_idx]
        t_q = layout.block_qubits[blocks, 0]
        # CNOT(anc -> data first qubit)
        frame.x[t_q] ^= frame.x[a_q]
        frame.z[a_q] ^= frame.z[t_q]
        ex_a, ez_a, ex_t, ez_t = noise.pair_errors(GLOBAL, len(a_q))
        frame.x[a_q] ^= ex_a
        frame.z[a_q] ^= ez_a
        frame.x[t_q] ^= ex_t
        frame.z[t_q] ^= ez_t
    return frame.z[anc] ^ noise.flips(GLOBAL, na, "x")


def run_z_check_round(layout: CodeLayout, frame: PauliFrame, noise) -> np.ndarray:
    """All z-checks of one round; returns one parity bit per check."""
    noise = _as_noise(noise)
    na = layout.z_checks.n_ancillas
    a1 = layout.z_anc_qubits[:, 0]
    if layout.variant == STANDARD:
        frame.z[a1] = 0
        frame.x[a1] = noise.flips(GLOBAL, na, "z")
        for anc_idx, blocks in _gates(layout, "z"):
            aq = a1[anc_idx]
            dq = layout.block_qubits[blocks, 0]
            # CNOT(data -> anc)
            frame.x[aq] ^= frame.x[dq]
            frame.z[dq] ^= frame.z[aq]
            ex_d, ez_d, ex_a, ez_a = noise.pair_errors(GLOBAL, len(aq))
            frame.x[dq] ^= ex_d
            frame.z[dq] ^= ez_d
            frame.x[aq] ^= ex_a
            frame.z[aq] ^= ez_a
        return frame.x[a1] ^ noise.flips(GLOBAL, na, "z")

    a2 = layout.z_anc_qubits[:, 1]
    # Logical |0> of the block code is a Bell pair: |+>, |0>, CNOT within.
    frame.x[a1] = 0
    frame.z[a1] = noise.flips(GLOBAL, na, "x")
    frame.z[a2] = 0
    frame.x[a2] = noise.flips(GLOBAL, na, "z")
    frame.x[a2] ^= frame.x[a1]
    frame.z[a1] ^= frame.z[a2]
    e1x, e1z, e2x, e2z = noise.pair_errors(GLOBAL, na)
    frame.x[a1] ^= e1x
    frame.z[a1] ^= e1z
    frame.x[a2] ^= e2x
    frame.z[a2] ^= e2z
    for anc_idx, blocks in _gates(layout, "z"):
        for col, anc_q in ((0, a1), (1, a2)):
            aq = anc_q[anc_idx]
            dq = layout.block_qubits[blocks, col]
            # transversal CNOT(data -> anc)
            frame.x[aq] ^= frame.x[dq]
            frame.z[dq] ^= frame.z[aq]
            ex_d, ez_d, ex_a, ez_a = noise.pair_errors(GLOBAL, len(aq))
            frame.x[dq] ^= ex_d
            frame.z[dq] ^= ez_d
            frame.x[aq] ^= ex_a
            frame.z[aq] ^= ez_a
    m1 = frame.x[a1] ^ noise.flips(GLOBAL, na, "z")
    m2 = frame.x[a2] ^ noise.flips(GLOBAL, na, "z")
    return m1 ^ m2


@dataclass
class CycleResult:
    record: SyndromeRecord
    risk: RiskList
    truth: PauliFrame
    round_kinds: list[str]
    history: list[PauliFrame] | None = None
    fault_sites: list[tuple[str, str]] | None = field(default=None, repr=False)


def run_schedule(layout: CodeLayout, model: NoiseModel, schedule: Schedule,
                 rng: np.random.Generator | None = None, *,
                 policy: str | None = None,
                 tally: FaultTally | None = None,
                 keep_history: bool = False,
                 noise_override=None) -> CycleResult:
    """Execute the full round plan plus the final noiseless round."""
    if policy is None:
        policy = correction_policy(model)
    if noise_override is not None:
        noise = noise_override
    else:
        noise = TrialNoise(model, rng=rng, tally=tally)
    perfect = PerfectNoise()

    kinds = schedule.round_kinds(layout.n)
    concat = layout.variant == CONCATENATED
    frame = PauliFrame.zeros(layout.n_qubits)
    x_rows: list[np.ndarray] = []
    z_rows: list[np.ndarray] = []
    x_rounds: list[int] = []
    z_rounds: list[int] = []
    detect_rows: list[np.ndarray] = []
    risk_entries: list[tuple[int, int]] = []
    history: list[PauliFrame] | None = [] if keep_history else None

    def one_round(kind: str, sr: int, src) -> None:
        if kind == ROUND_DX:
            if concat:
                detections, risk = run_error_detection(layout, frame, src, sr, policy)
                detect_rows.append(detections.copy())
                risk_entries.extend(risk)
            x_rows.append(run_x_check_round(layout, frame, src))
            x_rounds.append(sr)
        else:
            z_rows.append(run_z_check_round(layout, frame, src))
            z_rounds.append(sr)
        if history is not None:
            history.append(frame.copy())

    for sr, kind in enumerate(kinds):
        one_round(kind, sr, noise)

    if schedule.final_perfect_round:
        sr = len(kinds)
        one_round(ROUND_DX, sr, perfect)
        kinds = kinds + [ROUND_DX]
        if not schedule.x_only:
            one_round(ROUND_Z, sr + 1, perfect)
            kinds = kinds + [ROUND_Z]

    ax = layout.x_checks.n_ancillas
    az = layout.z_checks.n_ancillas
    record = SyndromeRecord(
        x_bits=np.array(x_rows, dtype=np.uint8).reshape(-1, ax),
        z_bits=np.array(z_rows, dtype=np.uint8).reshape(-1, az),
        x_rounds=np.array(x_rounds, dtype=np.int32),
        z_rounds=np.array(z_rounds, dtype=np.int32),
        detect_bits=(np.array(detect_rows, dtype=np.uint8).reshape(-1, layout.n_blocks)
                     if concat else None),
    )
    risk = RiskList(np.array(risk_entries, dtype=np.int32).reshape(-1, 2))
    return CycleResult(record=record, risk=risk, truth=frame,
                       round_kinds=kinds, history=history)


def enumerate_fault_sites(layout: CodeLayout, model: NoiseModel,
                          schedule: Schedule) -> list[tuple[str, str]]:
    """One (kind, tier) entry per noisy op site, in schedule order."""
    plan = SitePlanNoise()
    run_schedule(layout, model, schedule, noise_override=plan,
                 policy=correction_policy(model))
    return plan.sites


def run_with_injected_fault(layout: CodeLayout, model: NoiseModel, schedule: Schedule,
                            site: int, payload: int = 0) -> CycleResult:
    """Replay the schedule noiselessly except for one injected fault."""
    injector = InjectionNoise(site, payload)
    return run_schedule(layout, model, schedule, noise_override=injector,
                        policy=correction_policy(model))


def fixture_to_json(layout: CodeLayout, model: NoiseModel, schedule: Schedule,
                    result: CycleResult, meta: dict | None = None) -> str:
    """Round-major serialisation of one trial for decoder fixtures."""
    payload = {
        "format": "phasesurf-fixture-v1",
        "variant": layout.variant,
        "n": layout.n,
        "noise": {"p_d": model.p_d, "p_g": model.p_g, "f_depo": model.f_depo},
        "schedule": {
            "frequency": schedule.frequency,
            "total_rounds": schedule.rounds_for(layout.n),
            "final_perfect_round": schedule.final_perfect_round,
            "x_only": schedule.x_only,
        },
        "round_kinds": result.round_kinds,
        "x_rounds": result.record.x_rounds.tolist(),
        "z_rounds": result.record.z_rounds.tolist(),
        "x_bits": result.record.x_bits.tolist(),
        "z_bits": result.record.z_bits.tolist(),
        "detect_bits": (result.record.detect_bits.tolist()
                        if result.record.detect_bits is not None else None),
        "risk": result.risk.entries.tolist(),
        "truth": {"x": result.truth.x.tolist(), "z": result.truth.z.tolist()},
        "meta": meta or {},
    }
    return json.dumps(payload, sort_keys=True)


def fixture_from_json(text: str):
    """Parse a fixture back into (record, risk, truth, payload)."""
    payload = json.loads(text)
    if payload.get("format") != "phasesurf-fixture-v1":
        raise ValueError("not a phasesurf fixture")
    record = SyndromeRecord(
        x_bits=np.array(payload["x_bits"], dtype=np.uint8),
        z_bits=np.array(payload["z_bits"], dtype=np.uint8),
        x_rounds=np.array(payload["x_rounds"], dtype=np.int32),
        z_rounds=np.array(payload["z_rounds"], dtype=np.int32),
        detect_bits=(np.array(payload["detect_bits"], dtype=np.uint8)
                     if payload["detect_bits"] is not None else None),
    )
    risk = RiskList(np.array(payload["risk"], dtype=np.int32).reshape(-1, 2))
    truth = PauliFrame(np.array(payload["truth"]["x"], dtype=np.uint8),
                       np.array(payload["truth"]["z"], dtype=np.uint8))
    return record, risk, truth, payload
