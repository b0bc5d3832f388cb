"""Pauli algebra, error frames, and stochastic two-tier noise channels.

Errors are tracked as unsigned Paulis (phases discarded): a Pauli is a pair
of bits (x, z) and a frame is a pair of bit vectors over the physical
qubits.  Noise is a mixture of a dephasing channel and a depolarising
channel, applied at one of two rates: ``local`` (short-range error-detect
gates, rate ``p_d``) or ``global`` (long-range parity-check gates, ``p_g``).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

LOCAL = "local"
GLOBAL = "global"


class Pauli(IntEnum):
    """Single-qubit Pauli, encoded as x_bit + 2*z_bit so that products XOR."""

    I = 0
    X = 1
    Z = 2
    Y = 3

    @property
    def x_bit(self) -> int:
        return self.value & 1

    @property
    def z_bit(self) -> int:
        return (self.value >> 1) & 1


def multiply(a: Pauli, b: Pauli) -> Pauli:
    """Group product modulo phase: (x, z) bits add over GF(2)."""
    return Pauli(a.value ^ b.value)


def paulis_anticommute(a: Pauli, b: Pauli) -> bool:
    """True iff a and b anticommute (symplectic form is odd)."""
    return bool((a.x_bit & b.z_bit) ^ (a.z_bit & b.x_bit))


# Two-qubit Pauli tables, in the fixed order IX, IY, IZ, XI, XX, ..., ZZ.
# Row k of _PAULI2 holds (x1, z1, x2, z2) for the k-th non-identity pair.
_SINGLES = [Pauli.I, Pauli.X, Pauli.Y, Pauli.Z]
TWO_QUBIT_ORDER: tuple[tuple[Pauli, Pauli], ...] = tuple(
    (a, b) for a in _SINGLES for b in _SINGLES if not (a is Pauli.I and b is Pauli.I)
)
_PAULI2 = np.array(
    [(a.x_bit, a.z_bit, b.x_bit, b.z_bit) for a, b in TWO_QUBIT_ORDER], dtype=np.uint8
)
# Dephasing branch for two-qubit gates: uniform over ZI, IZ, ZZ.
TWO_QUBIT_DEPHASING: tuple[tuple[Pauli, Pauli], ...] = (
    (Pauli.Z, Pauli.I),
    (Pauli.I, Pauli.Z),
    (Pauli.Z, Pauli.Z),
)
_DEPH2 = np.array(
    [(a.x_bit, a.z_bit, b.x_bit, b.z_bit) for a, b in TWO_QUBIT_DEPHASING],
    dtype=np.uint8,
)
_PAULI1 = np.array([(p.x_bit, p.z_bit) for p in (Pauli.X, Pauli.Y, Pauli.Z)], dtype=np.uint8)


@dataclass
class PauliFrame:
    """Per-qubit X/Z error bits, propagated through Clifford circuits.

    ``x[q] = z[q] = 1`` encodes a Y on qubit q.  Mutating operations edit
    the arrays in place; a frame is confined to a single trial.
    """

    x: np.ndarray
    z: np.ndarray

    @classmethod
    def zeros(cls, n_qubits: int) -> "PauliFrame":
        return cls(np.zeros(n_qubits, dtype=np.uint8), np.zeros(n_qubits, dtype=np.uint8))

    def __len__(self) -> int:
        return len(self.x)

    def get(self, qubit: int) -> Pauli:
        return Pauli(int(self.x[qubit]) | (int(self.z[qubit]) << 1))

    def apply(self, pauli: Pauli, qubit: int) -> None:
        self.x[qubit] ^= pauli.x_bit
        self.z[qubit] ^= pauli.z_bit

    def copy(self) -> "PauliFrame":
        return PauliFrame(self.x.copy(), self.z.copy())

    def xor(self, other: "PauliFrame") -> "PauliFrame":
        return PauliFrame(self.x ^ other.x, self.z ^ other.z)

    def is_identity(self) -> bool:
        return not (self.x.any() or self.z.any())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliFrame):
            return NotImplemented
        return bool(np.array_equal(self.x, other.x) and np.array_equal(self.z, other.z))


def propagate_cnot(frame: PauliFrame, control: int, target: int) -> PauliFrame:
    """Push the frame through an ideal CNOT (in place).

    X on the control copies to the target; Z on the target copies to the
    control; everything else is untouched.
    """
    n = len(frame)
    if control == target or not (0 <= control < n) or not (0 <= target < n):
        raise IndexError(f"bad CNOT qubits ({control}, {target}) for frame of length {n}")
    frame.x[target] ^= frame.x[control]
    frame.z[control] ^= frame.z[target]
    return frame


@dataclass
class NoiseModel:
    """Two-tier stochastic Pauli noise.

    p_d: error rate of local (error-detect) operations.
    p_g: error rate of global (parity-check) operations.
    f_depo: weight of the depolarising channel; the dephasing channel has
        weight 1 - f_depo.
    seed: master seed for the model's own sampling stream.
    """

    p_d: float
    p_g: float
    f_depo: float = 0.0
    seed: int = 0
    _rng: np.random.Generator | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        for name in ("p_d", "p_g"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if not 0.0 <= self.f_depo <= 1.0:
            raise ValueError(f"f_depo={self.f_depo} outside [0, 1]")
        if self.p_d > self.p_g:
            warnings.warn(
                f"p_d={self.p_d} > p_g={self.p_g}: outside the studied regime "
                "(local gates noisier than global ones)",
                stacklevel=2,
            )

    @property
    def f_deph(self) -> float:
        return 1.0 - self.f_depo

    def rate(self, tier: str) -> float:
        if tier == LOCAL:
            return self.p_d
        if tier == GLOBAL:
            return self.p_g
        raise ValueError(f"unknown tier {tier!r}")

    @property
    def rng(self) -> np.random.Generator:
        if self._rng is None:
            self._rng = np.random.Generator(
                np.random.Philox(key=np.array([np.uint64(self.seed), np.uint64(0)]))
            )
        return self._rng


def trial_rng(master_seed: int, point_index: int, trial_index: int) -> np.random.Generator:
    """Counter-based per-trial stream: Philox keyed by (seed, point, trial).

    Trials are reproducible independently of execution order or thread
    count because every trial owns its own key.
    """
    lo = (np.uint64(point_index) << np.uint64(32)) | np.uint64(trial_index)
    return np.random.Generator(np.random.Philox(key=np.array([np.uint64(master_seed), lo])))


def _pick_from_uniform(u: np.ndarray, f_depo: float, n_branch: int) -> tuple[np.ndarray, np.ndarray]:
    """Split conditional uniforms into (is_depolarising, branch_index).

    ``u`` must already be conditioned on "an error happened" (uniform on
    [0, 1)).  The depolarising branch picks uniformly among ``n_branch``
    entries of the full Pauli table; the dephasing branch among the Z-type
    entries.
    """
    depo = u < f_depo
    idx = np.empty(len(u), dtype=np.int64)
    if f_depo > 0.0:
        t = u[depo] / f_depo
        idx[depo] = np.minimum((t * n_branch).astype(np.int64), n_branch - 1)
    if f_depo < 1.0:
        t = (u[~depo] - f_depo) / (1.0 - f_depo)
        k = 3 if n_branch == 15 else 1
        idx[~depo] = np.minimum((t * k).astype(np.int64), k - 1)
    return depo, idx


def sample_one_qubit_errors(
    rng: np.random.Generator, p: float, f_depo: float, count: int
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised one-qubit channel: returns (x_bits, z_bits) of length count.

    With probability 1-p the error is I; otherwise the dephasing branch
    gives Z and the depolarising branch a uniform pick from {X, Y, Z}.
    """
    x = np.zeros(count, dtype=np.uint8)
    z = np.zeros(count, dtype=np.uint8)
    u = rng.random(count)
    err = u < p
    n_err = int(err.sum())
    if n_err == 0:
        return x, z
    v = u[err] / p
    depo, idx = _pick_from_uniform(v, f_depo, 3)
    xe = np.zeros(n_err, dtype=np.uint8)
    ze = np.ones(n_err, dtype=np.uint8)  # dephasing branch: Z
    if depo.any():
        xe[depo] = _PAULI1[idx[depo], 0]
        ze[depo] = _PAULI1[idx[depo], 1]
    x[err] = xe
    z[err] = ze
    return x, z


def sample_two_qubit_errors(
    rng: np.random.Generator, p: float, f_depo: float, count: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised two-qubit channel: returns (x1, z1, x2, z2) bit arrays.

    Dephasing branch is uniform over {ZI, IZ, ZZ}; depolarising branch
    uniform over the 15 non-identity two-qubit Paulis.
    """
    out = [np.zeros(count, dtype=np.uint8) for _ in range(4)]
    u = rng.random(count)
    err = u < p
    n_err = int(err.sum())
    if n_err == 0:
        return out[0], out[1], out[2], out[3]
    v = u[err] / p
    depo, idx = _pick_from_uniform(v, f_depo, 15)
    bits = np.empty((n_err, 4), dtype=np.uint8)
    if depo.any():
        bits[depo] = _PAULI2[idx[depo]]
    nd = ~depo
    if nd.any():
        bits[nd] = _DEPH2[idx[nd]]
    for k in range(4):
        out[k][err] = bits[:, k]
    return out[0], out[1], out[2], out[3]


def sample_one_qubit_error(model: NoiseModel, tier: str, rng: np.random.Generator | None = None) -> Pauli:
    """Draw a single error from the one-qubit channel at the given tier."""
    rng = model.rng if rng is None else rng
    x, z = sample_one_qubit_errors(rng, model.rate(tier), model.f_depo, 1)
    return Pauli(int(x[0]) | (int(z[0]) << 1))


def sample_two_qubit_error(
    model: NoiseModel, tier: str, rng: np.random.Generator | None = None
) -> tuple[Pauli, Pauli]:
    """Draw a single error from the two-qubit channel at the given tier."""
    rng = model.rng if rng is None else rng
    x1, z1, x2, z2 = sample_two_qubit_errors(rng, model.rate(tier), model.f_depo, 1)
    return (
        Pauli(int(x1[0]) | (int(z1[0]) << 1)),
        Pauli(int(x2[0]) | (int(z2[0]) << 1)),
    )


def flip_outcome(
    model: NoiseModel,
    tier: str,
    outcome: int,
    basis: str = "x",
    rng: np.random.Generator | None = None,
) -> int:
    """Noisy readout/preparation: sample an error just before the readout.

    The classical bit flips iff the sampled Pauli anticommutes with the
    measured (prepared) basis operator: Z or Y flips an X-basis outcome,
    X or Y flips a Z-basis outcome.
    """
    e = sample_one_qubit_error(model, tier, rng)
    if basis == "x":
        return outcome ^ e.z_bit
    if basis == "z":
        return outcome ^ e.x_bit
    raise ValueError(f"unknown basis {basis!r}")


@dataclass
class FaultTally:
    """Counts of physically meaningful fault components, for rate checks.

    Gate errors count their x and z components per qubit slot (a Y adds to
    both).  Initialisation and measurement errors count only the component
    that anticommutes with the prepared/measured basis operator.
    """

    z_faults: int = 0
    x_faults: int = 0

    def add_gate_bits(self, *bit_arrays_xz: tuple[np.ndarray, np.ndarray]) -> None:
        for x_bits, z_bits in bit_arrays_xz:
            self.x_faults += int(x_bits.sum())
            self.z_faults += int(z_bits.sum())

    def add_basis_flips(self, flips: np.ndarray, basis: str) -> None:
        n = int(flips.sum())
        if basis == "x":
            self.z_faults += n
        else:
            self.x_faults += n

    @property
    def ratio(self) -> float:
        return self.z_faults / max(1, self.x_faults)
