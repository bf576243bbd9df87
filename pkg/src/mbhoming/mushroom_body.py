"""Sparse associative memory: PN->KC expansion, k-WTA, MBON weight banks.

Five output neurons share one Kenyon-cell population per hemisphere:
left/right banks in hemispheres A and B plus a nest bank.  Learning is
one-shot synaptic depression (weights drop from 1 to 0 on the active KC
set); familiarity is the mean surviving weight over the active set, so
0 means fully familiar and 1 fully novel.
"""

from dataclasses import dataclass, field
from enum import Enum
import struct

import numpy as np


class MBONId(Enum):
    LEFT_A = 0
    RIGHT_A = 1
    LEFT_B = 2
    RIGHT_B = 3
    NEST = 4


# Fixed storage and wire order for the five banks.
MBON_ORDER = (MBONId.LEFT_A, MBONId.RIGHT_A, MBONId.LEFT_B, MBONId.RIGHT_B,
              MBONId.NEST)
N_MBON = len(MBON_ORDER)

WEIGHT_MAGIC = b"MBW1"
WEIGHT_HEADER_SIZE = 24  # magic + five cumulative per-bank counts (u32 LE)

# Rows per chunk when drawing KC connection sets; fixed so the RNG stream,
# and therefore the matrix, depends only on (n_pn, n_kc, fan_in, seed).
_BUILD_CHUNK = 4096


@dataclass(frozen=True, eq=False)
class ProjectionMatrix:
    """Fixed semi-random PN->KC wiring: fan_in distinct PNs per KC."""

    n_pn: int
    n_kc: int
    fan_in: int
    seed: int
    connections: np.ndarray = field(repr=False)  # (n_kc, fan_in) int32


def build_projection(n_pn: int, n_kc: int, fan_in: int, seed: int) -> ProjectionMatrix:
    """Draw each KC's PN set uniformly without replacement, seeded."""
    if n_kc < 1:
        raise ValueError("n_kc must be >= 1")
    if not 1 <= fan_in <= n_pn:
        raise ValueError(f"fan_in must be in [1, n_pn={n_pn}], got {fan_in}")
    rng = np.random.default_rng(seed)
    rows = []
    for start in range(0, n_kc, _BUILD_CHUNK):
        m = min(_BUILD_CHUNK, n_kc - start)
        # argsort of i.i.d. uniforms = random permutation per row; the first
        # fan_in entries are a uniform subset without replacement.
        u = rng.random((m, n_pn))
        rows.append(np.argsort(u, axis=1)[:, :fan_in])
    conn = np.sort(np.vstack(rows), axis=1).astype(np.int32)
    conn.setflags(write=False)
    return ProjectionMatrix(n_pn=n_pn, n_kc=n_kc, fan_in=fan_in, seed=seed,
                            connections=conn)


@dataclass(frozen=True)
class KCActivation:
    """Sorted indices of the k winning Kenyon cells."""

    active: np.ndarray  # sorted unique int32, length k

    @property
    def k(self) -> int:
        return len(self.active)


def _top_k(pre: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest values; ties broken by lower index."""
    n = len(pre)
    if k == n:
        return np.arange(n, dtype=np.int32)
    thresh = np.partition(pre, n - k)[n - k]  # k-th largest value
    above = np.flatnonzero(pre > thresh)
    ties = np.flatnonzero(pre == thresh)[: k - len(above)]
    return np.sort(np.concatenate([above, ties])).astype(np.int32)


def kc_preactivation(pn: np.ndarray, proj: ProjectionMatrix) -> np.ndarray:
    """Per-KC input sums for one PN vector (or a batch, rows = vectors)."""
    pn = np.asarray(pn, dtype=float)
    if pn.shape[-1] != proj.n_pn:
        raise ValueError(
            f"PN vector length {pn.shape[-1]} != projection n_pn {proj.n_pn}")
    return pn[..., proj.connections].sum(axis=-1)


def encode(pn, proj: ProjectionMatrix, k: int) -> KCActivation:
    """k-winner-take-all code for one PN vector."""
    if not 1 <= k <= proj.n_kc:
        raise ValueError(f"k must be in [1, n_kc={proj.n_kc}], got {k}")
    pre = kc_preactivation(np.asarray(pn, dtype=float).ravel(), proj)
    return KCActivation(active=_top_k(pre, k))


def encode_batch(pn_rows: np.ndarray, proj: ProjectionMatrix, k: int,
                 chunk: int = 64) -> np.ndarray:
    """Encode many PN vectors; returns (n_views, k) sorted index rows.

    Uses the same per-row arithmetic as `encode`, chunked to bound the
    memory of the gather (chunk * n_kc * fan_in floats).
    """
    pn_rows = np.asarray(pn_rows, dtype=float)
    if not 1 <= k <= proj.n_kc:
        raise ValueError(f"k must be in [1, n_kc={proj.n_kc}], got {k}")
    out = np.empty((len(pn_rows), k), dtype=np.int32)
    for start in range(0, len(pn_rows), chunk):
        pre = kc_preactivation(pn_rows[start:start + chunk], proj)
        for i, row in enumerate(pre):
            out[start + i] = _top_k(row, k)
    return out


@dataclass(frozen=True)
class FamiliarityReadout:
    """Per-MBON novelty indices in [0, 1]; 0 = familiar, 1 = novel."""

    left_a: float
    right_a: float
    left_b: float
    right_b: float
    nest: float

    def value(self, mbon: MBONId) -> float:
        return (self.left_a, self.right_a, self.left_b, self.right_b,
                self.nest)[mbon.value]


class MBONBank:
    """KC->MBON weight vectors, one per MBONId, entries in {0, 1}.

    Learning depresses weights to 0 on the active set and never restores
    them; `learn` mutates in place and expects a single writer.
    """

    def __init__(self, n_kc: int, weights: np.ndarray | None = None):
        if n_kc < 1:
            raise ValueError("n_kc must be >= 1")
        self.n_kc = n_kc
        if weights is None:
            weights = np.ones((N_MBON, n_kc), dtype=np.uint8)
        else:
            weights = np.asarray(weights, dtype=np.uint8)
            if weights.shape != (N_MBON, n_kc):
                raise ValueError("weights must have shape (5, n_kc)")
        self.weights = weights

    def copy(self) -> "MBONBank":
        return MBONBank(self.n_kc, self.weights.copy())

    def __eq__(self, other):
        return (isinstance(other, MBONBank) and self.n_kc == other.n_kc
                and np.array_equal(self.weights, other.weights))

    @property
    def learned_counts(self) -> dict[MBONId, int]:
        zeros = (self.weights == 0).sum(axis=1)
        return {mbon: int(zeros[mbon.value]) for mbon in MBON_ORDER}

    @property
    def total_learned(self) -> int:
        return int((self.weights == 0).sum())

    def learn(self, target: MBONId, kc: KCActivation) -> "MBONBank":
        self.weights[target.value, kc.active] = 0
        return self

    def familiarity(self, mbon: MBONId, kc: KCActivation) -> float:
        return float(self.weights[mbon.value, kc.active].sum()) / kc.k

    def readout(self, kc_a: KCActivation, kc_b: KCActivation) -> FamiliarityReadout:
        """All five indices; hemisphere A also feeds the nest bank."""
        return FamiliarityReadout(
            left_a=self.familiarity(MBONId.LEFT_A, kc_a),
            right_a=self.familiarity(MBONId.RIGHT_A, kc_a),
            left_b=self.familiarity(MBONId.LEFT_B, kc_b),
            right_b=self.familiarity(MBONId.RIGHT_B, kc_b),
            nest=self.familiarity(MBONId.NEST, kc_a),
        )


def learn(bank: MBONBank, target: MBONId, kc: KCActivation) -> MBONBank:
    return bank.learn(target, kc)


def familiarity(bank: MBONBank, mbon: MBONId, kc: KCActivation) -> float:
    return bank.familiarity(mbon, kc)


class WeightFormatError(ValueError):
    """Malformed weight file; `offset` is the byte position of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


def serialize(bank: MBONBank) -> bytes:
    """Compressed sparse rows over the learned (zero) synapses.

    Layout, little-endian: magic "MBW1", then five u32 cumulative counts
    (row ends, one per MBON in MBON_ORDER), then the concatenated sorted
    u32 KC indices of each bank's zeros.  An unlearned bank is exactly
    the 24-byte header.
    """
    rows = [np.flatnonzero(bank.weights[m.value] == 0).astype("<u4")
            for m in MBON_ORDER]
    ends = np.cumsum([len(r) for r in rows]).astype("<u4")
    header = WEIGHT_MAGIC + ends.tobytes()
    return header + np.concatenate(rows, dtype="<u4").tobytes()


def deserialize(data: bytes, n_kc: int) -> MBONBank:
    """Rebuild a bank from `serialize` output; validates the container.

    `n_kc` sizes the dense weight rows; the file stores only the learned
    indices.
    """
    if len(data) < WEIGHT_HEADER_SIZE:
        raise WeightFormatError("truncated header", len(data))
    if data[:4] != WEIGHT_MAGIC:
        raise WeightFormatError(f"bad magic {data[:4]!r}", 0)
    ends = struct.unpack_from("<5I", data, 4)
    prev = 0
    for i, end in enumerate(ends):
        if end < prev:
            raise WeightFormatError("non-monotone row ends", 4 + 4 * i)
        prev = end
    expected = WEIGHT_HEADER_SIZE + 4 * ends[-1]
    if len(data) != expected:
        raise WeightFormatError(
            f"payload length {len(data) - WEIGHT_HEADER_SIZE} does not match "
            f"declared {4 * ends[-1]}", min(len(data), expected))
    indices = np.frombuffer(data, dtype="<u4", offset=WEIGHT_HEADER_SIZE)
    bank = MBONBank(n_kc)
    start = 0
    for m, end in zip(MBON_ORDER, ends):
        row = indices[start:end]
        if len(row):
            steps = np.diff(row)
            if np.any(steps <= 0):
                bad = int(np.argmax(steps <= 0)) + 1
                raise WeightFormatError(
                    f"indices not strictly increasing in bank {m.name}",
                    WEIGHT_HEADER_SIZE + 4 * (start + bad))
            if row[-1] >= n_kc:
                bad = int(np.argmax(row >= n_kc))
                raise WeightFormatError(
                    f"index {int(row[bad])} out of range for n_kc={n_kc}",
                    WEIGHT_HEADER_SIZE + 4 * (start + bad))
            bank.weights[m.value, row] = 0
        start = end
    return bank
