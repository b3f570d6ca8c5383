"""Layered big-integer recursion counting graphic degree sequences.

A non-increasing sequence n-1 >= d_1 >= ... >= d_n >= 0 corresponds to a walk
with steps in {-1, 0, +1} whose running integral certifies graphicality (the
mapping lives in :mod:`graphseq.oracle`).  Counting sequences therefore
reduces to counting weighted walks: ``F(N, y, a)`` is the weighted number of
N-step walks that start at height y, end in {0, -1}, keep ``a`` plus the
running integral non-negative at every step, and land that final total on the
starting parity.
A walk is weighted ``2**z`` where z is its number of flat steps, since a flat
step stands for two distinct sequence fillings.  The counts satisfy

    F(N, y, a) = F(N-1, y+1, a+y+1) + F(N-1, y-1, a+y-1) + 2*F(N-1, y, a+y)

with F = 0 for a < 0, and F(0, y, a) = 1 exactly when y is 0 or -1, a >= 0
and a has the starting parity.  The number of graphic sequences of length n
is then F(n-1, 0, 0) from the even start; the odd start counts the sequences
that dominate but have odd sum.

Layers are stored per height as dense bands over the feasible area range.
Counts are little-endian 60-bit limbs in int64 numpy arrays, so a whole band
advances with a few vectorized adds regardless of how large the counts grow.
Above the stabilization cap the counts are periodic in the area with period
two, so a band keeps exactly two representative values at the cap.
"""

from __future__ import annotations

import struct
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterator

import numpy as np

LIMB_BITS = 60
LIMB_MASK = (1 << LIMB_BITS) - 1

CHECKPOINT_MAGIC = b"GSEQCKPT"
CHECKPOINT_VERSION_PLAIN = 1
CHECKPOINT_VERSION_DIFFERENCE = 2

# serialized layers switch to the difference form beyond this depth: the
# differences carry far fewer digits once the bands are long
DIFFERENCE_DEPTH_THRESHOLD = 64


class Parity(IntEnum):
    """Starting parity of the area; EVEN yields G(n), ODD yields H(n)."""

    EVEN = 0
    ODD = 1


class MemoryBudgetExceeded(Exception):
    """Raised when the next layer would not fit in the configured budget.

    Carries the last complete layer so the caller can checkpoint it.
    """

    def __init__(self, depth: int, layer: "Layer", needed: int, budget: int):
        super().__init__(
            f"advancing to depth {depth} needs ~{needed} bytes, budget is {budget}"
        )
        self.depth = depth
        self.layer = layer
        self.needed = needed
        self.budget = budget


class CheckpointFormatError(Exception):
    """Bad magic bytes or an unknown format version."""


def decrease_cap(n_steps: int, y: int) -> int:
    """Largest possible decrease of the area over n_steps steps from height y.

    Only walks that end in {0, -1} are considered.  For areas at or above
    max(0, decrease_cap) the survival constraint can never bind, so the count
    depends on the area only through its parity.
    """
    if not -n_steps - 1 <= y <= n_steps:
        raise ValueError(f"height {y} unreachable in {n_steps} steps")
    v = n_steps * n_steps - 2 * n_steps * y + 2 * n_steps - y * y + ((n_steps - y) & 1)
    assert v % 4 == 0
    return v // 4


def area_floor(y: int) -> int:
    """Smallest start area that admits any surviving walk from height y.

    A walk from y < 0 ending in {0, -1} must visit y+1, ..., -1 at least once
    each, which costs (|y|-1)|y|/2 = y(y+1)/2 of area; below that everything
    is exactly zero.
    """
    return y * (y + 1) // 2 if y < 0 else 0


def _nlimbs(depth: int) -> int:
    # counts are bounded by the total walk weight 4**depth = 2**(2*depth)
    return (2 * depth + LIMB_BITS - 1) // LIMB_BITS + 1


def _int_to_limbs(value: int, nl: int) -> np.ndarray:
    out = np.zeros(nl, dtype=np.int64)
    for i in range(nl):
        out[i] = value & LIMB_MASK
        value >>= LIMB_BITS
    if value:
        raise OverflowError("value does not fit in the limb budget")
    return out


def _limbs_to_int(limbs: np.ndarray) -> int:
    value = 0
    for i in range(len(limbs) - 1, -1, -1):
        value = (value << LIMB_BITS) | int(limbs[i])
    return value


class Band:
    """Counts for one height: a dense area band [lo, cap+1] of limb vectors."""

    __slots__ = ("lo", "cap", "limbs")

    def __init__(self, lo: int, cap: int, limbs: np.ndarray):
        self.lo = lo
        self.cap = cap
        self.limbs = limbs  # shape (cap + 2 - lo, nlimbs), int64

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Band)
            and self.lo == other.lo
            and self.cap == other.cap
            and self.limbs.shape == other.limbs.shape
            and bool(np.array_equal(self.limbs, other.limbs))
        )


@dataclass
class Layer:
    """All counts at one recursion depth, one band per height.

    ``representation`` is "plain" for F itself or "difference" for the
    transform f(a) = F(a) - F(a-1); difference bands hold Python ints since
    they are only used for (de)serialization and small-scale inspection.
    """

    depth: int
    parity: Parity
    bands: dict
    representation: str = "plain"

    def heights(self) -> list:
        return sorted(self.bands)

    def value(self, y: int, a: int) -> int:
        """F(depth, y, a) (or f for a difference layer), zero off the bands."""
        if a < 0:
            return 0
        band = self.bands.get(y)
        if band is None:
            return 0
        if a < band.lo:
            return 0
        if a > band.cap + 1:
            if self.representation == "plain":
                # periodic in the area above the cap, period two
                a = band.cap + ((a - band.cap) & 1)
            else:
                # F has period two above the cap, so the differences alternate:
                # f(a) = -f(cap+1) for a - cap even, +f(cap+1) for a - cap odd
                top = band.limbs[band.cap + 1 - band.lo]
                return top if (a - band.cap) & 1 else -top
        if self.representation == "plain":
            return _limbs_to_int(band.limbs[a - band.lo])
        return band.limbs[a - band.lo]

    @property
    def nbytes(self) -> int:
        total = 0
        for band in self.bands.values():
            if self.representation == "plain":
                total += band.limbs.nbytes
            else:
                total += sum(sys.getsizeof(v) for v in band.limbs) + 8 * len(band.limbs)
        return total

    def __eq__(self, other) -> bool:
        if not isinstance(other, Layer):
            return NotImplemented
        if (self.depth, self.parity, self.representation) != (
            other.depth,
            other.parity,
            other.representation,
        ):
            return False
        if set(self.bands) != set(other.bands):
            return False
        if self.representation == "plain":
            return all(self.bands[y] == other.bands[y] for y in self.bands)
        return all(
            self.bands[y].lo == other.bands[y].lo
            and self.bands[y].cap == other.bands[y].cap
            and self.bands[y].limbs == other.bands[y].limbs
            for y in self.bands
        )


def initial_layer(parity: Parity) -> Layer:
    """Depth-0 layer: F(0, y, a) = 1 iff y in {0,-1}, a >= 0, a of `parity`."""
    parity = Parity(parity)
    bands = {}
    for y in (-1, 0):
        cap = max(0, decrease_cap(0, y))
        limbs = np.zeros((cap + 2, _nlimbs(0)), dtype=np.int64)
        for a in range(cap + 2):
            if (a & 1) == parity:
                limbs[a, 0] = 1
        bands[y] = Band(0, cap, limbs)
    return Layer(0, parity, bands)


def _read_band_range(bands: dict, y: int, start: int, stop: int, nl: int) -> np.ndarray:
    """Values F(y, a) for a in [start, stop) as a (stop - start, nl) array.

    Reads below the band are zero (boundary / floor pruning), reads above the
    band repeat the two cap representatives by area parity.
    """
    out = np.zeros((stop - start, nl), dtype=np.int64)
    band = bands.get(y)
    if band is None:
        return out
    lo, cap = band.lo, band.cap
    src = band.limbs
    snl = src.shape[1]
    d0 = max(start, lo)
    d1 = min(stop, cap + 2)
    if d0 < d1:
        out[d0 - start : d1 - start, :snl] = src[d0 - lo : d1 - lo]
    if stop > cap + 2:
        t0 = max(start, cap + 2)
        first_even = t0 + ((cap - t0) & 1)  # first a >= t0 with a - cap even
        first_odd = t0 + ((cap + 1 - t0) & 1)
        if first_even < stop:
            out[first_even - start :: 2, :snl] = src[cap - lo]
        if first_odd < stop:
            out[first_odd - start :: 2, :snl] = src[cap + 1 - lo]
    return out


def _carry_normalize(arr: np.ndarray) -> np.ndarray:
    while True:
        carry = arr >> LIMB_BITS
        if not carry.any():
            return arr
        if carry[:, -1].any():
            raise OverflowError("carry out of the top limb")
        arr &= LIMB_MASK
        arr[:, 1:] += carry[:, :-1]


def _advance_band(parent_bands: dict, depth: int, y: int, nl: int) -> Band:
    lo = area_floor(y)
    cap = max(0, decrease_cap(depth, y))
    hi = cap + 1
    up = _read_band_range(parent_bands, y + 1, lo + y + 1, hi + y + 2, nl)
    down = _read_band_range(parent_bands, y - 1, lo + y - 1, hi + y, nl)
    flat = _read_band_range(parent_bands, y, lo + y, hi + y + 1, nl)
    total = up + down + (flat << 1)
    return Band(lo, cap, _carry_normalize(total))


def advance(layer: Layer, workers: int = 1) -> Layer:
    """Produce the layer one depth further.

    The parent layer is read-only and every band of the child is computed
    independently with pure integer arithmetic, so the result is bit-identical
    for any worker count and any evaluation order.
    """
    if layer.representation != "plain":
        raise ValueError("advance expects a plain-representation layer")
    depth = layer.depth + 1
    nl = _nlimbs(depth)
    heights = list(range(-depth - 1, depth + 1))
    parent = layer.bands
    if workers <= 1 or len(heights) < 4:
        bands = {y: _advance_band(parent, depth, y, nl) for y in heights}
    else:
        chunks = np.array_split(np.asarray(heights), workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            def run(chunk):
                return {int(y): _advance_band(parent, depth, int(y), nl) for y in chunk}
            parts = list(pool.map(run, chunks))
        bands = {}
        for part in parts:
            bands.update(part)
    return Layer(depth, layer.parity, bands)


def _estimate_layer_bytes(depth: int) -> int:
    nl = _nlimbs(depth)
    cells = 0
    for y in range(-depth - 1, depth + 1):
        cells += max(0, decrease_cap(depth, y)) + 2 - area_floor(y)
    return cells * nl * 8


def stream_counts(
    max_n: int,
    parity: Parity = Parity.EVEN,
    workers: int = 1,
    memory_limit: int | None = None,
) -> Iterator[tuple]:
    """Yield (n, count, layer) for n = 1..max_n.

    count is G(n) for the even parity and H(n) for the odd one.  If advancing
    would push the transient footprint (parent + child layer) past
    ``memory_limit`` bytes, MemoryBudgetExceeded is raised carrying the last
    complete layer.
    """
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    layer = initial_layer(parity)
    yield 1, layer.value(0, 0), layer
    for n in range(2, max_n + 1):
        depth = n - 1
        if memory_limit is not None:
            needed = layer.nbytes + _estimate_layer_bytes(depth)
            if needed > memory_limit:
                raise MemoryBudgetExceeded(depth, layer, needed, memory_limit)
        layer = advance(layer, workers=workers)
        yield n, layer.value(0, 0), layer


def count_graphic(n: int, parity: Parity = Parity.EVEN, workers: int = 1) -> int:
    """G(n) for Parity.EVEN, H(n) for Parity.ODD (exact)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    for _, value, _ in stream_counts(n, parity, workers=workers):
        pass
    return value


# ---------------------------------------------------------------------------
# difference transform


def to_difference(layer: Layer) -> Layer:
    """Per band, replace F(a) by f(a) = F(a) - F(a-1) (F is zero below lo)."""
    if layer.representation != "plain":
        raise ValueError("layer is already in difference form")
    bands = {}
    for y, band in layer.bands.items():
        values = [_limbs_to_int(band.limbs[i]) for i in range(band.limbs.shape[0])]
        diffs = [values[0]] + [values[i] - values[i - 1] for i in range(1, len(values))]
        bands[y] = Band(band.lo, band.cap, diffs)
    return Layer(layer.depth, layer.parity, bands, representation="difference")


def from_difference(layer: Layer) -> Layer:
    """Invert :func:`to_difference` exactly."""
    if layer.representation != "difference":
        raise ValueError("layer is not in difference form")
    nl = _nlimbs(layer.depth)
    bands = {}
    for y, band in layer.bands.items():
        limbs = np.zeros((len(band.limbs), nl), dtype=np.int64)
        running = 0
        for i, d in enumerate(band.limbs):
            running += d
            limbs[i] = _int_to_limbs(running, nl)
        bands[y] = Band(band.lo, band.cap, limbs)
    return Layer(layer.depth, layer.parity, bands, representation="plain")


# ---------------------------------------------------------------------------
# checkpoints


@dataclass
class Checkpoint:
    """A serializable snapshot of one complete layer."""

    version: int
    parity: Parity
    depth: int
    layer: Layer

    @classmethod
    def of(cls, layer: Layer) -> "Checkpoint":
        version = (
            CHECKPOINT_VERSION_DIFFERENCE
            if layer.depth > DIFFERENCE_DEPTH_THRESHOLD
            else CHECKPOINT_VERSION_PLAIN
        )
        return cls(version, layer.parity, layer.depth, layer)

    def save(self, path) -> None:
        layer = self.layer
        stored = to_difference(layer) if self.version == CHECKPOINT_VERSION_DIFFERENCE else layer
        with open(path, "wb") as fh:
            fh.write(CHECKPOINT_MAGIC)
            fh.write(struct.pack("<IBQQ", self.version, int(self.parity), self.depth,
                                 len(stored.bands)))
            for y in stored.heights():
                band = stored.bands[y]
                fh.write(struct.pack("<qqqQ", y, band.lo, band.cap,
                                     band.cap + 2 - band.lo))
                if stored.representation == "plain":
                    values = (_limbs_to_int(band.limbs[i])
                              for i in range(band.limbs.shape[0]))
                else:
                    values = iter(band.limbs)
                for v in values:
                    digits = str(v).encode("ascii")
                    fh.write(struct.pack("<I", len(digits)))
                    fh.write(digits)

    @classmethod
    def load(cls, path) -> "Checkpoint":
        with open(path, "rb") as fh:
            magic = fh.read(len(CHECKPOINT_MAGIC))
            if magic != CHECKPOINT_MAGIC:
                raise CheckpointFormatError(f"bad magic bytes {magic!r}")
            version, parity, depth, nbands = struct.unpack("<IBQQ", fh.read(21))
            if version not in (CHECKPOINT_VERSION_PLAIN, CHECKPOINT_VERSION_DIFFERENCE):
                raise CheckpointFormatError(f"unsupported format version {version}")
            bands = {}
            for _ in range(nbands):
                y, lo, cap, count = struct.unpack("<qqqQ", fh.read(32))
                values = []
                for _ in range(count):
                    (ln,) = struct.unpack("<I", fh.read(4))
                    values.append(int(fh.read(ln).decode("ascii")))
                bands[y] = (lo, cap, values)
        parity = Parity(parity)
        if version == CHECKPOINT_VERSION_DIFFERENCE:
            diff = Layer(depth, parity,
                         {y: Band(lo, cap, values) for y, (lo, cap, values) in bands.items()},
                         representation="difference")
            layer = from_difference(diff)
        else:
            nl = _nlimbs(depth)
            layer = Layer(depth, parity, {
                y: Band(lo, cap,
                        np.stack([_int_to_limbs(v, nl) for v in values]))
                for y, (lo, cap, values) in bands.items()
            })
        return cls(version, parity, depth, layer)


# ---------------------------------------------------------------------------
# on-demand extension


def extend_counts(
    checkpoint: Checkpoint, max_n: int, memory_limit: int | None = None
) -> list:
    """(n, count) for every n beyond the checkpoint up to max_n.

    One top-down pass to the largest target fills the memo with every
    intermediate (depth, 0, 0) cell along the way (the flat step always links
    consecutive depths at the origin), so streaming costs no extra work.
    """
    base_depth = checkpoint.depth
    if max_n < base_depth + 2:
        raise ValueError("max_n must exceed the checkpoint's n")
    value, memo = _extend(checkpoint, max_n - 1, memory_limit)
    out = []
    for n in range(base_depth + 2, max_n):
        out.append((n, memo[(n - 1, 0, 0)]))
    out.append((max_n, value))
    return out


def extend_on_demand(
    checkpoint: Checkpoint, target_depth: int, memory_limit: int | None = None
) -> int:
    """F(target_depth, 0, 0) by memoized top-down recursion over the checkpoint.

    Only cells inside the dependence cone of (target_depth, 0, 0) are ever
    materialized, and areas at or above the stabilization cap are folded onto
    the two cap representatives before memoization, which keeps the map small
    when the target is not far beyond the checkpoint.
    """
    value, _ = _extend(checkpoint, target_depth, memory_limit)
    return value


def _extend(
    checkpoint: Checkpoint, target_depth: int, memory_limit: int | None = None
) -> tuple:
    base = checkpoint.layer
    if base.representation != "plain":
        base = from_difference(base)
    if target_depth <= base.depth:
        raise ValueError("target depth must exceed the checkpoint depth")
    memo: dict = {}
    budget_cells = None
    if memory_limit is not None:
        # a memo cell costs roughly a key tuple plus a count of ~depth/4 digits
        budget_cells = max(1, memory_limit // (120 + target_depth // 2))
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 10 * (target_depth - base.depth) + 1000))

    def walk_count(depth: int, y: int, a: int) -> int:
        if a < 0 or y > depth or y < -depth - 1:
            return 0
        if y < 0 and a < area_floor(y):
            return 0
        if depth == base.depth:
            return base.value(y, a)
        cap = max(0, decrease_cap(depth, y))
        if a > cap + 1:
            a = cap + ((a - cap) & 1)
        key = (depth, y, a)
        got = memo.get(key)
        if got is not None:
            return got
        value = (
            walk_count(depth - 1, y + 1, a + y + 1)
            + walk_count(depth - 1, y - 1, a + y - 1)
            + 2 * walk_count(depth - 1, y, a + y)
        )
        memo[key] = value
        if budget_cells is not None and len(memo) > budget_cells:
            raise MemoryBudgetExceeded(depth, base, len(memo) * 120, memory_limit)
        return value

    return walk_count(target_depth, 0, 0), memo
