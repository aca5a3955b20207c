"""Counter-based random streams underpinning every stochastic operation.

Reproducibility contract (recorded as ``philox4x32-10/v1`` in pipeline
manifests): all randomness is drawn from Philox4x32-10 keyed by the 64-bit
frame seed, with the 128-bit counter laid out as

    (block_lo, block_hi, subunit, domain)

so that each (seed, domain, subunit) triple is an independent stream.  A
stream emits the four 32-bit words of each block in order; 64-bit values take
consecutive word pairs as ``lo | hi << 32``.  Derived procedures:

* choose k of n without replacement: assign one 64-bit key per input index,
  stable-argsort the keys (ties fall back to index order), take the first k,
  then sort those indices ascending;
* k draws with replacement from ``bound``: one 32-bit word per draw, mapped
  by ``(word * bound) >> 32``.

Any implementation of these rules, in any language, reproduces the sampled
point sets bit for bit.
"""

import numpy as np

RNG_NAME = "philox4x32-10/v1"

# Philox4x32 multipliers and key schedule increments.
_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = 0x9E3779B9
_W1 = 0xBB67AE85

_U32 = np.uint64(0xFFFFFFFF)

# Stream domains. Subunits: branch tag for selection/padding, ring index for
# the density resampler.
DOMAIN_SELECT = 1
DOMAIN_PAD = 2
DOMAIN_DES_DOWN = 3
DOMAIN_DES_UP = 4

# Branch tags used by the pipeline when normalizing each view to n_p.
BRANCH_DEFAULT = 0
BRANCH_PV1 = 1
BRANCH_PV2 = 2
BRANCH_PV3 = 3


def _philox_blocks(block_index: np.ndarray, subunit: int, domain: int, seed: int) -> np.ndarray:
    """Run Philox4x32-10 over a vector of block indices.

    Returns an (n, 4) uint32 array, one row of four output words per block.
    """
    n = block_index.shape[0]
    c0 = (block_index & _U32).astype(np.uint64)
    c1 = (block_index >> np.uint64(32)).astype(np.uint64)
    c2 = np.full(n, np.uint64(subunit & 0xFFFFFFFF))
    c3 = np.full(n, np.uint64(domain & 0xFFFFFFFF))
    k0 = seed & 0xFFFFFFFF
    k1 = (seed >> 32) & 0xFFFFFFFF

    for rnd in range(10):
        if rnd:
            k0 = (k0 + _W0) & 0xFFFFFFFF
            k1 = (k1 + _W1) & 0xFFFFFFFF
        p0 = _M0 * c0
        p1 = _M1 * c2
        hi0, lo0 = p0 >> np.uint64(32), p0 & _U32
        hi1, lo1 = p1 >> np.uint64(32), p1 & _U32
        c0, c1, c2, c3 = (
            hi1 ^ c1 ^ np.uint64(k0),
            lo1,
            hi0 ^ c3 ^ np.uint64(k1),
            lo0,
        )
    return np.stack([c0, c1, c2, c3], axis=1).astype(np.uint32)


class Stream:
    """One (seed, domain, subunit) stream of Philox words.

    Instances are single-use cursors: successive calls consume consecutive
    blocks. Pure function of the identifying triple, so equal triples always
    emit equal sequences.
    """

    def __init__(self, seed: int, domain: int, subunit: int = 0):
        if not 0 <= seed < 1 << 64:
            raise ValueError("seed must fit in 64 bits")
        self.seed = seed
        self.domain = domain
        self.subunit = subunit
        self._next_block = 0

    def u32(self, n: int) -> np.ndarray:
        """Next n 32-bit words."""
        if n == 0:
            return np.empty(0, dtype=np.uint32)
        blocks = (n + 3) // 4
        idx = np.arange(self._next_block, self._next_block + blocks, dtype=np.uint64)
        self._next_block += blocks
        return _philox_blocks(idx, self.subunit, self.domain, self.seed).ravel()[:n]

    def u64(self, n: int) -> np.ndarray:
        """Next n 64-bit values (consecutive word pairs, low word first)."""
        w = self.u32(2 * n).astype(np.uint64)
        return w[0::2] | (w[1::2] << np.uint64(32))


def select_indices(n: int, k: int, stream: Stream) -> np.ndarray:
    """Choose k of n indices without replacement, returned sorted ascending."""
    if k > n:
        raise ValueError("cannot select more indices than available")
    keys = stream.u64(n)
    order = np.argsort(keys, kind="stable")
    return np.sort(order[:k])


def draw_indices(k: int, bound: int, stream: Stream) -> np.ndarray:
    """k uniform draws with replacement from range(bound)."""
    if bound <= 0:
        raise ValueError("bound must be positive")
    words = stream.u32(k).astype(np.uint64)
    return ((words * np.uint64(bound)) >> np.uint64(32)).astype(np.int64)


def derive_frame_seed(base_seed: int, frame_id: str) -> int:
    """Per-frame seed: FNV-1a hash of the frame id folded into the base seed."""
    h = 0xCBF29CE484222325
    for byte in frame_id.encode("utf-8"):
        h ^= byte
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h ^ (base_seed & 0xFFFFFFFFFFFFFFFF)
