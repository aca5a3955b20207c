/**
 * Counter-based random streams, mirroring the library's `philox4x32-10/v1`
 * contract bit for bit.
 *
 * Counter layout per block: (block_lo, block_hi, subunit, domain); the
 * 64-bit seed is the key. Each block emits four 32-bit words in order;
 * 64-bit values take consecutive word pairs as lo | hi << 32. Sampling
 * without replacement stable-sorts one 64-bit key per index; draws with
 * replacement map one 32-bit word through (word * bound) >> 32.
 */

const M0 = 0xd2511f53;
const M1 = 0xcd9e8d57;
const W0 = 0x9e3779b9;
const W1 = 0xbb67ae85;

export const DOMAIN_SELECT = 1;
export const DOMAIN_PAD = 2;
export const DOMAIN_DES_DOWN = 3;
export const DOMAIN_DES_UP = 4;

export const BRANCH_PV1 = 1;
export const BRANCH_PV2 = 2;
export const BRANCH_PV3 = 3;

/** Exact high 32 bits of a 32x32 unsigned product, without BigInt. */
export function mulHi32(a: number, b: number): number {
  const aHi = a >>> 16;
  const aLo = a & 0xffff;
  const bHi = b >>> 16;
  const bLo = b & 0xffff;
  const p00 = aLo * bLo;
  const mid = aLo * bHi + aHi * bLo + Math.floor(p00 / 0x10000);
  return (aHi * bHi + Math.floor(mid / 0x10000)) >>> 0;
}

export function philoxBlock(
  blockLo: number,
  blockHi: number,
  subunit: number,
  domain: number,
  seedLo: number,
  seedHi: number,
): [number, number, number, number] {
  let c0 = blockLo >>> 0;
  let c1 = blockHi >>> 0;
  let c2 = subunit >>> 0;
  let c3 = domain >>> 0;
  let k0 = seedLo >>> 0;
  let k1 = seedHi >>> 0;
  for (let round = 0; round < 10; round++) {
    if (round) {
      k0 = (k0 + W0) >>> 0;
      k1 = (k1 + W1) >>> 0;
    }
    const lo0 = Math.imul(M0, c0) >>> 0;
    const hi0 = mulHi32(M0, c0);
    const lo1 = Math.imul(M1, c2) >>> 0;
    const hi1 = mulHi32(M1, c2);
    const n0 = (hi1 ^ c1 ^ k0) >>> 0;
    const n2 = (hi0 ^ c3 ^ k1) >>> 0;
    c0 = n0;
    c1 = lo1;
    c2 = n2;
    c3 = lo0;
  }
  return [c0, c1, c2, c3];
}

/** One (seed, domain, subunit) stream; successive calls consume consecutive blocks. */
export class Stream {
  private nextBlock = 0;
  private readonly seedLo: number;
  private readonly seedHi: number;

  constructor(seed: bigint, readonly domain: number, readonly subunit = 0) {
    if (seed < 0n || seed >= 1n << 64n) throw new RangeError("seed must fit in 64 bits");
    this.seedLo = Number(seed & 0xffffffffn);
    this.seedHi = Number(seed >> 32n);
  }

  u32(n: number): Uint32Array {
    const out = new Uint32Array(n);
    let written = 0;
    while (written < n) {
      const block = this.nextBlock++;
      const words = philoxBlock(
        block >>> 0,
        Math.floor(block / 0x100000000),
        this.subunit,
        this.domain,
        this.seedLo,
        this.seedHi,
      );
      for (let j = 0; j < 4 && written < n; j++) out[written++] = words[j];
    }
    return out;
  }

  u64(n: number): BigUint64Array {
    const words = this.u32(2 * n);
    const out = new BigUint64Array(n);
    for (let i = 0; i < n; i++) {
      out[i] = BigInt(words[2 * i]) | (BigInt(words[2 * i + 1]) << 32n);
    }
    return out;
  }
}

/** Choose k of n indices without replacement, sorted ascending. */
export function selectIndices(n: number, k: number, stream: Stream): Int32Array {
  if (k > n) throw new RangeError("cannot select more indices than available");
  const keys = stream.u64(n);
  const order = Array.from({ length: n }, (_, i) => i);
  order.sort((a, b) => (keys[a] < keys[b] ? -1 : keys[a] > keys[b] ? 1 : a - b));
  const chosen = order.slice(0, k);
  chosen.sort((a, b) => a - b);
  return Int32Array.from(chosen);
}

/** k uniform draws with replacement from range(bound). */
export function drawIndices(k: number, bound: number, stream: Stream): Int32Array {
  if (bound <= 0) throw new RangeError("bound must be positive");
  const words = stream.u32(k);
  const big = BigInt(bound);
  const out = new Int32Array(k);
  for (let i = 0; i < k; i++) {
    out[i] = Number((BigInt(words[i]) * big) >> 32n);
  }
  return out;
}

function utf8Bytes(text: string): number[] {
  const bytes: number[] = [];
  for (const ch of text) {
    const cp = ch.codePointAt(0)!;
    if (cp < 0x80) bytes.push(cp);
    else if (cp < 0x800) bytes.push(0xc0 | (cp >> 6), 0x80 | (cp & 0x3f));
    else if (cp < 0x10000) {
      bytes.push(0xe0 | (cp >> 12), 0x80 | ((cp >> 6) & 0x3f), 0x80 | (cp & 0x3f));
    } else {
      bytes.push(
        0xf0 | (cp >> 18),
        0x80 | ((cp >> 12) & 0x3f),
        0x80 | ((cp >> 6) & 0x3f),
        0x80 | (cp & 0x3f),
      );
    }
  }
  return bytes;
}

/** Per-frame seed: FNV-1a of the frame id folded into the base seed. */
export function deriveFrameSeed(baseSeed: bigint, frameId: string): bigint {
  const MASK = (1n << 64n) - 1n;
  let h = 0xcbf29ce484222325n;
  for (const byte of utf8Bytes(frameId)) {
    h ^= BigInt(byte);
    h = (h * 0x100000001b3n) & MASK;
  }
  return h ^ (baseSeed & MASK);
}
