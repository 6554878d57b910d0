"""Key machinery: deterministic keystream, keyed permutations, coordinate
scrambling maps, and a toy public-key exchange.

Nothing in this module is cryptographically secure. The xorshift64* keystream
and the small-prime Diffie-Hellman group exist to make keyed behaviour
deterministic and testable, not to resist a real adversary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_MASK64 = (1 << 64) - 1
_MULT = 0x2545F4914F6CDD1D
_ZERO_SEED_REPLACEMENT = 0x9E3779B97F4A7C15

DH_PRIME = (1 << 61) - 1
DH_GENERATOR = 3


class Keystream:
    """xorshift64* state machine; the state is kept nonzero at all times."""

    def __init__(self, seed: int):
        seed &= _MASK64
        self.state = seed if seed != 0 else _ZERO_SEED_REPLACEMENT

    def next_u64(self) -> int:
        s = self.state
        s ^= s >> 12
        s = (s ^ (s << 25)) & _MASK64
        s ^= s >> 27
        self.state = s
        return (s * _MULT) & _MASK64


def keystream_bytes(seed: int, n: int) -> bytes:
    """First ``n`` bytes of the keystream, each 64-bit output emitted big-endian."""
    if n < 0:
        raise ValueError(f"byte count must be >= 0, got {n}")
    ks = Keystream(seed)
    out = bytearray()
    for _ in range((n + 7) // 8):
        out += ks.next_u64().to_bytes(8, "big")
    return bytes(out[:n])


def keyed_permutation(seed: int, n: int) -> list[int]:
    """Deterministic Fisher-Yates permutation of 0..n-1 driven by the keystream.

    The modulo draw carries a bias below 2**-50 for n < 2**13; accepted.
    """
    if n < 1:
        raise ValueError(f"permutation size must be >= 1, got {n}")
    ks = Keystream(seed)
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j = ks.next_u64() % (i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return perm


# --- coordinate scrambling maps ---


def _fibonacci_lucas(i: int) -> tuple[int, int, int, int]:
    """(F_i, F_{i+1}, L_i, L_{i+1}) with F = 1,1,2,3,... and L = 1,3,4,7,..."""
    f_prev, f_cur = 1, 1  # F_1, F_2
    l_prev, l_cur = 1, 3  # L_1, L_2
    for _ in range(i - 1):
        f_prev, f_cur = f_cur, f_prev + f_cur
        l_prev, l_cur = l_cur, l_prev + l_cur
    return f_prev, f_cur, l_prev, l_cur


@dataclass(frozen=True)
class ScrambleSpec:
    """Parameters of a modular linear map on the N x N coordinate grid.

    ``kind`` is "arnold" or "fibolucas". The Fibonacci-Lucas matrix
    [[F_i, F_{i+1}], [L_i, L_{i+1}]] has determinant +-2, so it is a bijection
    only for odd N; the constructor rejects even sides for that kind.
    """

    kind: str
    side: int
    iterations: int = 1
    index: int = field(default=1)

    def __post_init__(self):
        if self.kind not in ("arnold", "fibolucas"):
            raise ValueError(f"kind must be 'arnold' or 'fibolucas', got {self.kind!r}")
        if self.side < 2:
            raise ValueError(f"grid side must be >= 2, got {self.side}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.kind == "fibolucas":
            if self.index < 1:
                raise ValueError(f"sequence index must be >= 1, got {self.index}")
            if self.side % 2 == 0:
                raise ValueError(
                    "fibolucas map is not a bijection for even sides "
                    f"(|det| = 2, side = {self.side})"
                )

    def matrix(self) -> tuple[int, int, int, int]:
        """Row-major entries (a, b, c, d) of the single-step map."""
        if self.kind == "arnold":
            return 1, 1, 1, 2
        return _fibonacci_lucas(self.index)

    def inverse_matrix(self) -> tuple[int, int, int, int]:
        """Single-step inverse, reduced mod side."""
        a, b, c, d = self.matrix()
        n = self.side
        det = a * d - b * c
        det_inv = pow(det % n, -1, n)
        return (
            (det_inv * d) % n,
            (det_inv * -b) % n,
            (det_inv * -c) % n,
            (det_inv * a) % n,
        )


def _mat_pow_mod(m: tuple[int, int, int, int], t: int, n: int):
    a, b, c, d = 1, 0, 0, 1
    ma, mb, mc, md = (v % n for v in m)
    while t:
        if t & 1:
            a, b, c, d = (
                (a * ma + b * mc) % n,
                (a * mb + b * md) % n,
                (c * ma + d * mc) % n,
                (c * mb + d * md) % n,
            )
        ma, mb, mc, md = (
            (ma * ma + mb * mc) % n,
            (ma * mb + mb * md) % n,
            (mc * ma + md * mc) % n,
            (mc * mb + md * md) % n,
        )
        t >>= 1
    return a, b, c, d


def scramble_point(pt: tuple[int, int], spec: ScrambleSpec) -> tuple[int, int]:
    """Apply the map ``iterations`` times to grid point (x, y)."""
    x, y = pt
    n = spec.side
    if not (0 <= x < n and 0 <= y < n):
        raise ValueError(f"point {pt} outside [0, {n}) x [0, {n})")
    a, b, c, d = _mat_pow_mod(spec.matrix(), spec.iterations, n)
    return (a * x + b * y) % n, (c * x + d * y) % n


def unscramble_point(pt: tuple[int, int], spec: ScrambleSpec) -> tuple[int, int]:
    """Exact inverse of :func:`scramble_point`."""
    x, y = pt
    n = spec.side
    if not (0 <= x < n and 0 <= y < n):
        raise ValueError(f"point {pt} outside [0, {n}) x [0, {n})")
    a, b, c, d = _mat_pow_mod(spec.inverse_matrix(), spec.iterations, n)
    return (a * x + b * y) % n, (c * x + d * y) % n


def _scrambled_grids(spec: ScrambleSpec, inverse: bool):
    n = spec.side
    m = spec.inverse_matrix() if inverse else spec.matrix()
    a, b, c, d = _mat_pow_mod(m, spec.iterations, n)
    ys, xs = np.indices((n, n))
    return (a * xs + b * ys) % n, (c * xs + d * ys) % n


def scramble_image(img, spec: ScrambleSpec):
    """Permute the pixels of a square image: output at map(p) = input at p.

    Points are (x, y) = (column, row). Channels move together.
    """
    from .raster import Image

    if img.width != img.height:
        raise ValueError(f"scrambling needs a square image, got {img.width}x{img.height}")
    if img.width != spec.side:
        raise ValueError(f"spec side {spec.side} does not match image side {img.width}")
    xp, yp = _scrambled_grids(spec, inverse=False)
    arr = img.as_array()
    out = np.empty_like(arr)
    out[yp, xp] = arr
    return Image.from_array(out)


def unscramble_image(img, spec: ScrambleSpec):
    """Inverse of :func:`scramble_image`."""
    from .raster import Image

    if img.width != img.height:
        raise ValueError(f"scrambling needs a square image, got {img.width}x{img.height}")
    if img.width != spec.side:
        raise ValueError(f"spec side {spec.side} does not match image side {img.width}")
    xp, yp = _scrambled_grids(spec, inverse=False)
    arr = img.as_array()
    return Image.from_array(arr[yp, xp])


# --- toy Diffie-Hellman over Z_p, p = 2^61 - 1 ---


@dataclass(frozen=True)
class KeyPair:
    """Exponent pair in the fixed group (p = 2^61 - 1, g = 3). Toy only."""

    private: int
    public: int

    def __post_init__(self):
        if not 2 <= self.private <= DH_PRIME - 2:
            raise ValueError(f"private key outside [2, p-2]")
        if self.public != pow(DH_GENERATOR, self.private, DH_PRIME):
            raise ValueError("public key does not match private exponent")


def generate_keypair(seed: int) -> KeyPair:
    """Deterministic key pair derived from the keystream for ``seed``."""
    private = 2 + Keystream(seed).next_u64() % (DH_PRIME - 3)
    return KeyPair(private, pow(DH_GENERATOR, private, DH_PRIME))


def dh_shared_seed(own: KeyPair, peer_public: int) -> int:
    """Shared 64-bit seed: (peer_public ^ own.private) mod p, truncated."""
    if not 1 <= peer_public <= DH_PRIME - 1:
        raise ValueError(f"peer public key outside [1, p-1]")
    return pow(peer_public, own.private, DH_PRIME) & _MASK64
