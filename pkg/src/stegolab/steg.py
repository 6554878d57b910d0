"""k-LSB substitution steganography with three key-management modes.

NKS embeds in the clear at row-major positions. SKS and PKS derive a 64-bit
seed (shared secret, or toy Diffie-Hellman agreement), XOR the whole frame
with the keystream, and scatter it along a keyed permutation of the channel
bytes. Each selected byte carries k message bits in its k low bit positions,
so planes >= k are never modified.

Frame layout, before encryption: 2-byte magic "SG", 1 control byte
(version << 4 | k), 4-byte big-endian payload length, payload.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CapacityError, CorruptFrameError, NoFrameError
from .keys import KeyPair, dh_shared_seed, keyed_permutation, keystream_bytes
from .raster import Image

FRAME_MAGIC = b"SG"
FRAME_VERSION = 1
HEADER_BYTES = 7

MODE_NKS = "nks"
MODE_SKS = "sks"
MODE_PKS = "pks"


@dataclass(frozen=True)
class StegKey:
    """Key material for one of the modes nks / sks / pks."""

    mode: str
    secret: Optional[int] = None
    own: Optional[KeyPair] = None
    peer_public: Optional[int] = None

    def __post_init__(self):
        if self.mode == MODE_NKS:
            if self.secret is not None or self.own is not None:
                raise ValueError("nks mode carries no key material")
        elif self.mode == MODE_SKS:
            if self.secret is None:
                raise ValueError("sks mode requires a shared secret")
        elif self.mode == MODE_PKS:
            if self.own is None or self.peer_public is None:
                raise ValueError("pks mode requires a key pair and the peer's public key")
        else:
            raise ValueError(f"unknown mode {self.mode!r}")

    @classmethod
    def nks(cls) -> "StegKey":
        return cls(MODE_NKS)

    @classmethod
    def sks(cls, secret: int) -> "StegKey":
        return cls(MODE_SKS, secret=secret)

    @classmethod
    def pks(cls, own: KeyPair, peer_public: int) -> "StegKey":
        return cls(MODE_PKS, own=own, peer_public=peer_public)

    def seed(self) -> Optional[int]:
        """64-bit seed driving keystream and slot order; None for nks."""
        if self.mode == MODE_SKS:
            return self.secret
        if self.mode == MODE_PKS:
            return dh_shared_seed(self.own, self.peer_public)
        return None


@dataclass(frozen=True)
class EmbedParams:
    k: int
    key: StegKey

    def __post_init__(self):
        if not 1 <= self.k <= 4:
            raise ValueError(f"k must be in [1, 4], got {self.k}")


def capacity(cover: Image, k: int) -> int:
    """Payload bytes that fit: floor(slots * k / 8) minus the 7 header bytes."""
    if not 1 <= k <= 4:
        raise ValueError(f"k must be in [1, 4], got {k}")
    cap = (cover.width * cover.height * cover.channels * k) // 8 - HEADER_BYTES
    if cap < 0:
        raise CapacityError(
            f"cover of {cover.width}x{cover.height}x{cover.channels} cannot hold "
            f"even the frame header at k={k}"
        )
    return cap


def _slot_order(n_slots: int, seed: Optional[int]) -> np.ndarray:
    if seed is None:
        return np.arange(n_slots, dtype=np.int64)
    return np.asarray(keyed_permutation(seed, n_slots), dtype=np.int64)


def _xor_keystream(data: bytes, seed: int) -> bytes:
    pad = keystream_bytes(seed, len(data))
    return bytes(a ^ b for a, b in zip(data, pad))


def embed(cover: Image, message: bytes, params: EmbedParams) -> Image:
    """Hide ``message`` in the k low bit planes of a copy of ``cover``."""
    k = params.k
    cap = capacity(cover, k)
    if len(message) > cap:
        raise CapacityError(f"message of {len(message)} bytes exceeds capacity {cap}")

    frame = (
        FRAME_MAGIC
        + bytes([(FRAME_VERSION << 4) | k])
        + len(message).to_bytes(4, "big")
        + message
    )
    seed = params.key.seed()
    if seed is not None:
        frame = _xor_keystream(frame, seed)

    bits = np.unpackbits(np.frombuffer(frame, dtype=np.uint8))
    n_slots = cover.width * cover.height * cover.channels
    used = -(-len(bits) // k)  # ceil
    order = _slot_order(n_slots, seed)[:used]

    padded = np.zeros(used * k, dtype=np.uint8)
    padded[: len(bits)] = bits
    weights = (1 << np.arange(k - 1, -1, -1)).astype(np.uint8)
    values = (padded.reshape(used, k) * weights).sum(axis=1).astype(np.uint8)

    # full slots clear all k low bits; a partial tail slot keeps its unfilled
    # low positions from the cover
    clear = np.full(used, (1 << k) - 1, dtype=np.uint8)
    tail = len(bits) - (used - 1) * k
    if tail != k:
        clear[-1] = ((1 << tail) - 1) << (k - tail)

    flat = np.frombuffer(cover.pixels, dtype=np.uint8).copy()
    flat[order] = (flat[order] & ~clear) | values
    return Image(cover.width, cover.height, cover.channels, flat.tobytes())


def _read_slot_bits(flat: np.ndarray, order: np.ndarray, k: int, nbits: int) -> np.ndarray:
    """First ``nbits`` embedded bits, k per slot, slot bit k-1 first."""
    slots = -(-nbits // k)
    if slots > len(order):
        raise CorruptFrameError("frame runs past the end of the cover")
    vals = flat[order[:slots]]
    cols = np.unpackbits((vals << (8 - k)).astype(np.uint8)).reshape(slots, 8)[:, :k]
    return cols.reshape(-1)[:nbits]


def extract(stego: Image, params: EmbedParams) -> bytes:
    """Recover the message hidden by :func:`embed` with the same parameters."""
    k = params.k
    cap = capacity(stego, k)
    seed = params.key.seed()
    n_slots = stego.width * stego.height * stego.channels
    order = _slot_order(n_slots, seed)
    flat = np.frombuffer(stego.pixels, dtype=np.uint8)

    header_bits = _read_slot_bits(flat, order, k, HEADER_BYTES * 8)
    header = np.packbits(header_bits).tobytes()
    if seed is not None:
        header = _xor_keystream(header, seed)
    if header[:2] != FRAME_MAGIC:
        raise NoFrameError("frame magic not found (wrong key, wrong k, or no message)")
    control = header[2]
    if control >> 4 != FRAME_VERSION or control & 0x0F != k:
        raise NoFrameError(
            f"frame control byte 0x{control:02x} does not match version "
            f"{FRAME_VERSION} / k={k}"
        )
    length = int.from_bytes(header[3:7], "big")
    if length > cap:
        raise CorruptFrameError(f"declared length {length} exceeds capacity {cap}")

    total = HEADER_BYTES + length
    frame_bits = _read_slot_bits(flat, order, k, total * 8)
    frame = np.packbits(frame_bits).tobytes()
    if seed is not None:
        frame = _xor_keystream(frame, seed)
    return frame[HEADER_BYTES:]


def altered_bit_fraction(cover: Image, stego: Image, k: int) -> float:
    """Fraction of the k low bits per channel byte that differ between the two."""
    if not 1 <= k <= 4:
        raise ValueError(f"k must be in [1, 4], got {k}")
    if (cover.width, cover.height, cover.channels) != (
        stego.width,
        stego.height,
        stego.channels,
    ):
        raise ValueError("cover and stego shapes differ")
    a = np.frombuffer(cover.pixels, dtype=np.uint8)
    b = np.frombuffer(stego.pixels, dtype=np.uint8)
    diff = (a ^ b) & ((1 << k) - 1)
    flipped = int(np.unpackbits(diff).sum())
    return flipped / (k * len(a))
