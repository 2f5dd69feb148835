"""b-bit per-group quantization of activation tensors.

Each group stores its min Z and range R; values map to integer codes
round((h - Z) / R * B) with B = 2^b - 1, packed bitwise. Groups default to
one row of the input (one node's embedding).
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import CorruptionError, DataError, ParameterError


@dataclass
class QuantizedBlock:
    codes: np.ndarray        # packed uint8, ceil(count*bits/8) bytes
    z_per_group: np.ndarray  # group minima
    r_per_group: np.ndarray  # group ranges, >= 0
    group_size: int
    bits: int
    original_shape: tuple

    @property
    def count(self) -> int:
        return int(np.prod(self.original_shape))

    @property
    def num_groups(self) -> int:
        return -(-self.count // self.group_size)

    @property
    def packed_nbytes(self) -> int:
        return int(self.codes.nbytes)

    def debug_dump(self) -> str:
        return json.dumps({
            "bits": self.bits,
            "group_size": self.group_size,
            "shape": list(self.original_shape),
            "groups": [{"z": float(z), "r": float(r)}
                       for z, r in zip(self.z_per_group, self.r_per_group)],
            "codes_hex": self.codes.tobytes().hex(),
        })


def _group_minmax(flat: np.ndarray, group_size: int) -> tuple[np.ndarray, np.ndarray]:
    count = flat.size
    groups = -(-count // group_size)
    padded = count != groups * group_size
    if padded:
        # pad the ragged tail with its own last value: min/max unchanged
        flat = np.concatenate([flat, np.full(groups * group_size - count, flat[-1])])
    chunks = flat.reshape(groups, group_size)
    return chunks.min(axis=1), chunks.max(axis=1) - chunks.min(axis=1)


def _pack(codes: np.ndarray, bits: int) -> np.ndarray:
    shifts = np.arange(bits - 1, -1, -1, dtype=np.uint8)
    bit_rows = (codes[:, None] >> shifts) & 1
    return np.packbits(bit_rows.reshape(-1))


def _unpack(packed: np.ndarray, bits: int, count: int) -> np.ndarray:
    bit_stream = np.unpackbits(packed, count=count * bits)
    weights = (1 << np.arange(bits - 1, -1, -1)).astype(np.int64)
    return bit_stream.reshape(count, bits) @ weights


def quantize(h: np.ndarray, bits: int = 2, group_size: int | None = None,
             stochastic: bool = False, rng: np.random.Generator | None = None) -> QuantizedBlock:
    """Quantize a real tensor to b-bit codes with per-group (min, range).

    Deterministic round-to-nearest by default; stochastic=True uses unbiased
    stochastic rounding from the supplied (or a fresh) generator. A constant
    group (R = 0) emits code 0 everywhere.
    """
    h = np.asarray(h, dtype=np.float64)
    if not np.isfinite(h).all():
        raise DataError("quantize input contains NaN or Inf")
    if not 1 <= bits <= 8:
        raise ParameterError(f"bits must lie in 1..8, got {bits}")
    if group_size is None:
        group_size = h.shape[-1] if h.ndim >= 2 else h.size
    if group_size < 1:
        raise ParameterError(f"group_size must be >= 1, got {group_size}")
    flat = h.reshape(-1)
    z, r = _group_minmax(flat, group_size)
    b_max = (1 << bits) - 1
    z_el = np.repeat(z, group_size)[:flat.size]
    r_el = np.repeat(r, group_size)[:flat.size]
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(r_el > 0, (flat - z_el) / r_el * b_max, 0.0)
    if stochastic:
        if rng is None:
            rng = np.random.default_rng()
        codes = np.floor(scaled + rng.random(scaled.shape))
    else:
        codes = np.rint(scaled)
    codes = np.clip(codes, 0, b_max).astype(np.uint8)
    return QuantizedBlock(_pack(codes, bits), z, r, group_size, bits, h.shape)


def dequantize(q: QuantizedBlock) -> np.ndarray:
    """Reconstruct h_hat = Z + code * R / B in the original shape."""
    count = q.count
    b_max = (1 << q.bits) - 1
    expected_bytes = -(-count * q.bits // 8)
    if q.codes.nbytes != expected_bytes:
        raise CorruptionError(f"packed codes hold {q.codes.nbytes} bytes, "
                              f"shape {q.original_shape} needs {expected_bytes}")
    if len(q.z_per_group) != q.num_groups or len(q.r_per_group) != q.num_groups:
        raise CorruptionError("per-group metadata does not match group count")
    codes = _unpack(q.codes, q.bits, count)
    z_el = np.repeat(q.z_per_group, q.group_size)[:count]
    r_el = np.repeat(q.r_per_group, q.group_size)[:count]
    return (z_el + codes * (r_el / b_max)).reshape(q.original_shape)
