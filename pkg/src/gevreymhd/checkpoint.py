"""Binary checkpoints with bitwise round-trip guarantees.

Layout (little-endian throughout):

    magic   4 bytes  b"GMHD"
    version u32
    n       u32
    t       f64
    r       f64
    s       f64
    tau     f64
    u then h: for each component c in 0..2, coefficients in k-lexicographic
    order (k1 outer, k3 inner, indices in FFT layout order), each as an
    (re, im) f64 pair.
"""

import struct
from pathlib import Path

import numpy as np

from .norms import GevreyParams
from .spectral import Grid, MHDState, SpectralField

MAGIC = b"GMHD"
VERSION = 1
_HEADER = struct.Struct("<4sII dddd")


class CheckpointError(ValueError):
    """Malformed, truncated or incompatible checkpoint file."""


def save_checkpoint(path, state: MHDState, params: GevreyParams,
                    tau: float) -> None:
    """Write state plus (r, s, tau) to path; overwrites atomically."""
    path = Path(path)
    n = state.grid.n
    header = _HEADER.pack(MAGIC, VERSION, n, state.t, params.r, params.s, tau)
    blocks = []
    for f in (state.u, state.h):
        c = np.ascontiguousarray(f.coeffs, dtype=np.complex128)
        blocks.append(c.astype("<c16").tobytes())
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(header + b"".join(blocks))
    tmp.replace(path)


def load_checkpoint(path) -> tuple:
    """Read a checkpoint; returns (state, params_with_tau0, tau)."""
    path = Path(path)
    if not path.is_file():
        raise CheckpointError(f"checkpoint not found: {path}")
    data = path.read_bytes()
    if len(data) < _HEADER.size:
        raise CheckpointError(
            f"truncated checkpoint: {len(data)} bytes < header size "
            f"{_HEADER.size}"
        )
    magic, version, n, t, r, s, tau = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CheckpointError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise CheckpointError(
            f"unsupported checkpoint version {version}, expected {VERSION}"
        )
    block = 3 * n * n * n * 16
    expected = _HEADER.size + 2 * block
    if len(data) != expected:
        raise CheckpointError(
            f"truncated checkpoint: {len(data)} bytes, expected {expected}"
        )
    grid = Grid(n)

    def read_field(offset):
        flat = np.frombuffer(data, dtype="<c16", count=3 * n**3, offset=offset)
        return SpectralField(
            grid, flat.reshape(3, n, n, n).astype(np.complex128)
        )

    u = read_field(_HEADER.size)
    h = read_field(_HEADER.size + block)
    params = GevreyParams(r=r, s=s, tau=tau)
    return MHDState(u, h, t), params, tau
