"""Bit-exact frame-stack container.

Layout (little-endian):

    magic           4 bytes  "ABSK"
    version         u16
    width           u32
    height          u32
    n_frames        u64
    pulse_rate_hz   f64
    seed            u64
    config digest   32 bytes
    frames          n_frames * height * ceil(width/8) bytes, row-major
                    bit-packed, each row padded to a whole byte

Unknown versions are rejected on read.
"""

import struct

import numpy as np

from .errors import StackFormatError
from .camera import FrameStack
from .optics import DEFAULT_PITCH_NM, PixelGrid

MAGIC = b"ABSK"
VERSION = 1
_HEADER = struct.Struct("<4sHIIQdQ32s")


def write_stack(stack, path):
    header = _HEADER.pack(
        MAGIC, VERSION,
        stack.grid.width, stack.grid.height,
        stack.n_frames, stack.pulse_rate_hz, stack.seed,
        stack.config_digest,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(stack.packed).tobytes())


def read_stack(path, pitch_nm=DEFAULT_PITCH_NM, origin_nm=(0.0, 0.0)):
    """Read a stack file.

    The container stores geometry in pixels only; the physical pitch is
    supplied by the caller (usually from the run config that produced it).
    """
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise StackFormatError(f"{path}: truncated header")
        magic, version, width, height, n_frames, rate, seed, digest = _HEADER.unpack(header)
        if magic != MAGIC:
            raise StackFormatError(f"{path}: bad magic {magic!r}")
        if version != VERSION:
            raise StackFormatError(f"{path}: unsupported format version {version}")
        rb = (width + 7) // 8
        data = np.fromfile(fh, dtype=np.uint8)
    expected = n_frames * height * rb
    if data.size != expected:
        raise StackFormatError(
            f"{path}: expected {expected} payload bytes, found {data.size}"
        )
    grid = PixelGrid(width=width, height=height, pitch_nm=pitch_nm, origin_nm=origin_nm)
    packed = data.reshape(n_frames, height, rb)
    return FrameStack(grid, packed, rate, seed, digest)
