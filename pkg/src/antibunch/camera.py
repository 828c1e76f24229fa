"""Photon-counting detector simulation.

One excitation pulse produces one frame: emitted photons land on pixels drawn
from the pixelated PSF, each is detected with probability qe * g_t, Bernoulli
dark events are added per pixel, and coincident events on a pixel are OR-ed
into a single binary event (thresholding).  g_t is a per-frame common-mode
gain factor, normal with mean 1 and sd ``gain_fluct_sd``, clamped to [0, 2];
it models frame-global readout variation and produces apparent bunching.

Every frame uses its own random stream keyed by (seed, frame_index), so a
stack is a pure function of its configuration: serial and parallel generation
give byte-identical results.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .digest import config_digest
from .errors import ConfigError, MemoryBudgetError
from .optics import pixelated_psf
from .scene import sample_blink_trace, sample_emission

_U64 = np.uint64
_MAX_FRAMES = 1 << 62
_BLINK_STREAM_INDEX = (1 << 64) - 1  # reserved; frame indices stay below _MAX_FRAMES

_POPCOUNT = np.unpackbits(np.arange(256, dtype=np.uint8)[:, None], axis=1).sum(1).astype(np.int64)


@dataclass(frozen=True)
class CameraModel:
    qe: float = 1.0
    dark_rate: float = 0.0
    gain_fluct_sd: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.qe <= 1.0:
            raise ConfigError("camera.qe", f"must be in [0, 1], got {self.qe}")
        if not self.dark_rate >= 0.0:
            raise ConfigError("camera.dark_rate", f"must be >= 0, got {self.dark_rate}")
        if not 0.0 <= self.gain_fluct_sd <= 0.5:
            raise ConfigError(
                "camera.gain_fluct_sd", f"must be in [0, 0.5], got {self.gain_fluct_sd}"
            )
        if not 0 <= int(self.seed) < (1 << 64):
            raise ConfigError("camera.seed", "must fit in an unsigned 64-bit integer")


class FrameStack:
    """Ordered binary photon-detection frames plus acquisition metadata.

    Frames are stored row-major bit-packed: uint8 array of shape
    (n_frames, height, row_bytes) with each row padded to a whole byte.
    """

    def __init__(self, grid, packed, pulse_rate_hz, seed, config_digest):
        self.grid = grid
        self.packed = packed
        self.pulse_rate_hz = float(pulse_rate_hz)
        self.seed = int(seed)
        self.config_digest = bytes(config_digest)
        if len(self.config_digest) != 32:
            raise ValueError("config digest must be 32 bytes")
        rb = (grid.width + 7) // 8
        if packed.ndim != 3 or packed.shape[1:] != (grid.height, rb):
            raise ValueError(f"packed shape {packed.shape} inconsistent with grid")

    @property
    def n_frames(self):
        return self.packed.shape[0]

    @property
    def row_bytes(self):
        return self.packed.shape[2]

    def unpack(self, start=0, stop=None):
        """Frames [start, stop) as a (k, height, width) uint8 0/1 array."""
        chunk = self.packed[start:stop]
        bits = np.unpackbits(chunk, axis=2, count=self.grid.width)
        return bits

    def iter_chunks(self, chunk_size=2048):
        for start in range(0, self.n_frames, chunk_size):
            stop = min(start + chunk_size, self.n_frames)
            yield start, self.unpack(start, stop)

    def subrange(self, start, stop):
        """Zero-copy view of frames [start, stop) as a FrameStack."""
        return FrameStack(
            self.grid, self.packed[start:stop], self.pulse_rate_hz, self.seed,
            self.config_digest,
        )

    def frame_event_counts(self):
        """Total detection events per frame (popcount over packed rows)."""
        return _POPCOUNT[self.packed].sum(axis=(1, 2))

    def mean_event_rate(self):
        return float(self.frame_event_counts().sum() / self.n_frames)


class _FrameStreams:
    """Per-frame random streams keyed by (seed, frame_index).

    Stream i is defined as Generator(Philox(key=[i, seed])).  For speed one
    Philox instance is reused and rekeyed in place, which yields exactly the
    same draws as constructing it fresh.
    """

    def __init__(self, seed):
        self._seed = int(seed)
        self._bitgen = np.random.Philox(key=np.array([0, self._seed], dtype=_U64))
        self._gen = np.random.Generator(self._bitgen)
        self._template = self._bitgen.state

    def stream(self, index):
        st = self._template
        st["state"]["counter"][:] = 0
        st["state"]["key"][0] = index
        st["buffer_pos"] = 4
        st["has_uint32"] = 0
        st["uinteger"] = 0
        self._bitgen.state = st
        return self._gen


def frame_rng(seed, frame_index):
    """Standalone random stream for one frame (same draws as _FrameStreams)."""
    key = np.array([frame_index, seed], dtype=_U64)
    return np.random.Generator(np.random.Philox(key=key))


def _blink_rng(seed):
    return frame_rng(seed, _BLINK_STREAM_INDEX)


class _ExposurePlan:
    """Per-emitter placement CDFs precomputed for one (scene, psf, grid)."""

    def __init__(self, scene, psf, grid):
        self.scene = scene
        self.grid = grid
        self.cdfs = [
            np.cumsum(pixelated_psf(psf, grid, e.position_nm).ravel())
            for e in scene.emitters
        ]


def expose_frame(scene, psf, grid, camera, rng, blink_on=None, plan=None):
    """Simulate one pulse/readout cycle; returns a (height, width) uint8 bitmap.

    Draw order per frame: gain factor (if fluctuating), emission counts,
    then per photon a placement and a detection uniform, then dark events.
    """
    if plan is None:
        plan = _ExposurePlan(scene, psf, grid)
    flat = np.zeros(grid.n_pixels, dtype=np.uint8)

    g = 1.0
    if camera.gain_fluct_sd > 0.0:
        g = float(np.clip(1.0 + camera.gain_fluct_sd * rng.standard_normal(), 0.0, 2.0))

    if scene.n_emitters:
        batch = sample_emission(
            scene, rng, 1,
            blink_on=None if blink_on is None else blink_on.reshape(1, -1),
        )
        counts = batch.counts[0]
        p_det = min(camera.qe * g, 1.0)
        for j in np.flatnonzero(counts):
            cdf = plan.cdfs[j]
            total = cdf[-1]
            for _ in range(counts[j]):
                u = rng.random()
                if u >= total:
                    continue  # photon missed the grid
                pix = int(np.searchsorted(cdf, u, side="right"))
                if rng.random() < p_det:
                    flat[pix] = 1

    if camera.dark_rate > 0.0:
        p_dark = min(camera.dark_rate * g, 1.0)
        flat |= rng.random(grid.n_pixels) < p_dark

    return flat.reshape(grid.shape)


def _simulate_range(scene, psf, grid, camera, lo, hi, blink_rows):
    plan = _ExposurePlan(scene, psf, grid)
    streams = _FrameStreams(camera.seed)
    rb = (grid.width + 7) // 8
    out = np.empty((hi - lo, grid.height, rb), dtype=np.uint8)
    for i, t in enumerate(range(lo, hi)):
        rng = streams.stream(t)
        row = None if blink_rows is None else blink_rows[i]
        frame = expose_frame(scene, psf, grid, camera, rng, blink_on=row, plan=plan)
        out[i] = np.packbits(frame, axis=1)
    return out


def _simulate_range_star(args):
    return _simulate_range(*args)


def simulate_stack(
    scene, psf, grid, camera, n_frames,
    pulse_rate_hz=1000.0,
    n_workers=1,
    memory_budget_bytes=2 << 30,
    digest=None,
):
    """Simulate a full frame stack; deterministic for a given configuration.

    The packed size is checked against ``memory_budget_bytes`` before any
    frame is generated.  With ``n_workers > 1`` frames are produced by a
    process pool; per-frame streams make the result identical to a serial run.
    """
    n_frames = int(n_frames)
    if n_frames < 1:
        raise ConfigError("n_frames", f"must be >= 1, got {n_frames}")
    if n_frames >= _MAX_FRAMES:
        raise ConfigError("n_frames", "exceeds the supported frame-index range")

    rb = (grid.width + 7) // 8
    need = n_frames * grid.height * rb
    if need > memory_budget_bytes:
        raise MemoryBudgetError(
            f"stack needs {need} bytes packed, budget is {memory_budget_bytes}"
        )

    if digest is None:
        digest = config_digest(scene, psf, grid, camera, n_frames, pulse_rate_hz)

    blink = None
    if scene.mode == "classical-blinking" and scene.n_emitters:
        # The telegraph chain is sequential across frames, so it is drawn once
        # from a reserved stream and shared read-only by all frame workers.
        blink = sample_blink_trace(scene, _blink_rng(camera.seed), n_frames)

    if n_workers <= 1:
        packed = _simulate_range(scene, psf, grid, camera, 0, n_frames, blink)
    else:
        bounds = np.linspace(0, n_frames, 4 * n_workers + 1).astype(int)
        tasks = []
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            if hi > lo:
                rows = None if blink is None else blink[lo:hi]
                tasks.append((scene, psf, grid, camera, int(lo), int(hi), rows))
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            parts = list(pool.map(_simulate_range_star, tasks))
        packed = np.concatenate(parts, axis=0)

    return FrameStack(grid, packed, pulse_rate_hz, camera.seed, digest)
