"""Emitter scenes: ground-truth positions, per-pulse photophysics, sampling.

A scene is a list of point emitters inside a rectangular field of view plus an
emission mode:

* ``quantum``            -- each excitation pulse yields one photon with
  probability ``p_emit`` and, conditionally, a second photon with probability
  ``p_double`` (the antibunching imperfection).  ``p_double = 0`` models a
  perfect single-photon emitter.
* ``classical-poisson``  -- the per-pulse photon count is Poisson with mean
  ``p_emit``.
* ``classical-blinking`` -- as classical-poisson, but gated by a two-state
  on/off telegraph process sampled once per frame (``on_fraction`` duty cycle,
  ``switch_rate`` expected toggles per frame).

Scenes are immutable after loading and safe to share; sampling takes an
explicit random stream per call.
"""

from dataclasses import dataclass, replace

import numpy as np
import yaml

from .errors import ConfigError

MODES = ("quantum", "classical-poisson", "classical-blinking")


@dataclass(frozen=True)
class Emitter:
    x_nm: float
    y_nm: float
    z_nm: float = 0.0
    p_emit: float = 1.0
    p_double: float = 0.0
    on_fraction: float = 1.0
    switch_rate: float = 0.0

    @property
    def position_nm(self):
        return (self.x_nm, self.y_nm, self.z_nm)


@dataclass(frozen=True)
class EmitterScene:
    extent_nm: tuple
    mode: str = "quantum"
    emitters: tuple = ()

    @property
    def n_emitters(self):
        return len(self.emitters)

    def with_z_offset(self, dz_nm):
        """Copy of the scene with every emitter shifted axially by dz_nm."""
        moved = tuple(replace(e, z_nm=e.z_nm + dz_nm) for e in self.emitters)
        return replace(self, emitters=moved)


@dataclass(frozen=True)
class EmissionBatch:
    """Photon counts per pulse and emitter.

    ``counts`` has shape (n_pulses, n_emitters), dtype uint8.  In quantum mode
    counts never exceed 2 (one photon plus at most one extra); classical modes
    are Poisson and unbounded.
    """

    counts: np.ndarray

    @property
    def n_pulses(self):
        return self.counts.shape[0]

    def totals(self):
        """Total photons per pulse."""
        return self.counts.sum(axis=1, dtype=np.int64)


def _require_prob(value, path):
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ConfigError(path, f"expected a number, got {value!r}") from None
    if not 0.0 <= v <= 1.0:
        raise ConfigError(path, f"must be in [0, 1], got {v}")
    return v


def _require_number(value, path, minimum=None):
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ConfigError(path, f"expected a number, got {value!r}") from None
    if minimum is not None and v < minimum:
        raise ConfigError(path, f"must be >= {minimum}, got {v}")
    return v


def scene_from_dict(data, base="scene"):
    """Build a validated EmitterScene from a parsed mapping."""
    if not isinstance(data, dict):
        raise ConfigError(base, f"expected a mapping, got {type(data).__name__}")

    extent = data.get("extent")
    if extent is None:
        raise ConfigError(f"{base}.extent", "missing")
    if not (isinstance(extent, (list, tuple)) and len(extent) == 2):
        raise ConfigError(f"{base}.extent", f"expected [width_nm, height_nm], got {extent!r}")
    w = _require_number(extent[0], f"{base}.extent[0]", minimum=0.0)
    h = _require_number(extent[1], f"{base}.extent[1]", minimum=0.0)

    mode = data.get("mode", "quantum")
    if mode not in MODES:
        raise ConfigError(f"{base}.mode", f"must be one of {MODES}, got {mode!r}")

    emitters = []
    raw = data.get("emitters", []) or []
    if not isinstance(raw, list):
        raise ConfigError(f"{base}.emitters", "expected a list")
    for i, entry in enumerate(raw):
        p = f"{base}.emitters[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError(p, "expected a mapping")
        known = {"x_nm", "y_nm", "z_nm", "p_emit", "p_double", "on_fraction", "switch_rate"}
        for key in entry:
            if key not in known:
                raise ConfigError(f"{p}.{key}", "unknown field")
        e = Emitter(
            x_nm=_require_number(entry.get("x_nm"), f"{p}.x_nm"),
            y_nm=_require_number(entry.get("y_nm"), f"{p}.y_nm"),
            z_nm=_require_number(entry.get("z_nm", 0.0), f"{p}.z_nm"),
            p_emit=_require_prob(entry.get("p_emit", 1.0), f"{p}.p_emit"),
            p_double=_require_prob(entry.get("p_double", 0.0), f"{p}.p_double"),
            on_fraction=_require_prob(entry.get("on_fraction", 1.0), f"{p}.on_fraction"),
            switch_rate=_require_number(entry.get("switch_rate", 0.0), f"{p}.switch_rate", 0.0),
        )
        if not (0.0 <= e.x_nm <= w and 0.0 <= e.y_nm <= h):
            raise ConfigError(
                p, f"position ({e.x_nm}, {e.y_nm}) nm outside extent {w} x {h} nm"
            )
        emitters.append(e)

    return EmitterScene(extent_nm=(w, h), mode=mode, emitters=tuple(emitters))


def load_scene(config_text):
    """Parse a YAML scene description into a validated EmitterScene."""
    try:
        data = yaml.safe_load(config_text)
    except yaml.YAMLError as exc:
        raise ConfigError("scene", f"YAML parse failure: {exc}") from exc
    return scene_from_dict(data)


def _telegraph_rates(emitter):
    """Per-frame switch probabilities (p_on_to_off, p_off_to_on)."""
    f = emitter.on_fraction
    s = emitter.switch_rate
    if f <= 0.0 or f >= 1.0 or s <= 0.0:
        return 0.0, 0.0
    # Stationary occupancy f with expected toggles per frame s.
    return min(s / (2.0 * f), 1.0), min(s / (2.0 * (1.0 - f)), 1.0)


def sample_blink_trace(scene, rng, n_frames):
    """On/off state per frame and emitter for the telegraph process.

    Returns a (n_frames, n_emitters) uint8 array.  The initial state is drawn
    from the stationary distribution; emitters with on_fraction 0 or 1, or
    switch_rate 0, hold a constant state.
    """
    m = scene.n_emitters
    f = np.array([e.on_fraction for e in scene.emitters])
    p_off = np.empty(m)
    p_on = np.empty(m)
    for j, e in enumerate(scene.emitters):
        p_off[j], p_on[j] = _telegraph_rates(e)
    state = np.empty((n_frames, m), dtype=np.uint8)
    u = rng.random((n_frames, m))
    state[0] = u[0] < f
    for t in range(1, n_frames):
        prev = state[t - 1]
        toggle = u[t] < np.where(prev, p_off, p_on)
        state[t] = prev ^ toggle
    return state


def sample_emission(scene, rng, n_pulses=1, blink_on=None):
    """Sample per-pulse photon counts for every emitter.

    Emitters are statistically independent.  In classical-blinking mode the
    telegraph gate is sampled here (one chain across the pulses of the batch)
    unless ``blink_on`` supplies precomputed per-pulse states of shape
    (n_pulses, n_emitters).
    """
    m = scene.n_emitters
    if m == 0:
        return EmissionBatch(np.zeros((n_pulses, 0), dtype=np.uint8))

    p_emit = np.array([e.p_emit for e in scene.emitters])

    if scene.mode == "quantum":
        emit = rng.random((n_pulses, m)) < p_emit
        p_double = np.array([e.p_double for e in scene.emitters])
        if np.any(p_double > 0.0):
            extra = rng.random((n_pulses, m)) < p_double
            counts = emit * (1 + extra)
        else:
            counts = emit
        return EmissionBatch(counts.astype(np.uint8))

    if scene.mode == "classical-poisson":
        lam = np.broadcast_to(p_emit, (n_pulses, m))
    else:  # classical-blinking
        if blink_on is None:
            blink_on = sample_blink_trace(scene, rng, n_pulses)
        lam = p_emit * blink_on
    counts = rng.poisson(lam)
    return EmissionBatch(np.minimum(counts, 255).astype(np.uint8))
