"""Canonical config digests used to tie every output file to its run."""

import dataclasses
import hashlib
import json


def _plain(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {k: _plain(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def config_digest(scene, psf, grid, camera, n_frames, pulse_rate_hz):
    """SHA-256 over the canonical JSON form of the full acquisition config."""
    doc = {
        "scene": _plain(scene),
        "psf": _plain(psf),
        "grid": _plain(grid),
        "camera": _plain(camera),
        "n_frames": int(n_frames),
        "pulse_rate_hz": float(pulse_rate_hz),
    }
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).digest()
