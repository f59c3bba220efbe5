"""Content-addressed cache for transition functions.

Cache files use the MWTF1 binary layout (see :mod:`matterwave.transition`)
and are keyed by a SHA-256 hash of the fully resolved build inputs, so a
warm cache can never serve stale results for a changed configuration.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Optional, Sequence

from . import transition
from .config import DiffractionConfig
from .solver import SolverSettings

ENV_VAR = "MATTERWAVE_CACHE_DIR"


def cache_dir_from_env(explicit: Optional[str] = None) -> Optional[Path]:
    path = explicit if explicit is not None else os.environ.get(ENV_VAR)
    return Path(path) if path else None


def content_key(config: DiffractionConfig, grid_points: int,
                input_columns: Sequence[tuple[int, int]],
                settings: SolverSettings) -> str:
    payload = {
        "format": transition.FORMAT_VERSION,
        "config": config.to_dict(),
        "grid_points": grid_points,
        "input_columns": sorted([int(s), int(m)] for s, m in input_columns),
        "settings": settings.to_dict(),
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def build_cached(config: DiffractionConfig, grid_points: int = 256,
                 input_columns: Optional[Sequence[tuple[int, int]]] = None,
                 settings: SolverSettings = SolverSettings(),
                 cache_dir: Optional[Path] = None
                 ) -> transition.TransitionFunction:
    """Build a transition function, reusing a cached copy when available."""
    if input_columns is None:
        mirror = config.pulse_area >= 0.75 * 3.141592653589793
        input_columns = transition.default_input_columns(config, mirror)
    if cache_dir is None:
        return transition.build(config, grid_points, input_columns, settings)

    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    key = content_key(config, grid_points, input_columns, settings)
    path = cache_dir / f"{key}.mwtf"
    if path.exists():
        return transition.TransitionFunction.load(path)

    tf = transition.build(config, grid_points, input_columns, settings)
    # atomic publish so concurrent runs never observe a torn file
    fd, tmp = tempfile.mkstemp(dir=cache_dir, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(tf.to_bytes())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return tf
