"""Pulse transition functions G(p_f, p_i) and their application.

A pulse conserves quasi-momentum, so its momentum-space kernel is diagonal
in q and block-structured in the diffraction order: the stored array
``blocks[j, s_f, n_f, s_i, n_i]`` is the amplitude
``<s_f, q_j + n_f hbar K | pulse | s_i, q_j + n_i hbar K>``.  Columns are
obtained by evolving momentum eigenstates through the pulse; all columns of
one build share a single batched adaptive solve.

Binary cache format "MWTF1" (little endian):

    offset  size  content
    0       6     magic b"MWTF1\\0"
    6       2     format version, uint16 (currently 1)
    8       4     header length L, uint32
    12      L     UTF-8 JSON header: config, settings, grid_points, n_max,
                  built input columns, array shape
    12+L    -     blocks as complex128, C order, little endian
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .config import AUTO, ConfigError, DiffractionConfig
from .ladder import G
from .solver import SolverSettings, TruncationError, _solve_arrays
from .wavepacket import (GridMismatchError, WavePacket, brillouin_grid,
                         gaussian_packet)

MAGIC = b"MWTF1\x00"
FORMAT_VERSION = 1

#: Pulse areas of the standard pulses.
BEAM_SPLITTER_AREA = np.pi / 2
MIRROR_AREA = np.pi


@dataclass
class TransitionFunction:
    """Block-sparse pulse kernel, diagonal in quasi-momentum."""

    config: DiffractionConfig
    settings: SolverSettings
    grid_points: int
    blocks: np.ndarray          # (n_q, S, N, S, N) complex
    built: np.ndarray           # (S, N) bool, which input columns are valid
    n_max_used: int

    @property
    def q(self) -> np.ndarray:
        return brillouin_grid(self.grid_points)

    @property
    def n_states(self) -> int:
        return self.blocks.shape[1]

    @property
    def n_max(self) -> int:
        return (self.blocks.shape[2] - 1) // 2

    def element(self, s_f: int, n_f: int, s_i: int, n_i: int) -> np.ndarray:
        """Amplitude <s_f, q + n_f| pulse |s_i, q + n_i> over the q grid."""
        m = self.n_max
        if not self.built[s_i, n_i + m]:
            raise ConfigError(f"input column (state {s_i}, order {n_i}) "
                              "was not built")
        return self.blocks[:, s_f, n_f + m, s_i, n_i + m]

    def column_probabilities(self, s_i: int, n_i: int) -> np.ndarray:
        """Sum over final states: |G|^2 per final order, shape (n_q, N)."""
        m = self.n_max
        col = self.blocks[:, :, :, s_i, n_i + m]
        return np.sum(np.abs(col) ** 2, axis=1)

    def column_norms(self) -> np.ndarray:
        """Total probability per built input column, shape (n_cols, n_q)."""
        m = self.n_max
        out = []
        for s_i, ni in zip(*np.nonzero(self.built)):
            col = self.blocks[:, :, :, s_i, ni]
            out.append(np.sum(np.abs(col) ** 2, axis=(1, 2)))
        return np.asarray(out)

    def apply(self, psi: WavePacket) -> WavePacket:
        """psi_f(q + n) = sum_{m, s_i} G[s_f, s_i, n<-m](q) psi_i(q + m)."""
        if psi.grid_points != self.grid_points:
            raise GridMismatchError(
                f"packet grid ({psi.grid_points}/hbar K) does not match "
                f"transition function grid ({self.grid_points}/hbar K)")
        if psi.n_states != self.n_states or psi.n_max != self.n_max:
            raise GridMismatchError("packet ladder does not match "
                                    "transition function ladder")
        # Far Gaussian tails (relative amplitude < 1e-2, i.e. < 1e-4 in
        # probability) may fall on unbuilt columns; they are truncated by
        # the zero blocks, consistent with the 1e-3 integral tolerances.
        peak = np.max(np.abs(psi.psi))
        support = np.max(np.abs(psi.psi), axis=2) > 1e-2 * peak
        if np.any(support & ~self.built):
            raise ConfigError("packet has support on input columns that "
                              "were not built")
        out = np.einsum("jabcd,cdj->abj", self.blocks, psi.psi)
        return WavePacket(psi.grid_points, out)

    def padded(self, n_max: int) -> "TransitionFunction":
        """Embed the kernel in a larger order ladder (outer blocks zero)."""
        pad = n_max - self.n_max
        if pad < 0:
            raise ValueError("cannot shrink the order ladder")
        if pad == 0:
            return self
        width = [(0, 0), (0, 0), (pad, pad), (0, 0), (pad, pad)]
        return TransitionFunction(
            config=self.config, settings=self.settings,
            grid_points=self.grid_points,
            blocks=np.pad(self.blocks, width),
            built=np.pad(self.built, [(0, 0), (pad, pad)]),
            n_max_used=self.n_max_used)

    def gaussian_input(self, p0: float, delta_p: float, state: int = G
                       ) -> WavePacket:
        return gaussian_packet(self.grid_points, self.n_max, p0, delta_p,
                               n_states=self.n_states, state=state)

    # -- serialization -----------------------------------------------------
    def to_bytes(self) -> bytes:
        header = {
            "config": self.config.to_dict(),
            "settings": self.settings.to_dict(),
            "grid_points": self.grid_points,
            "n_max_used": self.n_max_used,
            "built": [[int(s), int(n - self.n_max)]
                      for s, n in zip(*np.nonzero(self.built))],
            "shape": list(self.blocks.shape),
        }
        hdr = json.dumps(header, sort_keys=True).encode()
        arr = np.ascontiguousarray(self.blocks.astype("<c16"))
        return (MAGIC + struct.pack("<HI", FORMAT_VERSION, len(hdr))
                + hdr + arr.tobytes())

    @classmethod
    def from_bytes(cls, data: bytes) -> "TransitionFunction":
        if data[:6] != MAGIC:
            raise ValueError("not a MWTF1 transition-function file")
        version, hlen = struct.unpack_from("<HI", data, 6)
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported MWTF format version {version}")
        header = json.loads(data[12:12 + hlen].decode())
        shape = tuple(header["shape"])
        blocks = np.frombuffer(data[12 + hlen:], dtype="<c16").reshape(shape)
        n_max = (shape[2] - 1) // 2
        built = np.zeros(shape[1:3], dtype=bool)
        for s, n in header["built"]:
            built[s, n + n_max] = True
        return cls(config=DiffractionConfig.from_dict(header["config"]),
                   settings=SolverSettings(**header["settings"]),
                   grid_points=header["grid_points"],
                   blocks=blocks.astype(complex), built=built,
                   n_max_used=header["n_max_used"])

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "TransitionFunction":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())


def prepared_input(config: DiffractionConfig, mirror: bool
                   ) -> tuple[int, int]:
    """Preparation convention (internal state, diffraction order).

    Beam splitters and single-geometry pulses start in |g, 0>.  Double
    mirrors start at |-hbar K>; for Raman the resonant mirror path
    e(-1) -> g(0) -> e(+1) runs through the excited state, so the packet is
    prepared in |e, -hbar K> (the state the first beam splitter leaves the
    arms in).  Double Bragg mirrors stay in the ground state throughout.
    """
    from .config import Geometry, Mechanism
    if not (mirror and config.geometry is Geometry.DOUBLE):
        return (G, 0)
    if config.mechanism is Mechanism.RAMAN:
        return (1, -1)  # |e, -hbar K>
    return (G, -1)


def default_input_columns(config: DiffractionConfig, mirror: bool
                          ) -> list[tuple[int, int]]:
    return [prepared_input(config, mirror)]


def build(config: DiffractionConfig, grid_points: int = 256,
          input_columns: Optional[Sequence[tuple[int, int]]] = None,
          settings: SolverSettings = SolverSettings(),
          q_subset: Optional[np.ndarray] = None) -> TransitionFunction:
    """Build the transition function on the quasi-momentum grid.

    One batched adaptive solve evolves the eigenstate basis vectors of every
    requested input column at every grid point.  With ``config.n_max`` left
    automatic, the ladder is enlarged until the solution stops changing.

    ``q_subset`` restricts the solve to selected q indices (the remaining
    columns stay zero); analyses whose inputs have narrow support use this
    to avoid solving the whole zone.
    """
    q_full = brillouin_grid(grid_points)
    idx = np.arange(grid_points) if q_subset is None else np.asarray(q_subset)
    q = q_full[idx]
    mirror = config.pulse_area >= 0.75 * np.pi
    cols = list(input_columns) if input_columns is not None \
        else default_input_columns(config, mirror)
    n_states = config.n_states
    for s_i, m in cols:
        if s_i >= n_states:
            raise ConfigError("input state not carried by this mechanism")

    min_n = max(3, max(abs(m) for _, m in cols) + 2)

    def y0_for(n_max):
        y0 = np.zeros((len(q), len(cols), n_states, 2 * n_max + 1),
                      dtype=complex)
        for c, (s_i, m) in enumerate(cols):
            y0[:, c, s_i, m + n_max] = 1.0
        return y0

    qb = q[:, None]  # broadcast over the column axis
    if config.pulse_area == 0.0:
        n_used = config.n_max if config.n_max is not AUTO else min_n
        y = y0_for(n_used)
    elif config.n_max is not AUTO:
        n_used = config.n_max
        if n_used < min_n:
            raise ConfigError(f"n_max={n_used} too small for input orders "
                              f"{[m for _, m in cols]}")
        y = _solve_arrays(config, n_used, y0_for(n_used), qb, settings)
    else:
        from .solver import _converged_solve
        y, n_used = _converged_solve(config, y0_for, qb, settings,
                                     floor=min_n)

    n_q = grid_points
    size = 2 * n_used + 1
    blocks = np.zeros((n_q, n_states, size, n_states, size), dtype=complex)
    built = np.zeros((n_states, size), dtype=bool)
    for c, (s_i, m) in enumerate(cols):
        blocks[idx, :, :, s_i, m + n_used] = y[:, c]
        built[s_i, m + n_used] = True
    return TransitionFunction(config=config, settings=settings,
                              grid_points=grid_points, blocks=blocks,
                              built=built, n_max_used=n_used)
