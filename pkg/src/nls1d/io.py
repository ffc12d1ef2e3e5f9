"""Binary dump formats, manifests, and config hashing.

Array dump layout (little-endian throughout):

    magic "NLS1" | u32 n_points | f64 x_min | f64 dx | u8 topology | payload

with topology 0 = periodic, 1 = truncated, and the payload n_points
interleaved (re, im) f64 pairs.  A trajectory dump is a header
(u32 n_steps | f64 t_start | f64 dt) followed by n_steps + 1 array dumps.
Manifests are deterministic JSON (sorted keys, no timestamps).
"""

from __future__ import annotations

import hashlib
import json
import struct

import numpy as np

from nls1d.grid import PERIODIC, TRUNCATED, Grid, GridFunction
from nls1d.picard import TimeGrid, Trajectory

MAGIC = b"NLS1"
_HEADER = struct.Struct("<4sIddB")
_TRAJ_HEADER = struct.Struct("<Idd")
_TOPOLOGY_CODE = {PERIODIC: 0, TRUNCATED: 1}
_TOPOLOGY_NAME = {v: k for k, v in _TOPOLOGY_CODE.items()}


def _pack_grid_function(f: GridFunction) -> bytes:
    header = _HEADER.pack(MAGIC, f.grid.n_points, f.grid.x_min, f.grid.dx,
                          _TOPOLOGY_CODE[f.grid.topology])
    return header + f.values.astype("<c16").tobytes()


def _unpack_grid_function(buf: bytes, offset: int = 0) -> tuple[GridFunction, int]:
    magic, n, x_min, dx, topo = _HEADER.unpack_from(buf, offset)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}; not an array dump")
    if topo not in _TOPOLOGY_NAME:
        raise ValueError(f"unknown topology code {topo}")
    offset += _HEADER.size
    payload = np.frombuffer(buf, dtype="<c16", count=n, offset=offset)
    offset += 16 * n
    grid = Grid(x_min, dx, int(n), _TOPOLOGY_NAME[topo])
    return GridFunction(grid, payload.astype(np.complex128)), offset


def grid_function_to_bytes(f: GridFunction) -> bytes:
    return _pack_grid_function(f)


def trajectory_to_bytes(traj: Trajectory) -> bytes:
    parts = [_TRAJ_HEADER.pack(traj.time_grid.n_steps, traj.time_grid.t_start,
                               traj.time_grid.dt)]
    parts.extend(_pack_grid_function(traj.node(i)) for i in range(traj.n_nodes))
    return b"".join(parts)


def write_grid_function(f: GridFunction, path) -> None:
    with open(path, "wb") as fh:
        fh.write(_pack_grid_function(f))


def read_grid_function(path) -> GridFunction:
    with open(path, "rb") as fh:
        out, _ = _unpack_grid_function(fh.read())
    return out


def write_trajectory(traj: Trajectory, path) -> None:
    with open(path, "wb") as fh:
        fh.write(trajectory_to_bytes(traj))


def read_trajectory(path) -> Trajectory:
    with open(path, "rb") as fh:
        buf = fh.read()
    n_steps, t_start, dt = _TRAJ_HEADER.unpack_from(buf, 0)
    offset = _TRAJ_HEADER.size
    slices = []
    for _ in range(n_steps + 1):
        gf, offset = _unpack_grid_function(buf, offset)
        slices.append(gf)
    return Trajectory.from_slices(TimeGrid(t_start, dt, int(n_steps)), slices)


def write_manifest(payload: dict, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj)!r}")


def config_sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
