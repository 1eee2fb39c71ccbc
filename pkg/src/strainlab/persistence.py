"""Bit-exact persistence: field snapshots, diagnostics CSV, run manifests.

Snapshots are little-endian regardless of host.  CSV values carry 17
significant digits, enough to reproduce every double exactly, so a
write/read/write cycle and a rerun with the same seed both yield identical
bytes.
"""

from __future__ import annotations

import json
import math
import struct
from pathlib import Path

import numpy as np

from .diagnostics import DEFAULT_ALPHAS, DEFAULT_QS, DiagnosticsRecord
from .solver import SimState
from .spectral import Grid3, TensorField, VectorField, _Field

SNAPSHOT_MAGIC = b"MNSS"
SNAPSHOT_VERSION = 1
KIND_STRAIN = 0
KIND_VECTOR = 1

_HEADER = struct.Struct("<IIBd")  # version, n, field kind, time


class SnapshotError(ValueError):
    pass


def write_field_snapshot(path: str | Path, fld: _Field, time: float = 0.0) -> None:
    """Components in storage order, modes row-major over the FFT index order."""
    if fld.ncomp == 6:
        kind = KIND_STRAIN
    elif fld.ncomp == 3:
        kind = KIND_VECTOR
    else:
        raise SnapshotError(f"no snapshot kind for a {fld.ncomp}-component field")
    with open(path, "wb") as handle:
        handle.write(SNAPSHOT_MAGIC)
        handle.write(_HEADER.pack(SNAPSHOT_VERSION, fld.grid.n, kind, time))
        handle.write(np.ascontiguousarray(fld.coeffs).astype("<c16").tobytes())


def read_field_snapshot(
    path: str | Path, grid: Grid3 | None = None
) -> tuple[_Field, float]:
    """Load a snapshot; the dealias cutoff is not stored, so pass a grid to
    choose one (its n must match) or accept the default n // 3."""
    data = Path(path).read_bytes()
    if len(data) < len(SNAPSHOT_MAGIC) or data[: len(SNAPSHOT_MAGIC)] != SNAPSHOT_MAGIC:
        raise SnapshotError(f"{path}: not a field snapshot (bad magic)")
    if len(data) < len(SNAPSHOT_MAGIC) + _HEADER.size:
        raise SnapshotError(f"{path}: truncated header")
    version, n, kind, time = _HEADER.unpack_from(data, len(SNAPSHOT_MAGIC))
    if version != SNAPSHOT_VERSION:
        raise SnapshotError(f"{path}: unsupported version {version}")
    if kind not in (KIND_STRAIN, KIND_VECTOR):
        raise SnapshotError(f"{path}: unknown field kind {kind}")
    if grid is None:
        grid = Grid3(n)
    elif grid.n != n:
        raise SnapshotError(f"{path}: snapshot n = {n}, requested grid n = {grid.n}")
    ncomp = 6 if kind == KIND_STRAIN else 3
    payload = data[len(SNAPSHOT_MAGIC) + _HEADER.size :]
    expected = ncomp * n**3 * 16
    if len(payload) < expected:
        raise SnapshotError(
            f"{path}: truncated payload ({len(payload)} of {expected} bytes)"
        )
    if len(payload) > expected:
        raise SnapshotError(f"{path}: {len(payload) - expected} trailing bytes")
    coeffs = (
        np.frombuffer(payload, dtype="<c16")
        .reshape(ncomp, n, n, n)
        .astype(np.complex128)
    )
    cls = TensorField if kind == KIND_STRAIN else VectorField
    return cls(grid, coeffs), time


def write_state_snapshot(path: str | Path, state: SimState) -> None:
    write_field_snapshot(path, state.strain, state.t)


def read_state_snapshot(path: str | Path, grid: Grid3 | None = None) -> SimState:
    fld, time = read_field_snapshot(path, grid)
    if fld.ncomp != 6:
        raise SnapshotError(f"{path}: state snapshots hold strain fields")
    return SimState(time, fld)


# ---------------------------------------------------------------------------
# diagnostics CSV

_SCALAR_COLUMNS = (
    "t",
    "enstrophy",
    "h1_sq",
    "h2_sq",
    "resolution_fraction",
    "resolution_ok",
    "det_int",
    "rate_measured",
    "rate_identity",
    "rate_vorticity",
    "ortho_resid",
    "cubic_resid_det",
    "cubic_resid_tr",
    "pairing_resid_adv",
    "pairing_resid_mix",
    "endpoint_ratio",
    "blowup_ratio",
    "inf_rho_l2",
    "rho_star_l2",
)


def csv_columns(
    alphas: tuple[float, ...] = DEFAULT_ALPHAS, qs: tuple[float, ...] = DEFAULT_QS
) -> list[str]:
    cols = list(_SCALAR_COLUMNS)
    for a in alphas:
        cols += [f"q_h_a{a:g}", f"crit_a{a:g}", f"inf_rho_h_a{a:g}"]
    for q in qs:
        cols += [f"inf_rho_l_q{q:g}", f"crit_q{q:g}", f"lam2p_q{q:g}"]
    return cols


def _cell(value: float) -> str:
    return format(value, ".17g")


def _record_row(rec: DiagnosticsRecord, alphas: tuple[float, ...], qs: tuple[float, ...]) -> str:
    cells = []
    for name in _SCALAR_COLUMNS:
        if name == "resolution_ok":
            cells.append(str(int(rec.resolution_ok)))
        else:
            cells.append(_cell(getattr(rec, name)))
    nan = math.nan
    for a in alphas:
        cells.append(_cell(rec.q_h_alpha.get(a, nan)))
        cells.append(_cell(rec.crit_alpha.get(a, nan)))
        cells.append(_cell(rec.inf_rho_halpha.get(a, nan)))
    for q in qs:
        cells.append(_cell(rec.inf_rho_lq.get(q, nan)))
        cells.append(_cell(rec.crit_lq.get(q, nan)))
        cells.append(_cell(rec.lambda2p_lq.get(q, nan)))
    return ",".join(cells)


def write_diagnostics_csv(
    path: str | Path,
    records: list[DiagnosticsRecord],
    alphas: tuple[float, ...] = DEFAULT_ALPHAS,
    qs: tuple[float, ...] = DEFAULT_QS,
) -> None:
    lines = [",".join(csv_columns(alphas, qs))]
    lines += [_record_row(rec, alphas, qs) for rec in records]
    text = "\n".join(lines) + "\n"
    try:
        Path(path).write_bytes(text.encode("ascii"))
    except OSError as exc:
        raise OSError(f"cannot write diagnostics CSV {path}: {exc.strerror}") from exc


def read_diagnostics_csv(path: str | Path) -> dict[str, np.ndarray]:
    """Columns as float arrays keyed by header name (no quoting in format)."""
    lines = Path(path).read_text(encoding="ascii").splitlines()
    if not lines:
        raise ValueError(f"{path}: empty diagnostics file")
    names = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:] if line]
    for i, row in enumerate(rows):
        if len(row) != len(names):
            raise ValueError(f"{path}: row {i + 2} has {len(row)} of {len(names)} cells")
    data = np.array(rows, dtype=np.float64) if rows else np.empty((0, len(names)))
    return {name: data[:, j].copy() for j, name in enumerate(names)}


# ---------------------------------------------------------------------------
# run manifest


def write_manifest(path: str | Path, manifest: dict) -> None:
    Path(path).write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def read_manifest(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
