"""Snapshot CSV ingestion.

The on-disk contract is a plain CSV with the exact header
``x,rho,v,s11,p,t11,gamma``: positions in meters (strictly increasing),
density, velocity, deviatoric stress, pressure, axial stress, and the
integer plastic-loading flag. Anything else is rejected with an error that
names the offending file and line.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

__all__ = ["SNAPSHOT_HEADER", "Snapshot", "SnapshotFormatError",
           "read_snapshot_csv"]

SNAPSHOT_HEADER = ("x", "rho", "v", "s11", "p", "t11", "gamma")


class SnapshotFormatError(ValueError):
    """A snapshot CSV violates the contract; carries file and line."""

    def __init__(self, path: str, line: int, message: str):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


@dataclass(frozen=True)
class Snapshot:
    """One parsed snapshot, column per field."""

    path: str
    x: np.ndarray
    rho: np.ndarray
    v: np.ndarray
    s11: np.ndarray
    p: np.ndarray
    t11: np.ndarray
    gamma: np.ndarray

    def field(self, name: str) -> np.ndarray:
        if name not in SNAPSHOT_HEADER[1:]:
            raise KeyError(name)
        return getattr(self, name)


def read_snapshot_csv(path: str) -> Snapshot:
    """Parse one snapshot CSV, enforcing the full contract."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SnapshotFormatError(path, 1, "empty file") from None
        if tuple(header) != SNAPSHOT_HEADER:
            raise SnapshotFormatError(
                path, 1, f"bad header {','.join(header)!r}; "
                f"expected {','.join(SNAPSHOT_HEADER)!r}")
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(SNAPSHOT_HEADER):
                raise SnapshotFormatError(
                    path, line_no,
                    f"expected {len(SNAPSHOT_HEADER)} fields, got {len(row)}")
            try:
                rows.append([float(cell) for cell in row])
            except ValueError as exc:
                raise SnapshotFormatError(path, line_no, str(exc)) from None
    if not rows:
        raise SnapshotFormatError(path, 2, "no data rows")
    data = np.asarray(rows)
    if not np.all(np.isfinite(data)):
        bad = int(np.argwhere(~np.isfinite(data).all(axis=1))[0, 0])
        raise SnapshotFormatError(path, bad + 2, "non-finite value")
    x = data[:, 0]
    if np.any(np.diff(x) <= 0.0):
        bad = int(np.argwhere(np.diff(x) <= 0.0)[0, 0]) + 1
        raise SnapshotFormatError(path, bad + 2,
                                  "x column must be strictly increasing")
    gamma = data[:, 6]
    if np.any(gamma != np.rint(gamma)):
        bad = int(np.argwhere(gamma != np.rint(gamma))[0, 0])
        raise SnapshotFormatError(path, bad + 2,
                                  "gamma column must be integer-valued")
    return Snapshot(path=path, x=x, rho=data[:, 1], v=data[:, 2],
                    s11=data[:, 3], p=data[:, 4], t11=data[:, 5],
                    gamma=gamma.astype(int))
