"""Post-processing of snapshot sequences: fronts, speeds, plateaus, harmonics.

A front is a localized band of steep |d(field)/dx|.  Fronts are detected per
snapshot, associated across snapshots by nearest prediction, and each track's
speed comes from a least-squares fit of position against time.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FrontTrack",
    "detect_fronts",
    "track_fronts",
    "plateau_value",
    "harmonic_amplitudes",
]


def detect_fronts(x, values, min_separation: float,
                  rel_threshold: float = 5.0,
                  prominence_frac: float = 0.02) -> np.ndarray:
    """Positions of steep-gradient peaks in one profile, left to right.

    A front is a local maximum of |gradient| that clears rel_threshold times
    the median gradient magnitude, stands out from its surroundings by at
    least prominence_frac of the largest gradient, and sits at least
    min_separation away from any taller peak.  The position is the
    gradient-weighted centroid over the peak's prominence base.
    """
    from scipy.signal import find_peaks

    x = np.asarray(x, dtype=float)
    values = np.asarray(values, dtype=float)
    g = np.abs(np.gradient(values, x))
    gmax = float(np.max(g))
    if gmax == 0.0:
        return np.empty(0)
    dx = float(np.median(np.diff(x)))
    height = rel_threshold * float(np.median(g))
    peaks, props = find_peaks(
        g, height=height, prominence=prominence_frac * gmax,
        distance=max(1, int(round(min_separation / dx))))
    out = []
    for p, lo, hi in zip(peaks, props["left_bases"], props["right_bases"]):
        # narrow the base to the half-prominence neighborhood of the peak
        lo = max(lo, p - int(round(min_separation / dx)))
        hi = min(hi, p + int(round(min_separation / dx)))
        w = g[lo:hi + 1]
        out.append(float(np.sum(w * x[lo:hi + 1]) / np.sum(w)))
    return np.array(out)


@dataclass
class FrontTrack:
    """One front followed through time."""

    times: list[float] = field(default_factory=list)
    positions: list[float] = field(default_factory=list)

    def add(self, t: float, x: float):
        self.times.append(t)
        self.positions.append(x)

    @property
    def n_points(self) -> int:
        return len(self.times)

    def speed(self) -> float:
        """Least-squares slope of position against time."""
        if self.n_points < 2:
            raise ValueError("need at least two points to fit a speed")
        t = np.asarray(self.times)
        p = np.asarray(self.positions)
        slope, _ = np.polyfit(t, p, 1)
        return float(slope)


def track_fronts(times, front_lists, max_jump: float,
                 min_points: int = 3) -> list[FrontTrack]:
    """Associate per-snapshot front positions into tracks.

    Each detected front attaches to the open track whose extrapolated position
    is nearest (within max_jump); leftovers open new tracks.  Only tracks with
    at least min_points survive.
    """
    tracks: list[FrontTrack] = []
    last_seen: list[float] = []   # time at which each track was last extended

    for t, fronts in zip(times, front_lists):
        fronts = sorted(float(f) for f in np.atleast_1d(fronts))
        predictions = []
        for tr in tracks:
            if tr.n_points >= 2:
                dt = t - tr.times[-1]
                v = (tr.positions[-1] - tr.positions[-2]) / (tr.times[-1] - tr.times[-2])
                predictions.append(tr.positions[-1] + v * dt)
            else:
                predictions.append(tr.positions[-1])

        taken = [False] * len(tracks)
        for f in fronts:
            best, best_d = -1, max_jump
            for j, pred in enumerate(predictions):
                d = abs(f - pred)
                if not taken[j] and d < best_d:
                    best, best_d = j, d
            if best >= 0:
                taken[best] = True
                tracks[best].add(t, f)
                last_seen[best] = t
            else:
                tr = FrontTrack()
                tr.add(t, f)
                tracks.append(tr)
                predictions.append(f)
                taken.append(True)
                last_seen.append(t)

    return [tr for tr in tracks if tr.n_points >= min_points]


def front_speeds_by_rank(times, front_lists) -> np.ndarray:
    """Speeds of persistent fronts, associated by left-to-right rank.

    Keeps only the snapshots showing the modal number of fronts, pairs the
    k-th leftmost front across them, and fits a least-squares speed per rank.
    Robust when the same wave fan is visible throughout the window and fronts
    do not cross, which holds for a monotone multi-wave fan.
    """
    counts = [len(np.atleast_1d(f)) for f in front_lists]
    if not counts:
        raise ValueError("no snapshots given")
    mode = int(np.bincount(counts).argmax())
    if mode == 0:
        return np.empty(0)
    t_sel, pos = [], []
    for t, f in zip(times, front_lists):
        f = np.sort(np.atleast_1d(f))
        if len(f) == mode:
            t_sel.append(t)
            pos.append(f)
    if len(t_sel) < 2:
        raise ValueError("fewer than two snapshots at the modal front count")
    t_sel = np.asarray(t_sel)
    pos = np.asarray(pos)                      # (n_snapshots, mode)
    return np.array([np.polyfit(t_sel, pos[:, k], 1)[0] for k in range(mode)])


def plateau_value(x, values, x_lo: float, x_hi: float) -> float:
    """Median of a field over a spatial window (robust plateau estimate)."""
    x = np.asarray(x, dtype=float)
    values = np.asarray(values, dtype=float)
    mask = (x >= x_lo) & (x <= x_hi)
    if not np.any(mask):
        raise ValueError(f"empty plateau window [{x_lo}, {x_hi}]")
    return float(np.median(values[mask]))


def harmonic_amplitudes(t, signal, omega: float, n_harmonics: int) -> np.ndarray:
    """Amplitudes of harmonics 1..n of a periodic signal by least squares.

    Fits signal ~ a0 + sum_n (an sin(n w t) + bn cos(n w t)) over the samples
    given and returns sqrt(an^2 + bn^2) for each harmonic.  Restrict t to a
    whole number of periods of steady response for clean estimates.
    """
    t = np.asarray(t, dtype=float)
    signal = np.asarray(signal, dtype=float)
    if len(t) < 2 * n_harmonics + 1:
        raise ValueError("not enough samples for the requested harmonics")
    cols = [np.ones_like(t)]
    for n in range(1, n_harmonics + 1):
        cols.append(np.sin(n * omega * t))
        cols.append(np.cos(n * omega * t))
    design = np.stack(cols, axis=1)
    coeffs, *_ = np.linalg.lstsq(design, signal, rcond=None)
    amps = np.hypot(coeffs[1::2], coeffs[2::2])
    return amps
