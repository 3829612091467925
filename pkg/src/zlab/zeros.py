"""Zeros of Z(t) on the critical line by sign changes, and window counts."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from ._parallel import ordered_map
from .errors import DomainError, GridTooCoarse
from .special import EvalAccuracy, hardy_z_array, riemann_siegel_theta

__all__ = [
    "WindowCount",
    "ZeroRecord",
    "default_grid_step",
    "estimate_N",
    "scan_zero_ordinates",
    "window_zero_count",
    "window_zero_counts",
    "write_zeros_csv",
]

# Z is evaluated to 1e-12 here so that signs stay reliable inside tight brackets
_ACC = EvalAccuracy(abs_tol=1e-12)
_MISS_SLACK = 2.0
_SEGMENT = 2048  # grid points per independent scan segment


@dataclass(frozen=True)
class ZeroRecord:
    ordinate: float
    bracket_width: float
    z_left: float
    z_right: float


@dataclass(frozen=True)
class WindowCount:
    T: float
    delta: float
    observed: int
    predicted: float

    @property
    def predicted_log_T(self):
        """The cruder ``delta log T / 2pi`` form of the same prediction."""
        return self.delta * math.log(self.T) / (2 * math.pi)


def estimate_N(T):
    """Main term theta(T)/pi + 1 of the zero counting function."""
    if not T >= 2:
        raise DomainError(f"estimate_N needs T >= 2, got {T}")
    return float(riemann_siegel_theta(T)) / math.pi + 1.0


def default_grid_step(t_hi):
    """Half the mean zero gap at the top of the range."""
    return 0.5 * math.pi / math.log(max(t_hi, 10.0) / (2 * math.pi))


def _z(t):
    return hardy_z_array(np.asarray(t, dtype=float), _ACC)[0]


def _bisect(a, b, za, zb):
    """Vectorised bisection of brackets [a, b] until width <= 1e-9 max(1, t)."""
    a, b, za, zb = a.copy(), b.copy(), za.copy(), zb.copy()
    while True:
        live = (b - a) > 1e-9 * np.maximum(1.0, a)
        if not live.any():
            return a, b, za, zb
        idx = np.flatnonzero(live)
        m = 0.5 * (a[idx] + b[idx])
        zm = _z(m)
        left = np.sign(zm) == np.sign(za[idx])
        a[idx[left]], za[idx[left]] = m[left], zm[left]
        b[idx[~left]], zb[idx[~left]] = m[~left], zm[~left]
        hit = zm == 0
        a[idx[hit]] = b[idx[hit]] = m[hit]


def _hidden_pairs(grid, z):
    """Brackets for close zero pairs that fall between two grid points.

    A grid local minimum of |Z| with no sign change around it is probed by
    minimising sign * Z over its two cells; a negative minimum splits the
    cell into two sign-change brackets.
    """
    s = np.sign(z)
    a = np.abs(z)
    i = np.arange(1, grid.size - 1)
    cand = i[(s[i - 1] == s[i]) & (s[i] == s[i + 1]) & (s[i] != 0)
             & (a[i] < a[i - 1]) & (a[i] < a[i + 1])]
    lo, hi, zlo, zhi = [], [], [], []
    for k in cand:
        sk = s[k]
        res = minimize_scalar(lambda x: sk * float(_z(np.array([x]))[0]),
                              bounds=(grid[k - 1], grid[k + 1]), method="bounded",
                              options={"xatol": 1e-10 * max(1.0, grid[k])})
        if res.fun < 0:
            x, zx = float(res.x), sk * res.fun
            lo += [grid[k - 1], x]
            hi += [x, grid[k + 1]]
            zlo += [z[k - 1], zx]
            zhi += [zx, z[k + 1]]
    return np.array(lo), np.array(hi), np.array(zlo), np.array(zhi)


def _scan_segment(grid):
    z = _z(grid)
    s = np.sign(z)
    j = np.flatnonzero(s[:-1] * s[1:] < 0)
    exact = np.flatnonzero(s == 0)
    hl, hh, hzl, hzh = _hidden_pairs(grid, z)
    a, b, za, zb = _bisect(np.r_[grid[j], hl], np.r_[grid[j + 1], hh],
                           np.r_[z[j], hzl], np.r_[z[j + 1], hzh])
    recs = [ZeroRecord(float(0.5 * (x + y)), float(y - x), float(u), float(v))
            for x, y, u, v in zip(a, b, za, zb)]
    recs += [ZeroRecord(float(grid[k]), 0.0, 0.0, 0.0) for k in exact]
    return recs


def scan_zero_ordinates(t_lo, t_hi, grid_step=None, threads=None):
    """Zeros of Z in [t_lo, t_hi] located by sign changes on a uniform grid.

    Each sign change is bisected to a bracket of width at most
    ``1e-9 * max(1, t)``.  If fewer zeros turn up than the main term of
    N(T) predicts (by more than 2) a ``GridTooCoarse`` warning is issued.
    """
    t_lo, t_hi = float(t_lo), float(t_hi)
    if not (math.isfinite(t_lo) and math.isfinite(t_hi)) or t_lo < 0 or not t_lo < t_hi:
        raise DomainError(f"scan needs 0 <= t_lo < t_hi, got [{t_lo}, {t_hi}]")
    step = default_grid_step(t_hi) if grid_step is None else float(grid_step)
    if not step > 0:
        raise DomainError(f"grid_step must be > 0, got {step}")
    n = max(1, math.ceil((t_hi - t_lo) / step))
    grid = np.linspace(t_lo, t_hi, n + 1)
    # pieces overlap by one cell so each grid point is interior to one of them;
    # brackets found twice are dropped below
    pieces = [grid[max(0, i - 1):i + _SEGMENT + 1] for i in range(0, n, _SEGMENT)]
    found = [r for part in ordered_map(_scan_segment, pieces, threads) for r in part]
    found.sort(key=lambda r: r.ordinate)
    out = []
    for r in found:  # grid points that are exact zeros can show up twice
        if out and r.ordinate - out[-1].ordinate <= max(r.bracket_width, out[-1].bracket_width, 1e-12):
            continue
        out.append(r)
    if t_hi >= 2 and t_hi - t_lo > 1e-6:
        expected = estimate_N(t_hi) - (estimate_N(t_lo) if t_lo >= 2 else 0.0)
        if len(out) < expected - _MISS_SLACK:
            warnings.warn(GridTooCoarse(
                f"found {len(out)} zeros in [{t_lo}, {t_hi}] but about {expected:.1f} expected; "
                f"try a smaller grid_step than {step:.3g}"), stacklevel=2)
    return out


def _predicted(T, delta):
    return delta * math.log(T / (2 * math.pi)) / (2 * math.pi)


def _check_window(T, delta):
    if not T >= 10:
        raise DomainError(f"window counts need T >= 10, got {T}")
    if not 0 < delta <= 1:
        raise DomainError(f"window counts need 0 < delta <= 1, got {delta}")


def window_zero_count(T, delta, grid_step=None):
    """Observed vs predicted zero count in [T, T + delta]."""
    _check_window(T, delta)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GridTooCoarse)  # single short windows fluctuate
        zs = scan_zero_ordinates(T, T + delta, grid_step)
    return WindowCount(float(T), float(delta), len(zs), _predicted(T, delta))


def window_zero_counts(T, delta, n_windows, grid_step=None, threads=None):
    """Counts in the consecutive windows [T + k delta, T + (k+1) delta], k < n_windows.

    One scan covers the whole range; ordinates are then binned.
    """
    _check_window(T, delta)
    if n_windows < 1:
        raise DomainError(f"n_windows must be >= 1, got {n_windows}")
    edges = T + delta * np.arange(n_windows + 1)
    zs = scan_zero_ordinates(edges[0], edges[-1], grid_step, threads=threads)
    counts = np.histogram([z.ordinate for z in zs], bins=edges)[0]
    return [WindowCount(float(edges[k]), float(delta), int(counts[k]), _predicted(edges[k], delta))
            for k in range(n_windows)]


def write_zeros_csv(path_or_file, zeros):
    """Write ``ordinate,bracket_width`` rows with 12 significant digits."""
    def dump(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["ordinate", "bracket_width"])
        for z in zeros:
            w.writerow([f"{z.ordinate:.12g}", f"{z.bracket_width:.12g}"])

    if hasattr(path_or_file, "write"):
        dump(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            dump(fh)
