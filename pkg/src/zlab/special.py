"""Zeta, log-gamma, chi, the Riemann-Siegel theta function and Hardy's Z.

Everything here works on numpy arrays; the scalar helpers (``zeta``,
``hardy_z`` ...) are thin wrappers.  The zeta kernel is Euler-Maclaurin
summation with the number of Dirichlet terms ``N`` and Bernoulli
corrections ``m`` planned from the standard remainder bound

    |R_m| <= |s + 2m + 1| / (sigma + 2m + 1) * |T_{m+1}|,

and points with ``Re s < 0`` go through the functional equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import AccuracyUnreachable, DomainError, PoleAt1

__all__ = [
    "EvalAccuracy",
    "ThetaExpansion",
    "THETA_EXPANSION",
    "T_CAP",
    "chi_factor",
    "eval_zeta",
    "hardy_z",
    "hardy_z_array",
    "log_gamma",
    "riemann_siegel_theta",
    "theta_mod_2pi",
    "zeta",
    "zeta_array",
    "zeta_translates",
]

T_CAP = 1e7  # beyond this the float64 phase t*log(n) drifts by more than 1e-6

# N = EM_ALPHA * |s| / 2pi makes consecutive Bernoulli terms shrink by ~1/EM_ALPHA**2
EM_ALPHA = 1.5
_K_MAX = 120
_BLOCK_ELEMS = 1 << 20  # complex entries per temporary matrix (16 MiB)

_PI_L = np.longdouble("3.141592653589793238462643383279502884")
_TWO_PI_L = 2 * _PI_L
_LOG_2PI = math.log(2 * math.pi)


@dataclass(frozen=True)
class EvalAccuracy:
    """Absolute error target and series-length cap for zeta evaluation.

    ``abs_tol=None`` selects the height-dependent default: 1e-10 up to
    ``|t| = 1e4`` and 1e-8 above.
    """

    abs_tol: float | None = None
    max_terms: int = 10_000_000

    def __post_init__(self):
        if self.abs_tol is not None and not self.abs_tol > 0:
            raise ValueError(f"abs_tol must be > 0, got {self.abs_tol!r}")
        if self.max_terms < 16:
            raise ValueError(f"max_terms must be >= 16, got {self.max_terms!r}")

    def tol_at(self, height):
        if self.abs_tol is not None:
            return self.abs_tol
        return 1e-10 if abs(height) <= 1e4 else 1e-8


DEFAULT_ACCURACY = EvalAccuracy()


# ---------------------------------------------------------------------------
# Bernoulli bookkeeping
# ---------------------------------------------------------------------------

def _zeta_even(k):
    """zeta(2k) for k >= 1 in double precision."""
    if k == 1:
        return math.pi ** 2 / 6
    if k == 2:
        return math.pi ** 4 / 90
    if k == 3:
        return math.pi ** 6 / 945
    p = 2 * k
    tail = 1000.0 ** (1 - p) / (p - 1)
    return math.fsum([n ** -p for n in range(1000, 0, -1)] + [tail])


@lru_cache(maxsize=None)
def _bernoulli_over_factorial():
    """b[k] = B_{2k} / (2k)! for k = 0.._K_MAX (b[0] unused)."""
    b = np.zeros(_K_MAX + 2)
    for k in range(1, _K_MAX + 2):
        b[k] = (-1) ** (k + 1) * 2.0 * _zeta_even(k) / (2 * math.pi) ** (2 * k)
    return b


# ---------------------------------------------------------------------------
# log Gamma and chi
# ---------------------------------------------------------------------------

# |B_2k| / (2k (2k-1)) with signs, for the Stirling series of log Gamma
_STIRLING = [
    Fraction(1, 6) / 2,
    Fraction(-1, 30) / 12,
    Fraction(1, 42) / 30,
    Fraction(-1, 30) / 56,
    Fraction(5, 66) / 90,
    Fraction(-691, 2730) / 132,
    Fraction(7, 6) / 182,
    Fraction(-3617, 510) / 240,
    Fraction(43867, 798) / 306,
    Fraction(-174611, 330) / 380,
]
_STIRLING_F = [float(c) for c in _STIRLING]
_STIRLING_SHIFT_RADIUS = 12.0


def _is_nonpositive_integer(z):
    return (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))


def _log_gamma_right(z):
    # Re z > 0: shift to |z| >= 12, then Stirling; sums of principal logs
    # of terms with positive real part give the continuous branch.
    shift = np.where(np.abs(z) < _STIRLING_SHIFT_RADIUS,
                     np.ceil(np.maximum(_STIRLING_SHIFT_RADIUS - z.real, 0.0)), 0.0)
    acc = np.zeros_like(z)
    nmax = int(shift.max()) if shift.size else 0
    for j in range(nmax):
        m = shift > j
        acc[m] += np.log(z[m] + j)
    w = z + shift
    inv = 1.0 / w
    inv2 = inv * inv
    series = np.zeros_like(w)
    for c in reversed(_STIRLING_F):
        series = series * inv2 + c
    series *= inv
    return (w - 0.5) * np.log(w) - w + 0.5 * _LOG_2PI + series - acc


def log_gamma(z):
    """log Gamma(z) on the standard branch (continuous off the negative real axis).

    Re z <= 0 is shifted right by the recurrence Gamma(z) = Gamma(z+n) / prod(z+k),
    whose principal logarithms keep the branch; for Re z below -1e5 the
    reflection formula is used instead and only exp(log_gamma) is exact.
    Accepts scalars or arrays.
    """
    zz = np.asarray(z, dtype=complex)
    scalar = zz.ndim == 0
    zz = np.atleast_1d(zz)
    if not np.all(np.isfinite(zz)):
        raise DomainError("log_gamma argument must be finite")
    if np.any(_is_nonpositive_integer(zz)):
        raise DomainError("log_gamma has poles at the non-positive integers")
    out = np.empty_like(zz)
    right = zz.real > 0
    out[right] = _log_gamma_right(zz[right])
    far = zz.real < -_RECURRENCE_LIMIT
    near = ~right & ~far
    if np.any(near):
        zl = zz[near]
        n = np.ceil(1.0 - zl.real)
        acc = np.zeros_like(zl)
        for j in range(int(n.max())):
            m = n > j
            acc[m] += np.log(zl[m] + j)
        out[near] = _log_gamma_right(zl + n) - acc
    if np.any(far):
        zl = zz[far]
        out[far] = (math.log(math.pi) - _log_sin(math.pi * zl)
                    - _log_gamma_right(1.0 - zl))
    return complex(out[0]) if scalar else out


_RECURRENCE_LIMIT = 1e5


def _log_sin(z):
    """A logarithm of sin(z) that does not overflow for large |Im z|."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    big_up = z.imag > 20
    big_dn = z.imag < -20
    mid = ~(big_up | big_dn)
    if np.any(mid):
        with np.errstate(divide="ignore"):
            out[mid] = np.log(np.sin(z[mid]))
    # sin z = (i/2) e^{-iz} (1 - e^{2iz}); the second factor is ~1 for Im z >> 0
    log_i_half = complex(-math.log(2.0), math.pi / 2)
    if np.any(big_up):
        zu = z[big_up]
        out[big_up] = -1j * zu + np.log1p(-np.exp(2j * zu)) + log_i_half
    if np.any(big_dn):
        zd = np.conj(z[big_dn])
        out[big_dn] = np.conj(-1j * zd + np.log1p(-np.exp(2j * zd)) + log_i_half)
    return out


def _chi_left(s):
    # Re s <= 1/2, so Re(1 - s) >= 1/2 and Gamma(1 - s) has no poles
    ls = _log_sin(0.5 * math.pi * s)
    zero = np.isneginf(ls.real)
    val = (s * math.log(2.0) + (s - 1.0) * math.log(math.pi) + ls
           + _log_gamma_right(1.0 - s))
    out = np.exp(np.where(zero, 0.0, val))
    out[zero] = 0.0
    return out


def chi_factor(s):
    """chi(s) = 2^s pi^(s-1) sin(pi s / 2) Gamma(1 - s), so zeta(s) = chi(s) zeta(1-s).

    Raises DomainError at s = 1, 3, 5, ... where Gamma(1-s) has a pole that
    the sine factor does not cancel.
    """
    ss = np.asarray(s, dtype=complex)
    scalar = ss.ndim == 0
    ss = np.atleast_1d(ss)
    if not np.all(np.isfinite(ss)):
        raise DomainError("chi argument must be finite")
    out = np.empty_like(ss)
    left = ss.real <= 0.5
    if np.any(left):
        out[left] = _chi_left(ss[left])
    right = ~left
    if np.any(right):
        sr = ss[right]
        odd = (sr.imag == 0) & (sr.real == np.round(sr.real)) & (np.round(sr.real) % 2 == 1)
        if np.any(odd):
            raise DomainError("chi(s) has poles at s = 1, 3, 5, ...")
        out[right] = 1.0 / _chi_left(1.0 - sr)
    if not np.all(np.isfinite(out)):
        raise DomainError("chi(s) overflowed")
    return complex(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Euler-Maclaurin zeta
# ---------------------------------------------------------------------------

def _plan_em(s_abs, sigma, tol, max_terms):
    """Pick (N, m) so the worst point of a batch meets ``tol``."""
    b = _bernoulli_over_factorial()
    log_tol = math.log(tol)
    N = max(16, math.ceil(EM_ALPHA * (s_abs + 1.0) / (2 * math.pi)))
    while True:
        if N > max_terms:
            raise AccuracyUnreachable(
                f"zeta at |s|={s_abs:.6g} needs more than max_terms={max_terms} terms "
                f"for abs_tol={tol:g}")
        logN = math.log(N)
        # log |T_1| = log|b_1| + log|s| - (sigma + 1) log N
        log_prod = math.log(max(s_abs, 1e-300))
        for m in range(0, _K_MAX):
            k = m + 1  # T_{m+1}
            if k > 1:
                log_prod += math.log(s_abs + 2 * k - 3) + math.log(s_abs + 2 * k - 2)
            log_term = math.log(abs(b[k])) + log_prod - (sigma + 2 * k - 1) * logN
            ratio = (s_abs + 2 * m + 1) / (sigma + 2 * m + 1)
            if log_term + math.log(ratio) < log_tol:
                return N, m
        N = math.ceil(1.5 * N)


def _em_tail(s, N, m):
    """-N^-s/2 + N^(1-s)/(s-1) + sum of m Bernoulli corrections."""
    b = _bernoulli_over_factorial()
    logN = math.log(N)
    n_ms = np.exp(-s * logN)
    out = N * n_ms / (s - 1.0) - 0.5 * n_ms
    if m == 0:
        return out
    inv_n2 = 1.0 / (N * N)
    term = b[1] * s * n_ms / N
    total = term.copy()
    for k in range(1, m):
        term = term * ((b[k + 1] / b[k]) * inv_n2) * (s + (2 * k - 1)) * (s + 2 * k)
        total += term
    return out + total


def _dirichlet_direct(s, N):
    """sum_{n<=N} n^-s for a 1-D array s."""
    out = np.zeros(s.shape, dtype=complex)
    block = max(1, _BLOCK_ELEMS // max(1, s.size))
    for n0 in range(1, N + 1, block):
        logn = np.log(np.arange(n0, min(N, n0 + block - 1) + 1, dtype=float))
        out += np.exp(-np.multiply.outer(s, logn)).sum(axis=1)
    return out


def _height_bins(heights, factor=1.25):
    """Group indices by |height| so each group shares one N."""
    key = np.floor(np.log(np.abs(heights) + 16.0) / math.log(factor)).astype(np.int64)
    order = np.argsort(key, kind="stable")
    ks = key[order]
    splits = np.flatnonzero(np.diff(ks)) + 1
    return np.split(order, splits)


def _check_points(s):
    if not np.all(np.isfinite(s)):
        raise DomainError("zeta argument must be finite")
    if np.any(np.abs(s.imag) > T_CAP):
        raise DomainError(f"|Im s| must be <= {T_CAP:g}")
    if np.any(s == 1.0):
        raise PoleAt1("zeta has a pole at s = 1")


def _zeta_em(s, acc):
    # plain Euler-Maclaurin; the remainder bound needs Re s > -1
    out = np.empty_like(s)
    for idx in _height_bins(s.imag):
        sb = s[idx]
        tol = min(acc.tol_at(h) for h in (sb.imag.min(), sb.imag.max()))
        # a quarter of the budget goes to truncation, the rest to rounding slack
        N, m = _plan_em(float(np.abs(sb).max()), float(sb.real.min()), tol / 4, acc.max_terms)
        out[idx] = _dirichlet_direct(sb, N) + _em_tail(sb, N, m)
    return out


def zeta_array(s, acc=None, direct=False):
    """zeta at every entry of ``s`` (any shape) with absolute error <= acc tolerance.

    Points with Re s < 0 go through the functional equation unless
    ``direct=True``, which sums Euler-Maclaurin on the spot (Re s > -1 only);
    the two routes are independent, which is what the functional-equation
    checks rely on.
    """
    acc = acc or DEFAULT_ACCURACY
    ss = np.asarray(s, dtype=complex)
    shape = ss.shape
    ss = ss.ravel()
    _check_points(ss)
    if direct:
        if np.any(ss.real <= -1):
            raise DomainError("direct Euler-Maclaurin needs Re s > -1")
        return _zeta_em(ss, acc).reshape(shape)
    out = np.empty_like(ss)
    # near s = 0 reflection would evaluate next to the pole; EM is fine there
    left = (ss.real < 0) & (np.abs(ss) > 0.25)
    right = ~left
    if np.any(right):
        out[right] = _zeta_em(ss[right], acc)
    if np.any(left):
        sl = ss[left]
        chi = chi_factor(sl)
        # tighten the inner tolerance by |chi| so the product meets the target
        scale = float(np.abs(chi).max()) or 1.0
        tol = min(acc.tol_at(h) for h in (sl.imag.min(), sl.imag.max()))
        inner = EvalAccuracy(abs_tol=tol / max(scale, 1.0), max_terms=acc.max_terms)
        out[left] = chi * _zeta_em(1.0 - sl, inner)
    if not np.all(np.isfinite(out)):
        raise AccuracyUnreachable("zeta evaluation produced a non-finite value")
    return out.reshape(shape)


def zeta(s, acc=None):
    """zeta(s) for one complex point."""
    return complex(zeta_array(np.array([s], dtype=complex), acc)[0])


eval_zeta = zeta


def _translate_block(sigma, shifts, offsets, N, m):
    logn = np.log(np.arange(1, N + 1, dtype=float))
    phase_u = np.exp(-1j * np.multiply.outer(logn, offsets))  # N x J, shared by every shift
    amp = np.exp(-sigma * logn)
    rows = max(1, _BLOCK_ELEMS // N)
    out = np.empty((shifts.size, offsets.size), dtype=complex)
    for r0 in range(0, shifts.size, rows):
        ts = shifts[r0:r0 + rows]
        a = amp * np.exp(-1j * np.multiply.outer(ts, logn))
        out[r0:r0 + rows] = a @ phase_u
    s = sigma + 1j * (shifts[:, None] + offsets[None, :])
    return out + _em_tail(s, N, m)


def zeta_translates(sigma, shifts, offsets, acc=None):
    """Matrix ``Z[k, j] = zeta(sigma + i (shifts[k] + offsets[j]))``.

    The Dirichlet sum factors as ``n^-(sigma + i T) * n^(-i u)``, so the
    ``n^(-i u)`` table is built once per height group and the sum becomes a
    matrix product.  This is the fast path for many windows that share the
    same local nodes.
    """
    acc = acc or DEFAULT_ACCURACY
    shifts = np.atleast_1d(np.asarray(shifts, dtype=float))
    offsets = np.atleast_1d(np.asarray(offsets, dtype=float))
    if shifts.size == 0 or offsets.size == 0:
        return np.zeros((shifts.size, offsets.size), dtype=complex)
    heights = np.concatenate([shifts + offsets.min(), shifts + offsets.max()])
    if not np.all(np.isfinite(heights)) or not math.isfinite(sigma):
        raise DomainError("translate heights must be finite")
    if np.abs(heights).max() > T_CAP:
        raise DomainError(f"|Im s| must be <= {T_CAP:g}")
    if sigma == 1.0 and np.any(np.isclose(shifts[:, None] + offsets[None, :], 0.0, atol=0.0)):
        raise PoleAt1("zeta has a pole at s = 1")
    if sigma < 0:
        chi = chi_factor(sigma + 1j * (shifts[:, None] + offsets[None, :]))
        scale = max(float(np.abs(chi).max()), 1.0)
        tol = min(acc.tol_at(h) for h in (heights.min(), heights.max()))
        inner = EvalAccuracy(abs_tol=tol / scale, max_terms=acc.max_terms)
        return chi * zeta_translates(1.0 - sigma, -shifts, -offsets, inner)
    out = np.empty((shifts.size, offsets.size), dtype=complex)
    span = float(np.abs(offsets).max())
    for idx in _height_bins(shifts):
        ts = shifts[idx]
        top = float(np.abs(ts).max()) + span
        tol = min(acc.tol_at(h) for h in (float(np.abs(ts).min()), top))
        s_abs = math.hypot(max(sigma, 1.0), top)
        N, m = _plan_em(s_abs, sigma, tol / 4, acc.max_terms)
        out[idx] = _translate_block(sigma, ts, offsets, N, m)
    if not np.all(np.isfinite(out)):
        raise AccuracyUnreachable("zeta evaluation produced a non-finite value")
    return out


# ---------------------------------------------------------------------------
# theta and Z
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThetaExpansion:
    """Large-t expansion of the Riemann-Siegel theta function.

    theta(t) = (t/2) log(t/2pi) - t/2 - pi/8 + sum_k c_k t^(1-2k) with
    c_k = (1 - 2^(1-2k)) |B_2k| / (4k(2k-1)), i.e. 1/48, 7/5760, 31/80640, ...
    """

    coefficients: tuple = ()
    next_coefficient: float = 0.0

    @classmethod
    def build(cls, n_terms=6):
        bern = [Fraction(1, 6), Fraction(1, 30), Fraction(1, 42), Fraction(1, 30),
                Fraction(5, 66), Fraction(691, 2730), Fraction(7, 6), Fraction(3617, 510)]
        coef = []
        for k in range(1, n_terms + 2):
            coef.append((1 - Fraction(2) ** (1 - 2 * k)) * bern[k - 1] / (4 * k * (2 * k - 1)))
        return cls(tuple(float(c) for c in coef[:n_terms]), float(coef[n_terms]))

    def correction(self, t):
        t = np.asarray(t, dtype=float)
        inv = 1.0 / t
        inv2 = inv * inv
        acc = np.zeros_like(t)
        for c in reversed(self.coefficients):
            acc = acc * inv2 + c
        return acc * inv

    def remainder_bound(self, t):
        """Twice the first omitted term; decreasing in t."""
        t = np.asarray(t, dtype=float)
        return 2.0 * self.next_coefficient * t ** (1 - 2 * (len(self.coefficients) + 1))

    def value_long(self, t):
        tl = np.asarray(t, dtype=np.longdouble)
        main = tl / 2 * np.log(tl / _TWO_PI_L) - tl / 2 - _PI_L / 8
        return main + self.correction(np.asarray(t, dtype=float)).astype(np.longdouble)


THETA_EXPANSION = ThetaExpansion.build()
_THETA_SWITCH = 10.0


def _theta_small(t):
    return np.imag(log_gamma(0.25 + 0.5j * t)) - 0.5 * t * math.log(math.pi)


def _theta_long(t):
    """theta(|t|) as longdouble for a float array, sign restored afterwards."""
    at = np.abs(t)
    out = np.empty(at.shape, dtype=np.longdouble)
    big = at >= _THETA_SWITCH
    if np.any(big):
        out[big] = THETA_EXPANSION.value_long(at[big])
    if np.any(~big):
        out[~big] = _theta_small(at[~big]).astype(np.longdouble)
    return np.where(t < 0, -out, out)


def riemann_siegel_theta(t):
    """theta(t) = Im log Gamma(1/4 + it/2) - (t/2) log pi, odd in t, theta(0) = 0."""
    tt = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(tt)):
        raise DomainError("theta argument must be finite")
    out = _theta_long(np.atleast_1d(tt)).astype(float)
    return float(out[0]) if tt.ndim == 0 else out.reshape(tt.shape)


def theta_mod_2pi(t):
    """theta(t) reduced to [0, 2pi) in extended precision.

    Use this, not ``riemann_siegel_theta``, to build phases at large t: the
    reduction happens before rounding to float64.
    """
    tt = np.asarray(t, dtype=float)
    red = np.mod(_theta_long(np.atleast_1d(tt)), _TWO_PI_L).astype(float)
    return float(red[0]) if tt.ndim == 0 else red.reshape(tt.shape)


def hardy_z_array(t, acc=None):
    """Return ``(Z, residual_imag)`` arrays for real heights ``t``."""
    tt = np.asarray(t, dtype=float)
    w = np.exp(1j * theta_mod_2pi(tt)) * zeta_array(0.5 + 1j * tt, acc)
    return w.real, w.imag


def hardy_z(t, acc=None, return_imag=False):
    """Z(t) = exp(i theta(t)) zeta(1/2 + it), real for real t.

    With ``return_imag=True`` also returns the residual imaginary part,
    which measures how well theta and zeta agree.
    """
    acc = acc or DEFAULT_ACCURACY
    z, im = hardy_z_array(np.array([t], dtype=float), acc)
    z, im = float(z[0]), float(im[0])
    limit = max(1e-8, 10 * acc.tol_at(t))
    if abs(im) > limit:
        raise AccuracyUnreachable(f"Z({t}) has residual imaginary part {im:.3g} > {limit:.3g}")
    return (z, im) if return_imag else z
