"""Absolute-value integrals of complex curves.

``integrate_abs`` is the certified single-interval integrator: panels are
refined until the two-level (7-point Gauss vs 15-point Kronrod, or Simpson
with 2 vs 4 subintervals) estimates agree, and panels are split at zeros of
real curves / near-zeros of complex ones because ``|c|`` has a kink there.

``window_abs_integrals`` does the same job for many windows ``[T_k, T_k+H]``
at once.  All windows share one set of local nodes so the zeta values come
from a single matrix product (``zeta_translates``); windows whose error
estimate exceeds the tolerance are redone with ``integrate_abs``.
"""

from __future__ import annotations

import math
import warnings
from collections import namedtuple
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from ._parallel import ordered_map
from .errors import DomainError, ToleranceNotMet
from .special import EvalAccuracy, hardy_z_array, theta_mod_2pi, zeta_array, zeta_translates
from .targets import LineSegment, TargetFunction, WeightFunction

__all__ = [
    "QuadratureConfig",
    "QuadResult",
    "integrate_abs",
    "l1_translate_distance",
    "l1_translate_distances",
    "short_interval_mean",
    "short_interval_means",
    "sup_abs",
    "window_abs_integrals",
    "zeta_window_curve",
]

QuadResult = namedtuple("QuadResult", "value error converged panels evaluations")

# Gauss-Kronrod nodes on [-1, 1] (QUADPACK qk15); the 7 Gauss nodes are the odd entries
_GK_X = np.array([
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245, 0.405845151377397166906606412076961,
    0.586087235467691130294144838258730, 0.741531185599394439863864773280788,
    0.864864423359769072789712788640926, 0.949107912342758524526189684047851,
    0.991455371120812639206854697526329])
_GK_WK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970])
_GK_WG = np.zeros(15)
_GK_WG[1::2] = [
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082]


@dataclass(frozen=True)
class _Rule:
    sample: np.ndarray  # sorted sample positions on [0, 1], endpoints included
    w_hi: np.ndarray    # weights over ``sample`` for the finer estimate
    w_lo: np.ndarray
    richardson: bool

    def sums(self, absval, width):
        hi = (absval @ self.w_hi) * width
        lo = (absval @ self.w_lo) * width
        if self.richardson:
            d = (hi - lo) / 15.0
            return hi + d, np.abs(d)
        return hi, np.abs(hi - lo)


def _gk_rule():
    sample = np.concatenate([[0.0], (_GK_X + 1) / 2, [1.0]])
    w_hi = np.concatenate([[0.0], _GK_WK / 2, [0.0]])
    w_lo = np.concatenate([[0.0], _GK_WG / 2, [0.0]])
    return _Rule(sample, w_hi, w_lo, False)


def _simpson_rule():
    sample = np.linspace(0.0, 1.0, 5)
    return _Rule(sample, np.array([1, 4, 2, 4, 1]) / 12.0, np.array([1, 0, 4, 0, 1]) / 6.0, True)


_RETRY_FACTORS = (2, 4, 8, 16)

RULES = {"gauss-legendre-7/15": _gk_rule(), "composite-simpson": _simpson_rule()}


@dataclass(frozen=True)
class QuadratureConfig:
    """Quadrature settings shared by every integral in the package.

    ``base_panels=None`` means ``ceil(8 * length * log(2 + T))`` for single
    integrals, which tracks the oscillation rate theta'(T) ~ log(T/2pi)/2.
    Batched window runs default to ``ceil(length * log(2 + T))`` panels and
    rely on the per-window error check to catch the windows that need more.
    """

    base_panels: int | None = None
    max_depth: int = 30
    abs_tol: float = 1e-8
    rule: str = "gauss-legendre-7/15"
    zeta_accuracy: EvalAccuracy | None = None

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError(f"abs_tol must be > 0, got {self.abs_tol!r}")
        if self.base_panels is not None and self.base_panels < 4:
            raise ValueError(f"base_panels must be >= 4, got {self.base_panels!r}")
        if self.max_depth < 1:
            raise ValueError(f"max_depth must be >= 1, got {self.max_depth!r}")
        if self.rule not in RULES:
            raise ValueError(f"rule must be one of {sorted(RULES)}, got {self.rule!r}")

    @property
    def rule_obj(self):
        return RULES[self.rule]

    def panels_for(self, length, height):
        if self.base_panels is not None:
            return self.base_panels
        return max(4, math.ceil(8 * length * math.log(2 + abs(height))))

    def batch_panels_for(self, length, height):
        if self.base_panels is not None:
            return self.base_panels
        return max(4, math.ceil(length * math.log(2 + abs(height))))

    def accuracy(self):
        """Zeta accuracy: a tenth of the quadrature tolerance unless set explicitly."""
        if self.zeta_accuracy is not None:
            return self.zeta_accuracy
        return EvalAccuracy(abs_tol=min(1e-10, self.abs_tol / 10))


# ---------------------------------------------------------------------------
# single interval
# ---------------------------------------------------------------------------

def _scalar(curve, x):
    return np.asarray(curve(np.array([x], dtype=float)))[0]


def _real_roots(curve, xs, cs):
    """Roots of a real curve bracketed by sign changes between samples."""
    s = np.sign(cs)
    idx = np.flatnonzero(s[:-1] * s[1:] < 0)
    roots = []
    f = lambda x: float(np.real(_scalar(curve, x)))
    for j in idx:
        a, b = float(xs[j]), float(xs[j + 1])
        fa, fb = f(a), f(b)
        if fa * fb > 0:
            # a sample sits within rounding of the root; batch and scalar
            # evaluations disagree on its sign, so split at that sample
            roots.append(a if abs(fa) < abs(fb) else b)
        elif fa == 0 or fb == 0:
            roots.append(a if fa == 0 else b)
        else:
            roots.append(brentq(f, a, b, xtol=4e-16 * max(1.0, abs(a)), rtol=8.9e-16))
    return roots


def _near_zero(curve, lo, hi, cs):
    """Minimiser of |c| on a panel where Re c and Im c both change sign."""
    re, im = np.sign(cs.real), np.sign(cs.imag)
    if not (np.any(re[:-1] * re[1:] < 0) and np.any(im[:-1] * im[1:] < 0)):
        return []
    res = minimize_scalar(lambda x: abs(_scalar(curve, x)) ** 2, bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-13 * max(1.0, abs(lo))})
    x = float(res.x)
    # a minimiser hugging an end is the kink we already split at
    edge = 1e-3 * (hi - lo)
    if not lo + edge < x < hi - edge or res.fun >= np.min(np.abs(cs)) ** 2:
        return []
    return [x]


def _split_points(lo, hi, pts):
    margin = 1e-9 * (hi - lo)
    inner = sorted(p for p in pts if lo + margin < p < hi - margin)
    return [lo] + inner + [hi]


def integrate_abs(curve, a, b, cfg=None, *, height=None, kinks=None, full_output=False):
    """Integral of ``|curve(t)|`` over ``[a, b]``.

    ``curve`` must accept a 1-D float array and return a real or complex
    array of the same length.  ``kinks``, if given, is a real function of t
    whose sign changes are kinks of the curve (Z under |Z|, say); panels are
    split there as at zeros of a real curve.  The estimated error is below
    ``cfg.abs_tol`` unless ``cfg.max_depth`` runs out, in which case a
    ``ToleranceNotMet`` warning is emitted and the best estimate is returned.
    """
    cfg = cfg or QuadratureConfig()
    a, b = float(a), float(b)
    if a == b:
        return QuadResult(0.0, 0.0, True, 0, 0) if full_output else 0.0
    if not a < b:
        raise ValueError(f"integrate_abs needs a < b, got [{a}, {b}]")
    rule = cfg.rule_obj
    n0 = cfg.panels_for(b - a, max(abs(a), abs(b)) if height is None else height)
    edges = np.linspace(a, b, n0 + 1)
    pending = [(edges[i], edges[i + 1], 0) for i in range(n0)]
    accepted = []
    converged = True
    n_evals = 0
    density = cfg.abs_tol / (b - a)
    # a panel holding a |.| kink has error proportional to its width, so the
    # width-proportional share alone is never met there; tiny absolute errors pass
    floor = 1e-3 * cfg.abs_tol
    while pending:
        lo = np.array([p[0] for p in pending])
        hi = np.array([p[1] for p in pending])
        depth = [p[2] for p in pending]
        width = hi - lo
        x = lo[:, None] + width[:, None] * rule.sample[None, :]
        c = np.asarray(curve(x.ravel())).reshape(x.shape)
        n_evals += c.size
        if not np.all(np.isfinite(c)):
            raise DomainError("curve is not finite on the integration interval")
        kv = None if kinks is None else np.real(np.asarray(kinks(x.ravel()))).reshape(x.shape)
        val, err = rule.sums(np.abs(c), width)
        nxt = []
        for i in range(len(pending)):
            ci = c[i]
            real = not np.iscomplexobj(ci) or not np.any(ci.imag)
            if real:
                pts = _real_roots(curve, x[i], np.real(ci))
            elif err[i] > density * width[i] and depth[i] < cfg.max_depth:
                pts = _near_zero(curve, lo[i], hi[i], ci)
            else:
                pts = []
            if kv is not None:
                pts = pts + _real_roots(kinks, x[i], kv[i])
            cuts = _split_points(lo[i], hi[i], pts)
            if len(cuts) > 2 and depth[i] < cfg.max_depth:
                nxt.extend((cuts[j], cuts[j + 1], depth[i] + 1) for j in range(len(cuts) - 1))
            elif err[i] <= max(density * width[i], floor) or width[i] <= 1e-13 * max(1.0, abs(lo[i])):
                accepted.append((lo[i], val[i], err[i]))
            elif depth[i] >= cfg.max_depth:
                accepted.append((lo[i], val[i], err[i]))
                converged = False
            else:
                mid = 0.5 * (lo[i] + hi[i])
                nxt.append((lo[i], mid, depth[i] + 1))
                nxt.append((mid, hi[i], depth[i] + 1))
        pending = nxt
    accepted.sort(key=lambda r: r[0])
    value = math.fsum(r[1] for r in accepted)
    error = math.fsum(r[2] for r in accepted)
    converged = converged or error <= cfg.abs_tol
    if not converged:
        warnings.warn(ToleranceNotMet(
            f"integral over [{a}, {b}] has error estimate {error:.3g} > {cfg.abs_tol:.3g}"),
            stacklevel=2)
    if full_output:
        return QuadResult(value, error, converged, len(accepted), n_evals)
    return value


def sup_abs(curve, a, b, cfg=None, *, height=None):
    """max |curve| over the base quadrature grid of [a, b] (sup-norm variant)."""
    cfg = cfg or QuadratureConfig()
    n0 = cfg.panels_for(b - a, max(abs(a), abs(b)) if height is None else height)
    rule = cfg.rule_obj
    edges = np.linspace(a, b, n0 + 1)
    x = edges[:-1, None] + np.diff(edges)[:, None] * rule.sample[None, :]
    return float(np.max(np.abs(curve(x.ravel()))))


# ---------------------------------------------------------------------------
# many windows
# ---------------------------------------------------------------------------

def _illinois(points, T, a, b, fa, fb, iters=60):
    """Vectorised Illinois (modified regula falsi) root refinement."""
    a, b, fa, fb = a.copy(), b.copy(), fa.copy(), fb.copy()
    side = np.zeros(a.shape, dtype=int)
    active = np.ones(a.shape, dtype=bool)
    for _ in range(iters):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        c = (a[idx] * fb[idx] - b[idx] * fa[idx]) / (fb[idx] - fa[idx])
        c = np.clip(c, np.minimum(a[idx], b[idx]), np.maximum(a[idx], b[idx]))
        fc = np.real(points(T[idx], c))
        left = np.sign(fc) == np.sign(fa[idx])
        # replace the endpoint with the same sign; halve the stale one's value
        i_l, i_r = idx[left], idx[~left]
        a[i_l], fa[i_l] = c[left], fc[left]
        fb[i_l] *= np.where(side[i_l] == -1, 0.5, 1.0)
        side[i_l] = -1
        b[i_r], fb[i_r] = c[~left], fc[~left]
        fa[i_r] *= np.where(side[i_r] == 1, 0.5, 1.0)
        side[i_r] = 1
        done = (fc == 0) | (np.abs(b[idx] - a[idx]) <= 1e-14 * np.maximum(1.0, np.abs(c)))
        a[idx[fc == 0]] = c[fc == 0]
        b[idx[fc == 0]] = c[fc == 0]
        active[idx[done]] = False
    return 0.5 * (a + b)


def _graded(cuts, ratio=0.15, levels=8):
    """Add points approaching each interior cut geometrically from both sides.

    A cusp like |t - t0|^a with a < 1 at a cut limits a Gauss rule on the
    adjacent panel to O(w^(1+a)); on the graded pieces it is smooth again.
    """
    pts = list(cuts)
    for i in range(1, len(cuts) - 1):
        r = cuts[i]
        for nb in (cuts[i - 1], cuts[i + 1]):
            d = nb - r
            pts += [r + d * ratio ** k for k in range(1, levels + 1)]
    return sorted(pts)


def _kink_panels(sources, points, rule, shifts, offs, val, err, panel_w, graded=False):
    """Re-integrate panels holding sign changes of any source, split at the roots.

    ``sources`` is a list of ``(values, fn)``: K x P x S samples of a real
    function and its elementwise evaluator ``fn(T, u)``.  ``graded=True``
    also grades the split panels toward each root.
    """
    kk_l, pp_l, root_l = [], [], []
    for c, fn in sources:
        sgn = np.sign(c)
        change = sgn[:, :, :-1] * sgn[:, :, 1:] < 0  # K x P x (S-1)
        if not change.any():
            continue
        kk, pp, jj = np.nonzero(change)
        kk_l.append(kk)
        pp_l.append(pp)
        root_l.append(_illinois(fn, shifts[kk], offs[pp, jj], offs[pp, jj + 1],
                                c[kk, pp, jj], c[kk, pp, jj + 1]))
    if not kk_l:
        return
    kk, pp, roots = np.concatenate(kk_l), np.concatenate(pp_l), np.concatenate(root_l)
    order = np.lexsort((roots, pp, kk))
    kk, pp, roots = kk[order], pp[order], roots[order]
    key = kk * offs.shape[0] + pp
    starts = np.flatnonzero(np.r_[True, key[1:] != key[:-1]])
    sub_T, sub_lo, sub_hi, owner = [], [], [], []
    for g, s0 in enumerate(starts):
        s1 = starts[g + 1] if g + 1 < len(starts) else len(key)
        k, p = kk[s0], pp[s0]
        cuts = _split_points(p * panel_w, (p + 1) * panel_w, roots[s0:s1].tolist())
        if graded:
            cuts = _graded(cuts)
        for j in range(len(cuts) - 1):
            sub_T.append(shifts[k])
            sub_lo.append(cuts[j])
            sub_hi.append(cuts[j + 1])
            owner.append((k, p))
    sub_T = np.array(sub_T)
    sub_lo = np.array(sub_lo)
    width = np.array(sub_hi) - sub_lo
    x = sub_lo[:, None] + width[:, None] * rule.sample[None, :]
    cv = np.abs(points(np.repeat(sub_T, rule.sample.size), x.ravel())).reshape(x.shape)
    v, e = rule.sums(cv, width)
    owner = np.array(owner)
    val[owner[:, 0], owner[:, 1]] = 0.0
    err[owner[:, 0], owner[:, 1]] = 0.0
    np.add.at(val, (owner[:, 0], owner[:, 1]), v)
    np.add.at(err, (owner[:, 0], owner[:, 1]), e)


def window_abs_integrals(outer, points, shifts, H, cfg=None, *, height=None, real=False,
                         kinks=None, cusps=False, norm="L1", threads=None, chunk=256):
    """Integrals (or sups) of ``|c(T_k, u)|`` over ``u in [0, H]`` for every shift.

    ``outer(shifts, offsets)`` returns the ``K x J`` matrix of curve values
    and ``points(T, u)`` evaluates elementwise.  ``real=True`` promises the
    curve is real, enabling root splitting inside the batch.  ``kinks(T, u)``
    is an optional real function whose sign changes are kinks of the curve;
    ``outer`` then returns the pair ``(curve, kink_values)``; ``cusps=True``
    says the curve is not Lipschitz there and grades the panels.  Returns
    ``(values, errors, n_fallback)``.
    """
    cfg = cfg or QuadratureConfig()
    shifts = np.atleast_1d(np.asarray(shifts, dtype=float))
    if norm not in ("L1", "sup"):
        raise ValueError(f"norm must be 'L1' or 'sup', got {norm!r}")
    if shifts.size == 0:
        return np.zeros(0), np.zeros(0), 0
    rule = cfg.rule_obj
    top = float(np.abs(shifts).max()) + H if height is None else height
    P0 = cfg.batch_panels_for(H, top)

    def level(P, sel):
        panel_w = H / P
        offs = (np.arange(P)[:, None] + rule.sample[None, :]) * panel_w  # P x S
        flat = offs.ravel()

        def run(block):
            ts = sel[block]
            shape = (ts.size, P, rule.sample.size)
            c = outer(ts, flat)
            kv = None
            if kinks is not None:
                c, kv = c
                kv = np.real(np.asarray(kv)).reshape(shape)
            c = np.asarray(c).reshape(shape)
            if not np.all(np.isfinite(c)):
                raise DomainError("curve is not finite on some window")
            if norm == "sup":
                m = np.abs(c).max(axis=(1, 2))
                return m, np.zeros_like(m)
            val, err = rule.sums(np.abs(c), panel_w)
            sources = []
            if real:
                sources.append((np.real(c), points))
            if kv is not None:
                sources.append((kv, kinks))
            if sources:
                _kink_panels(sources, points, rule, ts, offs, val, err, panel_w, graded=cusps)
            return val.sum(axis=1), err.sum(axis=1)

        blocks = [slice(i, min(i + chunk, sel.size)) for i in range(0, sel.size, chunk)]
        parts = ordered_map(run, blocks, threads)
        return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])

    values, errors = level(P0, shifts)
    if norm == "sup":
        return values, errors, 0
    # windows over tolerance are retried in batch with more panels; near-zeros
    # of a complex curve are the usual culprits
    for factor in _RETRY_FACTORS:
        bad = np.flatnonzero(errors > cfg.abs_tol)
        if bad.size == 0:
            break
        v, e = level(factor * P0, shifts[bad])
        better = e < errors[bad]
        values[bad[better]], errors[bad[better]] = v[better], e[better]
    n_fallback = 0
    for k in np.flatnonzero(errors > cfg.abs_tol):
        T = shifts[k]
        kf = None if kinks is None else (lambda u, T=T: kinks(np.full(u.shape, T), u))
        res = integrate_abs(lambda u, T=T: points(np.full(u.shape, T), u), 0.0, H, cfg,
                            height=T, kinks=kf, full_output=True)
        values[k], errors[k] = res.value, res.error
        n_fallback += 1
    return values, errors, n_fallback


def zeta_window_curve(sigma, integrand, acc=None, cache_u=None):
    """Build ``(outer, points)`` for a curve ``integrand(T, u, zeta(sigma + i(T+u)))``."""

    def outer(shifts, offsets):
        z = zeta_translates(sigma, shifts, offsets, acc)
        return integrand(shifts[:, None], offsets[None, :], z)

    def points(T, u):
        z = zeta_array(sigma + 1j * (T + u), acc)
        return integrand(T, u, z)

    return outer, points


def _memo_target(f):
    """f(u) with the last full-offset evaluation cached (shared by every block)."""
    memo = {}

    def fu(u):
        key = (u.shape, u.tobytes())
        if key not in memo:
            memo.clear()
            memo[key] = f(u)
        return memo[key]

    return fu


# ---------------------------------------------------------------------------
# translate distances and short-interval means
# ---------------------------------------------------------------------------

def _check_target(f, H):
    if abs(f.domain_length - H) > 1e-12 * max(1.0, H):
        raise DomainError(f"target is defined on [0, {f.domain_length}] but the window has length {H}")


def l1_translate_distance(f: TargetFunction, seg: LineSegment, G: WeightFunction | None = None,
                          cfg: QuadratureConfig | None = None, norm="L1"):
    """Integral over [0, H] of |f(t) - G(T+t) zeta(sigma + i(T+t))| (or its sup)."""
    cfg = cfg or QuadratureConfig()
    G = G or WeightFunction.unit()
    _check_target(f, seg.length)
    acc = cfg.accuracy()
    T, sigma = seg.t_start, seg.sigma

    def curve(u):
        z = zeta_array(sigma + 1j * (T + u), acc)
        return f(u) - (z if G.is_unit else G(T + u) * z)

    if norm == "sup":
        return sup_abs(curve, 0.0, seg.length, cfg, height=T)
    if norm != "L1":
        raise ValueError(f"norm must be 'L1' or 'sup', got {norm!r}")
    return integrate_abs(curve, 0.0, seg.length, cfg, height=T)


def l1_translate_distances(f, sigma, shifts, H, G=None, cfg=None, norm="L1", threads=None):
    """``l1_translate_distance`` for every shift in ``shifts`` (batched).

    Returns ``(distances, error_estimates)``.
    """
    cfg = cfg or QuadratureConfig()
    G = G or WeightFunction.unit()
    _check_target(f, H)
    fu = _memo_target(f)

    def integrand(T, u, z):
        fv = fu(u) if u.ndim == 2 else f(u)
        return fv - (z if G.is_unit else G(T + u) * z)

    outer, points = zeta_window_curve(sigma, integrand, cfg.accuracy())
    vals, errs, _ = window_abs_integrals(outer, points, shifts, H, cfg, norm=norm, threads=threads)
    return vals, errs


def _critical_z(T, u, acc):
    z, _ = hardy_z_array(T + u, acc)
    return z


def short_interval_mean(seg: LineSegment, cfg: QuadratureConfig | None = None):
    """Integral of |zeta(sigma + it)| over [T, T + delta].

    On the critical line the integrand is |Z(t)|, whose kinks at zeros are
    located exactly by root splitting.
    """
    cfg = cfg or QuadratureConfig()
    acc = cfg.accuracy()
    if seg.sigma == 0.5:
        curve = lambda t: hardy_z_array(t, acc)[0]
    else:
        curve = lambda t: zeta_array(seg.sigma + 1j * t, acc)
    return integrate_abs(curve, seg.t_start, seg.t_end, cfg, height=seg.t_start)


def short_interval_means(sigma, starts, delta, cfg=None, threads=None):
    """Batched ``short_interval_mean`` for windows ``[T_k, T_k + delta]``.

    Returns ``(means, error_estimates)``.
    """
    cfg = cfg or QuadratureConfig()
    acc = cfg.accuracy()
    if sigma == 0.5:
        def outer(shifts, offsets):
            z = zeta_translates(0.5, shifts, offsets, acc)
            t = shifts[:, None] + offsets[None, :]
            return np.real(np.exp(1j * theta_mod_2pi(t)) * z)

        def points(T, u):
            return hardy_z_array(T + u, acc)[0]

        vals, errs, _ = window_abs_integrals(outer, points, starts, delta, cfg, real=True,
                                             threads=threads)
    else:
        outer, points = zeta_window_curve(sigma, lambda T, u, z: z, acc)
        vals, errs, _ = window_abs_integrals(outer, points, starts, delta, cfg, threads=threads)
    return vals, errs
