"""Reproducible experiments on zeta translates; each returns an ExperimentRecord."""

from __future__ import annotations

import dataclasses
import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidRectangle
from .quadrature import (
    QuadratureConfig,
    integrate_abs,
    l1_translate_distances,
    short_interval_means,
    window_abs_integrals,
)
from .records import ExperimentRecord
from .special import hardy_z_array, theta_mod_2pi, zeta, zeta_array, zeta_translates
from .targets import LineSegment, TargetFunction, WeightFunction

__all__ = [
    "ConvexityParams",
    "ShiftGrid",
    "certified_M",
    "convexity_check",
    "density_measure",
    "growth_exponent_fit",
    "lemma1_parameters",
    "nonuniversality_bound_run",
    "phase_lower_bound",
    "phase_lower_bounds",
    "sine_phase_average",
    "sine_phase_sweep",
    "translate_search",
    "z_universality_search",
]

TWO_OVER_PI = 2 / math.pi
ZETA4 = math.pi ** 4 / 90
ZETA2 = math.pi ** 2 / 6
PHASE_FLOOR = 1e-14
DEFAULT_SLACK = 0.15


@dataclass(frozen=True)
class ShiftGrid:
    """Shifts T in [T_min, T_max].

    ``phase-locked`` grids have spacing at most pi / log(T_max / 2pi), one
    step per oscillation of theta at the top of the range; with no spacing
    given that bound itself is used.
    """

    T_min: float
    T_max: float
    spacing: float | None = None
    sampling: str = "phase-locked"

    def __post_init__(self):
        if self.sampling not in ("uniform", "phase-locked"):
            raise DomainError(f"sampling must be 'uniform' or 'phase-locked', got {self.sampling!r}")
        if not (math.isfinite(self.T_min) and math.isfinite(self.T_max)) or self.T_min < 0:
            raise DomainError("grid bounds must be finite and T_min >= 0")
        if self.T_max < self.T_min:
            raise DomainError(f"T_max < T_min: [{self.T_min}, {self.T_max}]")
        bound = self.phase_bound()
        if self.spacing is None:
            if self.sampling == "uniform":
                raise DomainError("a uniform grid needs an explicit spacing")
            object.__setattr__(self, "spacing", bound)
        if not self.spacing > 0:
            raise DomainError(f"spacing must be > 0, got {self.spacing}")
        if self.sampling == "phase-locked" and self.spacing > bound * (1 + 1e-12):
            raise DomainError(f"phase-locked spacing {self.spacing} exceeds pi/log(T_max/2pi) = {bound}")

    def phase_bound(self):
        x = math.log(self.T_max / (2 * math.pi)) if self.T_max > 0 else 0.0
        return math.pi / x if x > 1 else math.pi

    def points(self):
        if self.T_max == self.T_min:
            return np.array([self.T_min])
        n = max(1, math.ceil((self.T_max - self.T_min) / self.spacing - 1e-9))
        return np.linspace(self.T_min, self.T_max, n + 1)

    def as_dict(self):
        return {"T_min": self.T_min, "T_max": self.T_max, "spacing": self.spacing,
                "sampling": self.sampling, "n_shifts": int(self.points().size)}


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        rec = fn(*args, **kwargs)
        rec.runtime_seconds = time.perf_counter() - t0
        return rec

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    wrapper.__wrapped__ = fn
    return wrapper


def _spread(values, shifts):
    k = int(np.argmin(values))
    q = np.quantile(values, [0.1, 0.25, 0.5, 0.75, 0.9])
    return {"min": float(values[k]), "argmin_T": float(shifts[k]), "q10": float(q[0]),
            "q25": float(q[1]), "median": float(q[2]), "q75": float(q[3]), "q90": float(q[4]),
            "max": float(values.max()), "n_shifts": int(values.size)}


# ---------------------------------------------------------------------------
# phase averages and the lower bound through the realness of Z
# ---------------------------------------------------------------------------

def _sine_integral(A, B, C, T, cfg):
    def curve(u):
        return np.sin(theta_mod_2pi(T + u) + C)

    return integrate_abs(curve, A, B, cfg, height=T + B)


@_timed
def sine_phase_average(A, B, C, T, cfg=None):
    """Integral of |sin(theta(t + T) + C)| over [A, B] against 2(B - A)/pi.

    Passes when the deviation is within 4(B - A)/log T.
    """
    cfg = cfg or QuadratureConfig()
    if not A <= B:
        raise DomainError(f"need A <= B, got A={A}, B={B}")
    if not T >= 10:
        raise DomainError(f"need T >= 10, got {T}")
    value = _sine_integral(A, B, C, T, cfg) if B > A else 0.0
    ref = 2 * (B - A) / math.pi
    bound = 4 * (B - A) / math.log(T)
    dev = value - ref
    return ExperimentRecord(
        "lemma2", {"A": A, "B": B, "C": C, "T": T, "abs_tol": cfg.abs_tol},
        {"value": value, "deviation": dev, "deviation_times_log_T": dev * math.log(T)},
        {"value": ref, "deviation_bound": bound},
        "pass" if abs(dev) <= bound else "fail")


@_timed
def sine_phase_sweep(A, B, C_values, T_values, cfg=None, c_max=5.0):
    """``sine_phase_average`` over a T-sweep with a c/log T fit of |deviation|.

    The fit is least squares of |dev| against 1/log T through the origin.
    Passes when every |dev| <= 4(B - A)/log T and the fitted c <= c_max.
    """
    cfg = cfg or QuadratureConfig()
    if not A < B:
        raise DomainError(f"need A < B, got A={A}, B={B}")
    Ts = [float(T) for T in T_values]
    Cs = [float(C) for C in C_values]
    if not Ts or min(Ts) < 10:
        raise DomainError("T_values must be non-empty and all >= 10")
    ref = 2 * (B - A) / math.pi
    devs, xs, ok = [], [], True
    for T in Ts:
        for C in Cs:
            d = _sine_integral(A, B, C, T, cfg) - ref
            devs.append(d)
            xs.append(1 / math.log(T))
            ok &= abs(d) <= 4 * (B - A) / math.log(T)
    x = np.array(xs)
    y = np.abs(devs)
    c = float(x @ y / (x @ x))
    worst = float(np.max(y / x))
    return ExperimentRecord(
        "lemma2-sweep", {"A": A, "B": B, "C_values": Cs, "T_values": Ts, "abs_tol": cfg.abs_tol},
        {"deviations": devs, "fitted_c": c, "max_deviation_times_log_T": worst},
        {"value": ref, "c_max": c_max, "deviation_bounds": [4 * (B - A) * xi for xi in xs]},
        "pass" if ok and c <= c_max else "fail")


def _phase_curve_values(fu, t):
    """|f| sin(theta(t) + arg f) = Im(e^{i theta(t)} f), zeroed where |f| is negligible."""
    w = np.imag(np.exp(1j * theta_mod_2pi(t)) * fu)
    return np.where(np.abs(fu) <= PHASE_FLOOR, 0.0, w)


def phase_lower_bound(f: TargetFunction, seg: LineSegment, cfg=None):
    """Integral over [0, H] of |f(t)| |sin(theta(T + t) + arg f(t))|.

    Since exp(i theta) zeta(1/2 + it) is real, this bounds the L1 distance
    between f and G(T + t) zeta(1/2 + iT + it) from below for any real G.
    """
    cfg = cfg or QuadratureConfig()
    if seg.sigma != 0.5:
        raise DomainError("phase_lower_bound lives on the critical line (sigma = 1/2)")
    T = seg.t_start
    return integrate_abs(lambda u: _phase_curve_values(f(u), T + u), 0.0, seg.length, cfg,
                         height=T)


def phase_lower_bounds(f, shifts, H, cfg=None, threads=None):
    """``phase_lower_bound`` for every shift, batched."""
    cfg = cfg or QuadratureConfig()
    memo = {}

    def outer(ts, offsets):
        key = offsets.tobytes()
        if key not in memo:
            memo.clear()
            memo[key] = f(offsets)
        return _phase_curve_values(memo[key][None, :], ts[:, None] + offsets[None, :])

    def points(T, u):
        return _phase_curve_values(f(u), T + u)

    vals, errs, _ = window_abs_integrals(outer, points, shifts, H, cfg, real=True, threads=threads)
    return vals, errs


def _identity_shift(f, sigma):
    """T0 if f is the translate zeta(sigma + i(T0 + t)) itself, else None."""
    if f.kind == "builtin-zeta-translate" and not f.payload[2] and f.payload[0] == sigma:
        return f.payload[1]
    return None


@_timed
def nonuniversality_bound_run(f: TargetFunction, G: WeightFunction | None, seg_template: LineSegment,
                              grid: ShiftGrid, cfg=None, slack=DEFAULT_SLACK, threads=None):
    """Minimum over the grid of the L1 distance from f to G zeta translates on sigma = 1/2.

    Compared with (2/pi) * integral |f|: passes when the minimum is at least
    ``(1 - slack)`` times that and the phase lower bound sits below the
    distance (up to 2 abs_tol) at every shift.  f = 0, the identity case and
    complex G are reported as informational.
    """
    cfg = cfg or QuadratureConfig()
    G = G or WeightFunction.unit()
    if seg_template.sigma != 0.5:
        raise DomainError("the non-universality bound is for sigma = 1/2")
    H = seg_template.length
    shifts = grid.points()
    dist, derr = l1_translate_distances(f, 0.5, shifts, H, G, cfg, threads=threads)
    norm_f = integrate_abs(lambda u: f(u), 0.0, H, cfg)
    ref = TWO_OVER_PI * norm_f
    stats = _spread(dist, shifts)
    computed = dict(stats)
    computed["max_error_estimate"] = float(derr.max())
    computed["l1_norm_f"] = norm_f
    flags = []
    chain_ok = True
    if G.is_real():
        lower, _ = phase_lower_bounds(f, shifts, H, cfg, threads=threads)
        gap = dist - lower
        chain_ok = bool(np.all(gap >= -2 * cfg.abs_tol))
        k = int(np.argmin(dist))
        computed["phase_lower_bound_at_argmin"] = float(lower[k])
        computed["min_phase_lower_bound"] = float(lower.min())
        computed["min_chain_gap"] = float(gap.min())
        computed["chain_violations"] = int(np.sum(gap < -2 * cfg.abs_tol))
    else:
        flags.append("complex weight: the 2/pi bound is not asserted")
    computed["chain_holds"] = chain_ok
    T0 = _identity_shift(f, 0.5)
    identity = T0 is not None and grid.T_min <= T0 <= grid.T_max
    if identity:
        flags.append(f"identity case: f is the translate at T0 = {T0}")
    if f.is_zero():
        flags.append("f is identically zero")
    threshold = ref * (1 - slack)
    if flags:
        verdict = "informational"
    else:
        verdict = "pass" if stats["min"] >= threshold and chain_ok else "fail"
    return ExperimentRecord(
        "bound", {"target": f.label, "weight": G.label, "H": H, "grid": grid.as_dict(),
                  "slack": slack, "abs_tol": cfg.abs_tol},
        computed,
        {"two_over_pi_l1_norm": ref, "threshold": threshold},
        verdict, notes=flags)


# ---------------------------------------------------------------------------
# convexity parameters and the three-line inequality
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvexityParams:
    """Rectangle a <= sigma <= b, |t - t0| <= H and the constants of the convexity inequality.

    ``delta`` is set when the parameters come from ``lemma1_parameters``.
    """

    a: float
    b: float
    t0: float
    H: float
    D: float
    sigma0: float
    sigma1: float
    sigma2: float
    A: float
    C: float
    r: int
    M: float
    delta: float | None = None

    def __post_init__(self):
        if not self.a <= self.sigma0 < self.sigma1 < self.sigma2 <= self.b:
            raise DomainError("need a <= sigma0 < sigma1 < sigma2 <= b")
        if not 0 < 2 * self.D <= self.H * (1 + 1e-12):
            raise DomainError("need 0 < 2D <= H")
        if self.r < 1 or self.C <= 0 or self.A <= 0 or self.M <= 0:
            raise DomainError("need r >= 1, C > 0, A > 0, M > 0")

    def as_dict(self):
        return dataclasses.asdict(self)


def lemma1_parameters(sigma, delta, M, A, t0=0.0):
    """sigma0 = sigma, sigma1 = 2, sigma2 = 4 - sigma, D = min(delta/4, 2/3),
    C = 2 delta / e, r = ceil((A + 3) log M - log(delta) / 2) (at least 1)."""
    if not 0.5 <= sigma <= 1:
        raise DomainError(f"need 1/2 <= sigma <= 1, got {sigma}")
    if not delta > 0:
        raise DomainError(f"need delta > 0, got {delta}")
    if not M > 1:
        raise DomainError(f"need M > 1, got {M}")
    if not A > 0:
        raise DomainError(f"need A > 0, got {A}")
    D = min(delta / 4, 2 / 3)
    x = (A + 3) * math.log(M) - math.log(delta) / 2
    r = max(1, math.ceil(x - 1e-12 * max(1.0, abs(x))))
    return ConvexityParams(a=sigma, b=4 - sigma, t0=float(t0), H=2 * D, D=D, sigma0=sigma,
                           sigma1=2.0, sigma2=4 - sigma, A=float(A), C=2 * delta / math.e, r=r,
                           M=float(M), delta=float(delta))


def _check_rectangle(p):
    if p.a <= 1 <= p.b and abs(p.t0) <= p.H:
        raise InvalidRectangle("the rectangle contains the pole s = 1")


def certified_M(p, step=0.05, margin=1.05):
    """1.05 x the max of |zeta| over a 0.05-spaced grid on the rectangle of ``p``."""
    _check_rectangle(p)
    ns = max(2, math.ceil((p.b - p.a) / step) + 1)
    nt = max(2, math.ceil(2 * p.H / step) + 1)
    sig = np.linspace(p.a, p.b, ns)
    ts = np.linspace(p.t0 - p.H, p.t0 + p.H, nt)
    s = sig[:, None] + 1j * ts[None, :]
    return margin * float(np.max(np.abs(zeta_array(s.ravel()))))


def _line_integral(sigma, t0, half, cfg):
    acc = cfg.accuracy()
    return integrate_abs(lambda v: zeta_array(sigma + 1j * (t0 + v), acc), -half, half, cfg,
                         height=abs(t0) + half)


def _log(x):
    return math.log(x) if x > 0 else -math.inf


def _signed_log_diff(la, lb):
    """(sign, log|e^la - e^lb|)."""
    if la == lb:
        return 0, -math.inf
    hi, lo = max(la, lb), min(la, lb)
    mag = hi + math.log1p(-math.exp(lo - hi))
    return (1 if la > lb else -1), mag


@_timed
def convexity_check(params: ConvexityParams, cfg=None):
    """Both sides of the three-line convexity inequality for f = zeta.

    J(sigma1) = 2pi * integral over |alpha| <= D of |zeta(sigma1 + i(t0 + alpha))|,
    I(sigma_j) = integral over |v| <= 2D of |zeta(sigma_j + i(t0 + v))|.
    Every large quantity is carried as a logarithm.  If ``params.M`` is
    below the certified maximum it is replaced by it.
    """
    cfg = cfg or QuadratureConfig()
    p = params
    _check_rectangle(p)
    M_cert = certified_M(p)
    notes = []
    if p.M < M_cert:
        notes.append(f"M raised from {p.M:.6g} to the certified {M_cert:.6g}")
        p = dataclasses.replace(p, M=M_cert)
    J = 2 * math.pi * _line_integral(p.sigma1, p.t0, p.D, cfg)
    I0 = _line_integral(p.sigma0, p.t0, 2 * p.D, cfg)
    I2 = _line_integral(p.sigma2, p.t0, 2 * p.D, cfg)
    s0, s1, s2 = p.sigma0, p.sigma1, p.sigma2
    e_lo = (s2 - s1) / (s2 - s0)
    e_hi = (s1 - s0) / (s2 - s0)
    E = p.C * (s2 - s1) * (s1 - s0) / (s2 - s0)
    L0 = 1 + max(0.0, math.log(p.D / (s1 - s0)))
    L2 = 1 + max(0.0, math.log(p.D / (s2 - s1)))
    logM = math.log(p.M)
    log_lhs = math.log(2 * math.pi * J)
    first = (math.log(4) + e_lo * _log(I0 * L0)
             + e_hi * float(np.logaddexp(_log(I2 * L2), -p.A * logM)) + p.r * E)
    second = (math.log(4) + (p.A + 2) * logM + math.log(s2 - s1) + e_lo * math.log(L0)
              + p.r * (math.log(2 / (p.C * p.D)) + E))
    log_rhs = float(np.logaddexp(first, second))
    holds = log_lhs <= log_rhs
    computed = {"J_sigma1": J, "I_sigma0": I0, "I_sigma2": I2, "M_certified": M_cert,
                "M_used": p.M, "log_lhs": log_lhs, "log_rhs": log_rhs,
                "log_rhs_first_term": first, "log_rhs_second_term": second, "inequality_holds": holds}
    reference = {}
    checks = [holds]
    lemma_shape = (p.sigma1 == 2 and abs(p.sigma2 - (4 - p.sigma0)) < 1e-12 and p.sigma0 >= 0.5)
    if lemma_shape:
        s_first = (math.log(4) + 0.5 * (_log(I0) + float(np.logaddexp(_log(I2), -p.A * logM)))
                   + 3 * p.C * p.r / 8)
        s_second = math.log(6) + (p.A + 2) * logM + p.r * (math.log(2 / (p.C * p.D)) + 3 * p.C / 8)
        s_rhs = float(np.logaddexp(s_first, s_second))
        computed["log_simplified_rhs"] = s_rhs
        computed["simplified_holds"] = log_lhs <= s_rhs
        checks.append(log_lhs <= s_rhs)
        # divided form: (2pi J - 6 M^{A+2} (2/(CD))^r) e^{-3Cr/8} / (4 sqrt(I2 + M^-A)) <= sqrt(I0)
        sign, mag = _signed_log_diff(log_lhs, math.log(6) + (p.A + 2) * logM
                                     + p.r * math.log(2 / (p.C * p.D)))
        mag += -3 * p.C * p.r / 8 - math.log(4) - 0.5 * float(np.logaddexp(_log(I2), -p.A * logM))
        computed["divided_lhs_sign"] = sign
        computed["divided_lhs_log_abs"] = mag
        computed["sqrt_I_sigma0"] = math.sqrt(I0)
    if p.delta is not None:
        d = p.delta
        J_anchor = 12 * ZETA4 * d
        I2_anchor = 1.5 * math.sqrt(d)
        reference.update({"twelve_zeta4_delta": J_anchor, "three_halves_sqrt_delta": I2_anchor,
                          "sqrt_zeta_7_2_delta": math.sqrt(zeta(3.5).real * d),
                          "sqrt_zeta_sigma2_delta": math.sqrt(zeta(p.sigma2).real * d),
                          "zeta4_over_zeta2": ZETA4 / ZETA2})
        computed["two_pi_J"] = 2 * math.pi * J
        computed["sqrt_I_sigma2"] = math.sqrt(I2)
        computed["anchor_J_holds"] = 2 * math.pi * J >= J_anchor
        computed["anchor_I2_holds"] = math.sqrt(I2) < I2_anchor
        checks += [computed["anchor_J_holds"], computed["anchor_I2_holds"]]
        # closing chain: (2 sqrt(delta) - M^{A+2}/sqrt(delta) (2/(CD))^r) e^{-3Cr/4} <= sqrt(I0)
        sign, mag = _signed_log_diff(math.log(2 * math.sqrt(d)),
                                     (p.A + 2) * logM - 0.5 * math.log(d) + p.r * math.log(2 / (p.C * p.D)))
        computed["chain_lhs_sign"] = sign
        computed["chain_lhs_log_abs"] = mag - 3 * p.C * p.r / 4
        computed["chain_holds"] = sign <= 0 or computed["chain_lhs_log_abs"] <= 0.5 * _log(I0)
        reference["alternative_C_D_over_2e"] = p.D / (2 * math.e)
        reference["alternative_C_8delta_over_3e"] = 8 * d / (3 * math.e)
    inputs = params.as_dict()
    inputs["abs_tol"] = cfg.abs_tol
    return ExperimentRecord("convexity", inputs, computed, reference,
                            "pass" if all(checks) else "fail", notes=notes)


# ---------------------------------------------------------------------------
# left of the critical line
# ---------------------------------------------------------------------------

@_timed
def growth_exponent_fit(sigma, delta, T_points, cfg=None, block=64, threads=None):
    """Log-log slope of the short-interval mean against T, compared with 1/2 - sigma.

    At each T the mean is averaged over ``block`` consecutive windows
    [T + k delta, T + (k+1) delta]; a single window is dominated by where it
    happens to fall relative to the zeros.  The L1 distance to f = 1 is
    averaged the same way.
    """
    cfg = cfg or QuadratureConfig()
    if not 0 < sigma < 0.5:
        raise DomainError(f"need 0 < sigma < 1/2, got {sigma}")
    if not delta > 0:
        raise DomainError(f"need delta > 0, got {delta}")
    Ts = sorted(float(T) for T in T_points)
    if len(Ts) < 3 or Ts[0] <= 0 or Ts[-1] / Ts[0] < 100 * (1 - 1e-12):
        raise DomainError("T_points needs at least 3 positive values spanning 2 decades")
    if block < 1:
        raise DomainError(f"block must be >= 1, got {block}")
    one = TargetFunction.constant(1.0, delta)
    means, singles, dists = [], [], []
    for T in Ts:
        starts = T + delta * np.arange(block)
        m, _ = short_interval_means(sigma, starts, delta, cfg, threads=threads)
        d, _ = l1_translate_distances(one, sigma, starts, delta, cfg=cfg, threads=threads)
        means.append(float(np.mean(m)))
        singles.append(float(m[0]))
        dists.append(float(np.mean(d)))
    x = np.log(Ts)
    slope = float(np.polyfit(x, np.log(means), 1)[0])
    slope_single = float(np.polyfit(x, np.log(singles), 1)[0])
    ref = 0.5 - sigma
    monotone = bool(np.all(np.diff(dists) > 0))
    return ExperimentRecord(
        "growth", {"sigma": sigma, "delta": delta, "T_points": Ts, "block": block,
                   "abs_tol": cfg.abs_tol},
        {"slope": slope, "mean_integrals": means, "slope_single_window": slope_single,
         "single_window_integrals": singles, "l1_distance_to_one": dists,
         "distance_monotone": monotone},
        {"slope": ref, "tolerance": 0.1},
        "pass" if abs(slope - ref) <= 0.1 else "fail")


@_timed
def translate_search(f: TargetFunction, seg_template: LineSegment, grid: ShiftGrid, norm="L1",
                     cfg=None, threads=None):
    """Distribution over the grid of the distance from f to zeta translates on a line.

    With f = 0 and the L1 norm this is the search for small short-interval
    means.  Always informational.
    """
    cfg = cfg or QuadratureConfig()
    sigma, H = seg_template.sigma, seg_template.length
    shifts = grid.points()
    dist, _ = l1_translate_distances(f, sigma, shifts, H, cfg=cfg, norm=norm, threads=threads)
    computed = _spread(dist, shifts)
    in_strip = 0.5 < sigma < 1
    computed["in_universality_strip"] = in_strip
    notes = [] if in_strip else ["sigma outside (1/2, 1): universality is not expected"]
    return ExperimentRecord(
        "search", {"target": f.label, "sigma": sigma, "H": H, "norm": norm,
                   "grid": grid.as_dict(), "abs_tol": cfg.abs_tol},
        computed, {}, "informational", notes=notes)


@_timed
def density_measure(f: TargetFunction, seg_template: LineSegment, eps, T_max, sample_step, cfg=None,
                    scaled=False, threads=None):
    """Fraction of sampled shifts T in (0, T_max] with sup distance below eps.

    Shifts are the midpoints ``(k + 1/2) * sample_step``.  ``scaled=True``
    uses the threshold eps * T^(1/2 - sigma).  The fraction over
    T <= T_max / 10 comes from the same samples; the run passes when the
    fraction does not grow between the two ranges.
    """
    cfg = cfg or QuadratureConfig()
    sigma, H = seg_template.sigma, seg_template.length
    if not 0 < sigma < 0.5:
        raise DomainError(f"need 0 < sigma < 1/2, got {sigma}")
    if not 0 < sample_step <= H:
        raise DomainError(f"need 0 < sample_step <= H = {H}, got {sample_step}")
    if not eps >= 0:
        raise DomainError(f"need eps >= 0, got {eps}")
    n = int(round(T_max / sample_step))
    if n < 10:
        raise DomainError("T_max / sample_step must give at least 10 samples")
    shifts = (np.arange(n) + 0.5) * sample_step
    dist, _ = l1_translate_distances(f, sigma, shifts, H, cfg=cfg, norm="sup", threads=threads)
    thr = eps * shifts ** (0.5 - sigma) if scaled else np.full(n, float(eps))
    good = dist < thr
    early = shifts <= T_max / 10
    frac = float(np.mean(good))
    frac_early = float(np.mean(good[early]))
    return ExperimentRecord(
        "density", {"target": f.label, "sigma": sigma, "H": H, "eps": eps, "T_max": T_max,
                    "sample_step": sample_step, "scaled": scaled, "abs_tol": cfg.abs_tol},
        {"fraction": frac, "fraction_at_tenth": frac_early, "n_samples": n,
         "min_sup_distance": float(dist.min()), "median_sup_distance": float(np.median(dist))},
        {"density_exponent": (2 * sigma - 1) / (1 + sigma),
         "zero_density_exponent": 3 * (1 - sigma) / (2 - sigma)},
        "pass" if frac <= frac_early else "fail")


Z_MODES = ("Z", "absZ", "loglog-normalized-abs")


def _z_mode_values(mode, t, z, theta=None):
    if mode == "Z":
        return np.real(np.exp(1j * theta) * z)
    a = np.abs(z)
    if mode == "absZ":
        return a
    return a ** (1 / np.sqrt(np.log(np.log(t))))


@_timed
def z_universality_search(f: TargetFunction, H, grid: ShiftGrid, mode="Z", cfg=None, threads=None):
    """L1 distance from a real f to Z, |zeta| or |zeta|^(1/sqrt(log log t)) over the grid.

    Always informational.
    """
    cfg = cfg or QuadratureConfig()
    if mode not in Z_MODES:
        raise DomainError(f"mode must be one of {Z_MODES}, got {mode!r}")
    if abs(f.domain_length - H) > 1e-12 * max(1.0, H):
        raise DomainError(f"target is defined on [0, {f.domain_length}] but H = {H}")
    if not f.is_real_valued():
        raise DomainError("Z-type searches need a real-valued target")
    if mode != "Z" and not f.is_nonnegative():
        raise DomainError(f"mode {mode} needs a non-negative target")
    if mode == "loglog-normalized-abs" and grid.T_min < math.e ** 2:
        raise DomainError("loglog-normalized-abs needs T_min >= e^2")
    acc = cfg.accuracy()
    memo = {}

    def fu(u):
        key = u.tobytes()
        if key not in memo:
            memo.clear()
            memo[key] = np.real(f(u))
        return memo[key]

    # |zeta| = |Z| has kinks at the zeros of Z; the batch splits panels there
    kinked = mode != "Z"

    def outer(ts, offsets):
        t = ts[:, None] + offsets[None, :]
        z = zeta_translates(0.5, ts, offsets, acc)
        th = theta_mod_2pi(t)
        c = fu(offsets)[None, :] - _z_mode_values(mode, t, z, th)
        return (c, np.real(np.exp(1j * th) * z)) if kinked else c

    def points(T, u):
        t = T + u
        z = zeta_array(0.5 + 1j * t, acc)
        return np.real(f(u)) - _z_mode_values(mode, t, z, theta_mod_2pi(t))

    def z_of(T, u):
        return hardy_z_array(T + u, acc)[0]

    shifts = grid.points()
    dist, _, _ = window_abs_integrals(outer, points, shifts, H, cfg, real=True,
                                      kinks=z_of if kinked else None,
                                      cusps=mode == "loglog-normalized-abs", threads=threads)
    return ExperimentRecord(
        "explore-z", {"target": f.label, "H": H, "mode": mode, "grid": grid.as_dict(),
                      "abs_tol": cfg.abs_tol},
        _spread(dist, shifts), {}, "informational")
