"""Target functions f, weights G and the vertical-line windows they live on."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, UsageError
from .special import zeta_array

REAL_TOL = 1e-12


@dataclass(frozen=True)
class LineSegment:
    """The window ``sigma + i [t_start, t_start + length]``."""

    sigma: float
    t_start: float
    length: float

    def __post_init__(self):
        for name in ("sigma", "t_start", "length"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"LineSegment.{name} must be finite")
        if not self.length > 0:
            raise DomainError(f"LineSegment.length must be > 0, got {self.length}")
        if self.sigma == 1.0 and self.t_start < 2:
            raise DomainError("on sigma = 1 the window must start at t >= 2 (pole at s = 1)")

    @property
    def t_end(self):
        return self.t_start + self.length


def _pchip(t, values):
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=complex)
    re = PchipInterpolator(t, v.real, extrapolate=False)
    im = PchipInterpolator(t, v.imag, extrapolate=False)
    return re, im


def _check_grid(t, name):
    t = np.asarray(t, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise DomainError(f"{name}: need at least two samples")
    if not np.all(np.isfinite(t)):
        raise DomainError(f"{name}: sample abscissae must be finite")
    if np.any(np.diff(t) <= 0):
        raise DomainError(f"{name}: sample abscissae must be strictly increasing")
    return t


@dataclass(frozen=True)
class TargetFunction:
    """A complex function f on [0, H].

    ``kind`` is one of ``builtin-constant``, ``builtin-polynomial``,
    ``builtin-zeta-translate`` or ``sampled``.  Use the classmethod
    constructors rather than building payloads by hand.
    """

    kind: str
    payload: tuple
    domain_length: float
    label: str = ""
    _interp: tuple = field(default=None, repr=False, compare=False)

    KINDS = ("builtin-constant", "builtin-polynomial", "builtin-zeta-translate", "sampled")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise DomainError(f"unknown target kind {self.kind!r}")
        if not (math.isfinite(self.domain_length) and self.domain_length > 0):
            raise DomainError("target domain_length must be a positive number")
        if self.kind == "sampled" and self._interp is None:
            t, v = self.payload
            _check_grid(t, "sampled target")
            H = self.domain_length
            if abs(t[0]) > REAL_TOL * max(1.0, H) or abs(t[-1] - H) > 1e-9 * max(1.0, H):
                raise DomainError(f"sampled target must span [0, {H}], got [{t[0]}, {t[-1]}]")
            object.__setattr__(self, "_interp", _pchip(t, v))

    @classmethod
    def constant(cls, c, H):
        c = complex(c)
        return cls("builtin-constant", (c,), float(H), label=f"const:{_fmt(c)}")

    @classmethod
    def polynomial(cls, coefficients, H):
        coefs = tuple(complex(c) for c in coefficients)
        if not coefs:
            raise DomainError("polynomial target needs at least one coefficient")
        return cls("builtin-polynomial", coefs, float(H),
                   label="poly:" + ",".join(_fmt(c) for c in coefs))

    @classmethod
    def zeta_translate(cls, sigma, T0, H):
        """f(t) = zeta(sigma + i(T0 + t))."""
        return cls("builtin-zeta-translate", (float(sigma), float(T0), False), float(H),
                   label=f"zeta:{sigma!r},{T0!r}")

    @classmethod
    def abs_zeta(cls, T0, H):
        """f(t) = |zeta(1/2 + i(T0 + t))|."""
        return cls("builtin-zeta-translate", (0.5, float(T0), True), float(H),
                   label=f"abszeta:{T0!r}")

    @classmethod
    def sampled(cls, t, values, H=None, label="sampled"):
        t = tuple(float(x) for x in t)
        v = tuple(complex(x) for x in values)
        if len(t) != len(v):
            raise DomainError("sampled target: t and values differ in length")
        return cls("sampled", (t, v), float(t[-1] if H is None else H), label=label)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "builtin-constant":
            return np.full(u.shape, self.payload[0], dtype=complex)
        if self.kind == "builtin-polynomial":
            out = np.zeros(u.shape, dtype=complex)
            for c in reversed(self.payload):
                out = out * u + c
            return out
        if self.kind == "builtin-zeta-translate":
            sigma, T0, absolute = self.payload
            z = zeta_array(sigma + 1j * (T0 + u))
            return np.abs(z).astype(complex) if absolute else z
        re, im = self._interp
        # clamp round-off excursions just outside [0, H]
        uc = np.clip(u, self.payload[0][0], self.payload[0][-1])
        return re(uc) + 1j * im(uc)

    def eval_grid(self, n=257):
        return np.linspace(0.0, self.domain_length, n)

    def is_real_valued(self):
        if self.kind in ("builtin-constant", "builtin-polynomial"):
            return all(abs(c.imag) <= REAL_TOL for c in self.payload)
        if self.kind == "builtin-zeta-translate" and self.payload[2]:
            return True
        if self.kind == "sampled":
            return max(abs(v.imag) for v in self.payload[1]) <= REAL_TOL
        return float(np.max(np.abs(self(self.eval_grid()).imag))) <= REAL_TOL

    def is_nonnegative(self):
        if not self.is_real_valued():
            return False
        if self.kind == "sampled":
            return min(v.real for v in self.payload[1]) >= 0
        return float(np.min(self(self.eval_grid(1025)).real)) >= 0

    def is_zero(self):
        if self.kind in ("builtin-constant", "builtin-polynomial"):
            return all(c == 0 for c in self.payload)
        if self.kind == "sampled":
            return all(v == 0 for v in self.payload[1])
        return False

    def with_length(self, H):
        """Same function viewed on [0, H] (builtins only)."""
        if self.kind == "sampled":
            raise DomainError("cannot change the domain of a sampled target")
        return TargetFunction(self.kind, self.payload, float(H), label=self.label)


@dataclass(frozen=True)
class WeightFunction:
    """The real (or complex) weight G multiplying the zeta translate.

    Sampled weights are indexed by absolute height, so G(T + t) is looked
    up at ``T + t``.
    """

    kind: str = "unit"
    payload: tuple = ()
    label: str = "unit"
    _interp: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in ("unit", "sampled-real", "sampled-complex"):
            raise DomainError(f"unknown weight kind {self.kind!r}")
        if self.kind != "unit" and self._interp is None:
            t, v = self.payload
            _check_grid(t, "sampled weight")
            if self.kind == "sampled-real" and max(abs(complex(x).imag) for x in v) > REAL_TOL:
                raise DomainError("sampled-real weight has non-zero imaginary parts")
            object.__setattr__(self, "_interp", _pchip(t, v))

    @classmethod
    def unit(cls):
        return cls()

    @classmethod
    def sampled(cls, t, values, label="sampled"):
        v = tuple(complex(x) for x in values)
        kind = "sampled-real" if max(abs(x.imag) for x in v) <= REAL_TOL else "sampled-complex"
        return cls(kind, (tuple(float(x) for x in t), v), label=label)

    @property
    def is_unit(self):
        return self.kind == "unit"

    def is_real(self):
        return self.kind != "sampled-complex"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "unit":
            return np.ones(t.shape)
        lo, hi = self.payload[0][0], self.payload[0][-1]
        if np.any(t < lo - 1e-9) or np.any(t > hi + 1e-9):
            raise DomainError(f"weight sampled on [{lo}, {hi}] queried outside that range")
        re, im = self._interp
        tc = np.clip(t, lo, hi)
        if self.kind == "sampled-real":
            return re(tc)
        return re(tc) + 1j * im(tc)


def _fmt(c):
    c = complex(c)
    if c.imag == 0:
        return repr(c.real)
    return repr(c).strip("()")


def parse_target(text, H=None):
    """Build a target from ``const:<c>``, ``poly:<c0,c1,...>``,
    ``zeta:<sigma>,<T0>``, ``abszeta:<T0>`` or a CSV file path."""
    text = str(text).strip()
    head, _, rest = text.partition(":")
    try:
        if head == "const" and rest:
            return TargetFunction.constant(complex(rest.replace(" ", "")), _need_H(H, text))
        if head == "poly" and rest:
            coefs = [complex(c.strip()) for c in rest.split(",")]
            return TargetFunction.polynomial(coefs, _need_H(H, text))
        if head == "zeta" and rest:
            sigma, T0 = (float(x) for x in rest.split(","))
            return TargetFunction.zeta_translate(sigma, T0, _need_H(H, text))
        if head == "abszeta" and rest:
            return TargetFunction.abs_zeta(float(rest), _need_H(H, text))
    except ValueError as exc:
        raise UsageError(f"cannot parse target {text!r}: {exc}", flag="--target") from exc
    path = Path(text)
    if path.exists():
        t, v = read_samples(path)
        if H is not None and abs(float(H) - t[-1]) > 1e-9 * max(1.0, float(H)):
            raise DomainError(f"target file spans [0, {t[-1]}] but H = {H}")
        return TargetFunction.sampled(t, v, H=t[-1], label=str(path))
    raise UsageError(f"unknown target {text!r}", flag="--target")


def _need_H(H, text):
    if H is None:
        raise UsageError(f"target {text!r} needs --H", flag="--H")
    return float(H)


def parse_weight(text):
    text = str(text).strip()
    if text in ("", "unit", "1"):
        return WeightFunction.unit()
    path = Path(text)
    if not path.exists():
        raise UsageError(f"weight file {text!r} not found", flag="--weight")
    t, v = read_samples(path, start_at_zero=False)
    return WeightFunction.sampled(t, v, label=str(path))


def read_samples(path, start_at_zero=True):
    """Read a ``t,re,im`` CSV (header optional) with strictly increasing t."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                vals = [float(x) for x in row]
            except ValueError:
                if not rows:
                    continue  # header
                raise DomainError(f"{path}: non-numeric row {row!r}")
            if len(vals) == 2:
                vals.append(0.0)
            if len(vals) != 3:
                raise DomainError(f"{path}: expected t,re,im columns, got {row!r}")
            rows.append(vals)
    if len(rows) < 2:
        raise DomainError(f"{path}: need at least two samples")
    arr = np.array(rows)
    t = _check_grid(arr[:, 0], str(path))
    if start_at_zero and t[0] != 0.0:
        raise DomainError(f"{path}: samples must start at t = 0")
    return t, arr[:, 1] + 1j * arr[:, 2]


def write_samples(path, t, values):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "re", "im"])
        for ti, vi in zip(t, values):
            vi = complex(vi)
            w.writerow([repr(float(ti)), repr(vi.real), repr(vi.imag)])
