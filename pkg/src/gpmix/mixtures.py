"""Scalar eigenvalue functions, convex mixtures of single-basis maps, singular points.

Each component map Lambda_alpha(t) has eigenvalue 1 on U_alpha^k and a shared
eigenvalue lambda(t) on every foreign U_beta^k.  Mixing the d+1 components with
weights x_alpha gives eigenvalues

    lambda_alpha(t) = x_alpha + (1 - x_alpha) lambda(t).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import bisect, minimize_scalar

from .errors import InvalidWeights, OutOfTableRange, SpecParseError
from .mub_core import check_dim

ROOT_TOL = 1e-9


def _out(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


class EigenFunction:
    """Base for lambda(t) families.  ``value`` and ``derivative`` accept scalars or arrays."""

    tag = "?"

    def value(self, t):
        raise NotImplementedError

    def derivative(self, t):
        raise NotImplementedError

    def __call__(self, t):
        return self.value(t)

    def first_root(self) -> Optional[float]:
        """Earliest t > 0 with lambda(t) = 0 when known in closed form, else None."""
        return None

    def is_singular(self) -> Optional[bool]:
        """Whether lambda(t) vanishes somewhere on [0, inf); None when unknown."""
        return None

    def check_range(self, d: int, t_max: float, h: Optional[float] = None) -> tuple[bool, float, float]:
        """Check -1/(d-1) <= lambda(t) <= 1 (within 1e-9) on a grid over [0, t_max].

        Returns (ok, min value, argmin time).
        """
        h = h or 1e-3 * t_max
        t = np.linspace(0.0, t_max, int(round(t_max / h)) + 1)
        v = np.asarray(self.value(t))
        i = int(np.argmin(v))
        ok = bool(v.min() >= -1.0 / (d - 1) - 1e-9 and v.max() <= 1.0 + 1e-9)
        return ok, float(v[i]), float(t[i])


@dataclass(frozen=True)
class Cos(EigenFunction):
    omega: float
    tag = "cos"

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")

    def value(self, t):
        return _out(np.cos(self.omega * np.asarray(t, dtype=float)))

    def derivative(self, t):
        return _out(-self.omega * np.sin(self.omega * np.asarray(t, dtype=float)))

    def first_root(self):
        return math.pi / (2 * self.omega)

    def is_singular(self):
        return True


@dataclass(frozen=True)
class ExpCos(EigenFunction):
    """lambda(t) = exp(-Z t) cos(omega t)."""

    Z: float
    omega: float
    tag = "expcos"

    def __post_init__(self):
        if not self.omega > 0 or self.Z < 0:
            raise ValueError("need omega > 0 and Z >= 0")

    def value(self, t):
        t = np.asarray(t, dtype=float)
        return _out(np.exp(-self.Z * t) * np.cos(self.omega * t))

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        wt = self.omega * t
        return _out(-np.exp(-self.Z * t) * (self.Z * np.cos(wt) + self.omega * np.sin(wt)))

    def first_root(self):
        return math.pi / (2 * self.omega)

    def is_singular(self):
        return True


@dataclass(frozen=True)
class SemigroupMix(EigenFunction):
    """lambda(t) = ((d+1) exp(-r t) - 1)/d; its uniform mixture is exp(-r t)."""

    r: float
    d: int
    tag = "semigroup-mix"

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("r must be positive")
        check_dim(self.d)

    def value(self, t):
        t = np.asarray(t, dtype=float)
        return _out(((self.d + 1) * np.exp(-self.r * t) - 1.0) / self.d)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        return _out(-self.r * (self.d + 1) * np.exp(-self.r * t) / self.d)

    def first_root(self):
        return math.log(self.d + 1) / self.r

    def is_singular(self):
        return True


@dataclass(frozen=True)
class Exp(EigenFunction):
    r: float
    tag = "exp"

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("r must be positive")

    def value(self, t):
        return _out(np.exp(-self.r * np.asarray(t, dtype=float)))

    def derivative(self, t):
        return _out(-self.r * np.exp(-self.r * np.asarray(t, dtype=float)))

    def is_singular(self):
        return False


class Table(EigenFunction):
    """Tabulated lambda(t) with a cubic spline; derivative taken from the spline."""

    tag = "table"

    def __init__(self, t, values, source: str = ""):
        t = np.asarray(t, dtype=float)
        values = np.asarray(values, dtype=float)
        if t.ndim != 1 or t.shape != values.shape or t.size < 4:
            raise ValueError("table needs matching 1-D t and value arrays with >= 4 samples")
        if t[0] != 0.0 or abs(values[0] - 1.0) > 1e-12:
            raise ValueError("table must start at t=0 with lambda(0)=1")
        self.t = t
        self.values = values
        self.source = source
        self._spline = CubicSpline(t, values)
        self._dspline = self._spline.derivative()

    @classmethod
    def from_csv(cls, path) -> "Table":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows:
            raise SpecParseError(f"{path}: empty table")
        try:
            float(rows[0][0])
        except ValueError:
            rows = rows[1:]
        else:
            raise SpecParseError(f"{path}: header row (t,lambda) required")
        try:
            data = np.array([[float(a), float(b)] for a, b in rows], dtype=float)
        except ValueError:
            raise SpecParseError(f"{path}: rows must be two numeric columns t,lambda") from None
        return cls(data[:, 0], data[:, 1], source=str(path))

    def _check(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < self.t[0]) or np.any(t > self.t[-1]):
            raise OutOfTableRange(f"t outside tabulated range [{self.t[0]}, {self.t[-1]}]")
        return t

    def value(self, t):
        return _out(self._spline(self._check(t)))

    def derivative(self, t):
        return _out(self._dspline(self._check(t)))

    def __repr__(self):
        return f"Table(n={self.t.size}, t_max={self.t[-1]}, source={self.source!r})"


def eval_lambda(f: EigenFunction, t):
    return f.value(t)


def eval_lambda_dot(f: EigenFunction, t):
    return f.derivative(t)


def lambda_to_p(lam, d: int):
    """p(t) of the component maps from their foreign-slot eigenvalue lambda(t)."""
    return (d - 1) * (1.0 - np.asarray(lam)) / d


def parse_eigenfunction(text: str, d: int) -> EigenFunction:
    """Parse ``cos:omega=1``, ``expcos:Z=0.2,omega=1``, ``semigroup-mix:r=1``,
    ``exp:r=1`` or ``table:<path>``."""
    family, _, rest = text.partition(":")
    family = family.strip().lower()
    if family == "table":
        if not rest:
            raise SpecParseError("table: needs a CSV path")
        return Table.from_csv(rest)
    params = {}
    for item in filter(None, rest.split(",")):
        key, eq, val = item.partition("=")
        if not eq:
            raise SpecParseError(f"bad parameter {item!r} in {text!r}")
        try:
            params[key.strip()] = float(Fraction(val.strip()))
        except (ValueError, ZeroDivisionError):
            raise SpecParseError(f"bad number {val!r} in {text!r}") from None
    want = {"cos": {"omega"}, "expcos": {"Z", "omega"}, "semigroup-mix": {"r"}, "exp": {"r"}}
    if family not in want:
        raise SpecParseError(f"unknown eigenfunction family {family!r}")
    if set(params) != want[family]:
        raise SpecParseError(f"{family} expects parameters {sorted(want[family])}, got {sorted(params)}")
    try:
        if family == "cos":
            return Cos(params["omega"])
        if family == "expcos":
            return ExpCos(params["Z"], params["omega"])
        if family == "semigroup-mix":
            return SemigroupMix(params["r"], d)
        return Exp(params["r"])
    except ValueError as exc:
        raise SpecParseError(str(exc)) from None


def parse_weights(text: str, tol: float = 1e-9) -> np.ndarray:
    """Parse ``1/3,1/3,1/3`` exactly; the sum must be 1 within ``tol`` (no renormalization)."""
    try:
        fr = [Fraction(s.strip()) for s in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise SpecParseError(f"cannot parse weights {text!r}") from None
    if any(x < 0 for x in fr):
        raise SpecParseError("weights must be non-negative")
    if abs(float(sum(fr)) - 1.0) > tol:
        raise SpecParseError(f"weights sum to {float(sum(fr))!r}, not 1")
    return np.array([float(x) for x in fr])


@dataclass(frozen=True)
class MixtureSpec:
    d: int
    weights: np.ndarray
    f: EigenFunction
    tol: float = field(default=1e-12, repr=False, compare=False)

    def __post_init__(self):
        check_dim(self.d)
        x = np.asarray(self.weights, dtype=float)
        if x.shape != (self.d + 1,):
            raise InvalidWeights(f"need {self.d + 1} weights, got {x.shape}")
        if np.any(x < 0) or abs(x.sum() - 1.0) > self.tol:
            raise InvalidWeights(f"weights must lie on the simplex: {x}")
        object.__setattr__(self, "weights", x)

    @classmethod
    def uniform(cls, d: int, f: EigenFunction) -> "MixtureSpec":
        return cls(d, np.full(d + 1, 1.0 / (d + 1)), f)

    def eigenvalues(self, t):
        return mixture_eigenvalues(self, t)


def mixture_eigenvalues(m: MixtureSpec, t):
    """lambda_alpha(t) = x_alpha + (1 - x_alpha) lambda(t); shape (d+1,) or (len(t), d+1)."""
    lam = np.asarray(m.f.value(t))
    x = m.weights
    return x + (1.0 - x) * lam[..., None]


def mixture_eigenvalue_derivatives(m: MixtureSpec, t):
    return (1.0 - m.weights) * np.asarray(m.f.derivative(t))[..., None]


class Threshold(NamedTuple):
    value: float
    forced_non_invertible: bool


def invertibility_threshold(weights) -> Threshold:
    """Lower bound lambda(t) must exceed for the mixture to stay invertible."""
    x = np.asarray(weights, dtype=float)
    xmin = float(x.min())
    if xmin <= 0.0:
        return Threshold(-0.0, True)
    return Threshold(-xmin / (1.0 - xmin), False)


def k_block_eigenvalues(k: int, lam: float, d: int) -> tuple[float, float]:
    """Eigenvalues for k equal weights 1/k: (slots 1..k, slots k+1..d+1)."""
    if not 1 <= k <= d + 1:
        raise ValueError(f"k must lie in 1..{d + 1}")
    return (1.0 + (k - 1) * lam) / k, lam


def _grid(t_max: float, h: Optional[float]) -> np.ndarray:
    if not t_max > 0:
        raise ValueError("window length must be positive")
    h = h or 1e-3 * t_max
    if not h > 0:
        raise ValueError("grid step must be positive")
    n = max(int(math.ceil(t_max / h - 1e-9)), 1)
    return np.linspace(0.0, t_max, n + 1)


def scalar_roots(fn, t_max: float, h: Optional[float] = None, tol: float = ROOT_TOL) -> list[float]:
    """Zeros of a vectorized scalar function on [0, t_max].

    Sign changes between grid nodes are bracketed and bisected; zeros that
    touch without crossing are picked up as local minima of |fn| below ``tol``.
    """
    t = _grid(t_max, h)
    v = np.asarray(fn(t), dtype=float)
    roots = []
    for i in np.flatnonzero(v == 0.0):
        roots.append(float(t[i]))
    s = np.sign(v)
    for i in np.flatnonzero(s[:-1] * s[1:] < 0):
        r = bisect(lambda x: float(fn(x)), t[i], t[i + 1], xtol=1e-15, maxiter=200)
        roots.append(float(r))
    a = np.abs(v)
    for i in range(1, len(t) - 1):
        if a[i] <= a[i - 1] and a[i] <= a[i + 1] and s[i - 1] == s[i + 1] != 0 and a[i] > 0:
            res = minimize_scalar(lambda x: abs(float(fn(x))), bounds=(t[i - 1], t[i + 1]),
                                  method="bounded", options={"xatol": 1e-13})
            if res.fun <= tol:
                roots.append(float(res.x))
    roots.sort()
    out = []
    for r in roots:
        if not out or r - out[-1] > 1e-9:
            out.append(r)
    return out


@dataclass
class SingularityReport:
    slot_roots: list[list[float]]
    component_roots: list[float]
    invertible: bool
    verdict: str
    threshold: float
    min_lambda: float
    shifts: list[list[float]]

    def to_dict(self) -> dict:
        return {
            "slot_roots": self.slot_roots,
            "component_roots": self.component_roots,
            "invertible": self.invertible,
            "verdict": self.verdict,
            "threshold": self.threshold,
            "min_lambda": self.min_lambda,
            "shifts": self.shifts,
        }


def find_singularities(m: MixtureSpec, t_max: float, h: Optional[float] = None) -> SingularityReport:
    """Locate zeros of every mixture eigenvalue on [0, t_max] and decide invertibility.

    ``shifts[alpha-1][n]`` is the n-th mixture root of that slot minus the
    n-th root of the component eigenvalue lambda(t), over the pairs present.
    """
    x = m.weights
    slot_roots = []
    for a in range(m.d + 1):
        xa = x[a]
        slot_roots.append(scalar_roots(lambda t, xa=xa: xa + (1 - xa) * np.asarray(m.f.value(t)), t_max, h))
    comp = scalar_roots(m.f.value, t_max, h)
    t = _grid(t_max, h)
    lam = np.asarray(m.f.value(t))
    thr = invertibility_threshold(x)
    any_root = any(slot_roots)
    if thr.forced_non_invertible and (any_root or comp or m.f.is_singular()):
        verdict, inv = "non-invertible (zero weight)", False
    elif any_root:
        verdict, inv = "non-invertible", False
    elif not thr.forced_non_invertible and lam.min() <= thr.value:
        # grid minimum at the threshold without a located root: treat as singular
        verdict, inv = "non-invertible", False
    else:
        verdict, inv = "invertible", True
    shifts = [[r - c for r, c in zip(roots, comp)] for roots in slot_roots]
    return SingularityReport(slot_roots, comp, inv, verdict, thr.value, float(lam.min()), shifts)
