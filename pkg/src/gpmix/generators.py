"""Time-local decoherence rates of component maps and their mixtures.

The component map with eigenvalue lambda(t) is generated by gamma(t) L_alpha
with gamma = -lambda'/lambda.  Mixture rates follow from

    gamma_alpha = -gamma (1 - x_alpha) / (1 + (e^Gamma - 1) x_alpha) + gamma_0,
    gamma_0     = (1/d) sum_beta gamma (1 - x_beta) / (1 + (e^Gamma - 1) x_beta),

with Gamma = int_0^t gamma = -ln lambda(t).  Multiplying through by
lambda(t) turns each fraction into -(1 - x_alpha) lambda'(t) / lambda_alpha(t),
which stays finite where lambda(t) = 0 as long as the mixture eigenvalue does
not vanish.  :func:`mixture_rates` evaluates the first form and
:func:`mixture_rates_simplified` the second.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from .errors import ComponentSingular, SingularRateOnGrid
from .mixtures import EigenFunction, MixtureSpec, Table, invertibility_threshold, scalar_roots
from .volterra import TimeGrid, Trajectory

ZERO_TOL = 1e-14


def component_rate(f: EigenFunction, t):
    """gamma(t) = -lambda'(t)/lambda(t); +-inf where |lambda| < 1e-14."""
    lam = np.asarray(f.value(t), dtype=float)
    dlam = np.asarray(f.derivative(t), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -dlam / lam
    small = np.abs(lam) < ZERO_TOL
    if np.any(small):
        sign = np.where(lam == 0, -np.sign(dlam), -np.sign(dlam) * np.sign(lam))
        out = np.where(small, np.copysign(np.inf, np.where(sign == 0, 1.0, sign)), out)
    return float(out) if out.ndim == 0 else out


def component_gamma_integral(f: EigenFunction, t: float) -> float:
    """Gamma(t) = int_0^t gamma; -ln lambda(t) in closed form, quadrature for tables."""
    _require_invertible(f, t)
    if isinstance(f, Table):
        val, _ = quad(lambda s: component_rate(f, s), 0.0, t, epsabs=1e-10, epsrel=1e-10, limit=200)
        return float(val)
    return float(-math.log(f.value(t)))


def _require_invertible(f: EigenFunction, t: float) -> None:
    root = f.first_root()
    if root is not None:
        if t >= root:
            raise ComponentSingular(f"component eigenvalue vanishes at t={root:.12g} <= {t}")
        return
    if t > 0:
        h = min(1e-3 * t, 1e-2)
        grid = np.linspace(0.0, t, max(int(math.ceil(t / h)), 2) + 1)
        lam = np.asarray(f.value(grid))
        if lam.min() <= 0.0 or scalar_roots(f.value, t, h):
            raise ComponentSingular(f"component eigenvalue reaches zero before t={t}")


def mixture_rates(m: MixtureSpec, t: float) -> np.ndarray:
    """Rates gamma_1..gamma_{d+1} of the mixture, through gamma(t) and Gamma(t).

    Only defined while the component stays invertible on [0, t].
    """
    G = component_gamma_integral(m.f, t)
    g = component_rate(m.f, t)
    x = m.weights
    frac = g * (1.0 - x) / (1.0 + math.expm1(G) * x)
    g0 = frac.sum() / m.d
    return -frac + g0


def mixture_rates_simplified(m: MixtureSpec, t):
    """Same rates with the removable 0/0 at lambda(t) = 0 cancelled.

    Returns shape (d+1,) for scalar t, (len(t), d+1) otherwise.  Slots whose
    mixture eigenvalue vanishes make gamma_0 infinite (nan if lambda' also
    vanishes); slots sharing that weight can stay finite since their
    contributions cancel.
    """
    x = m.weights
    lam_a = x + (1.0 - x) * np.asarray(m.f.value(t))[..., None]
    num = -(1.0 - x) * np.asarray(m.f.derivative(t))[..., None]
    with np.errstate(divide="ignore", invalid="ignore"):
        q = num / lam_a
        q = np.where(np.abs(lam_a) < ZERO_TOL,
                     np.where(num == 0, np.nan, np.copysign(np.inf, num * np.where(lam_a == 0, 1.0, lam_a))),
                     q)
        g0 = q.sum(axis=-1, keepdims=True) / m.d
        out = -q + g0
        bad = ~np.isfinite(out)
        if np.any(bad):
            out = np.where(bad, _grouped_rates(q, x, m.d), out)
        return out


def _grouped_rates(q, x, d):
    """gamma_alpha = (1/d)[sum_beta q_beta - d q_alpha] with equal-weight slots merged.

    Slots sharing a weight share q, so their infinities cancel exactly; terms
    with a zero coefficient are dropped instead of producing 0 * inf.
    """
    squeeze = np.ndim(q) == 1
    q = np.atleast_2d(q)
    groups = {}
    for a, xa in enumerate(x):
        groups.setdefault(float(xa), []).append(a)
    out = np.zeros_like(q)
    for a, xa in enumerate(x):
        total = np.zeros(q.shape[0])
        for xb, members in groups.items():
            coef = len(members) - (d if xb == float(xa) else 0)
            if coef:
                total = total + coef * q[:, members[0]]
        out[:, a] = total / d
    return out[0] if squeeze else out


def k_block_rates(k: int, gamma: float, Gamma: float, d: int) -> tuple[float, float]:
    """Rates for k equal weights 1/k: (slots 1..k, slots k+1..d+1)."""
    if not 1 <= k <= d + 1:
        raise ValueError(f"k must lie in 1..{d + 1}")
    e = math.exp(-Gamma)
    den = 1.0 + (k - 1) * e
    shared = gamma / d * (d - (k - 1) * (1.0 - e)) / den
    passthrough = -gamma / d * (k - 1) * (1.0 - e) / den
    return shared, passthrough


@dataclass
class RateProfile:
    """Per-slot rates gamma_alpha(t) as a vectorized function of t.

    ``rates(t)`` returns shape (d+1,) for scalar t and (len(t), d+1) for arrays.
    """

    d: int
    rates: Callable
    component: Optional[EigenFunction] = field(default=None, repr=False)

    @classmethod
    def from_mixture(cls, m: MixtureSpec) -> "RateProfile":
        return cls(m.d, lambda t: mixture_rates_simplified(m, t), m.f)

    @classmethod
    def single_slot(cls, f: EigenFunction, d: int, alpha: int = 1) -> "RateProfile":
        """gamma(t) L_alpha: the generator of one component map."""
        def rates(t):
            g = np.asarray(component_rate(f, t), dtype=float)
            out = np.zeros(g.shape + (d + 1,))
            out[..., alpha - 1] = g
            return out
        return cls(d, rates, f)

    @classmethod
    def constant(cls, gammas) -> "RateProfile":
        g = np.asarray(gammas, dtype=float)
        return cls(g.size - 1, lambda t: np.broadcast_to(g, np.shape(t) + g.shape).copy())

    def gamma0(self, t):
        return np.asarray(self.rates(t)).sum(axis=-1)

    def component_rate(self, t):
        if self.component is None:
            raise ValueError("profile has no component eigenfunction")
        return component_rate(self.component, t)

    def Gamma(self, t: float) -> float:
        if self.component is None:
            raise ValueError("profile has no component eigenfunction")
        return component_gamma_integral(self.component, t)

    def Gamma_alpha(self, t: float) -> np.ndarray:
        """int_0^t gamma_alpha, by adaptive quadrature per slot."""
        return np.array([quad(lambda s, a=a: float(np.asarray(self.rates(s))[a]), 0.0, t,
                              epsabs=1e-10, epsrel=1e-10, limit=200)[0]
                         for a in range(self.d + 1)])


def propagate_timelocal(profile: RateProfile, grid: TimeGrid) -> Trajectory:
    """Integrate lambda_alpha' = (gamma_alpha - gamma_0) lambda_alpha with classical RK4.

    The equation is linear and diagonal, so each RK4 step is a per-slot
    growth factor built from the rates at t_n, t_n + h/2 and t_n + h.
    """
    h, n = grid.h, grid.n
    half = np.arange(2 * n + 1) * (h / 2)
    r = np.asarray(profile.rates(half), dtype=float)
    if not np.all(np.isfinite(r)):
        bad = half[np.flatnonzero(~np.all(np.isfinite(r), axis=-1))[0]]
        raise SingularRateOnGrid(f"rates not finite at t={bad:.12g}")
    a = r - r.sum(axis=-1, keepdims=True)
    a0, am, a1 = a[0:-1:2], a[1::2], a[2::2]
    k1 = a0
    k2 = am * (1 + h / 2 * k1)
    k3 = am * (1 + h / 2 * k2)
    k4 = a1 * (1 + h * k3)
    growth = 1 + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    vals = np.vstack([np.ones(profile.d + 1), np.cumprod(growth, axis=0)])
    return Trajectory(grid, vals.T)


@dataclass
class RegularityVerdict:
    kind: str  # "regular", "singular", "indeterminate"
    singular_at: list[float]
    indeterminate_at: list[float]
    component_singular_at: list[float]
    forced_non_invertible: bool

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "singular_at": self.singular_at,
            "indeterminate_at": self.indeterminate_at,
            "component_singular_at": self.component_singular_at,
            "forced_non_invertible": self.forced_non_invertible,
        }


def regularity_scan(m: MixtureSpec, t_max: float, h: Optional[float] = None) -> RegularityVerdict:
    """Classify where the mixture generator blows up on [0, t_max].

    A zero of lambda_alpha(t) with lambda'(t) != 0 makes the rates infinite
    (singular).  A zero where lambda'(t) also vanishes is a 0/0 (indeterminate).
    Zeros of the component lambda(t) alone are removable in the simplified
    form and only reported in ``component_singular_at``.
    """
    x = m.weights
    singular, indeterminate = set(), set()
    for a in range(m.d + 1):
        xa = x[a]
        roots = scalar_roots(lambda t, xa=xa: xa + (1 - xa) * np.asarray(m.f.value(t)), t_max, h)
        for t in roots:
            num = (1 - xa) * float(m.f.derivative(t))
            (indeterminate if abs(num) < 1e-9 else singular).add(t)
    singular_at = _merge(singular)
    indeterminate_at = [t for t in _merge(indeterminate) if all(abs(t - s) > 1e-9 for s in singular_at)]
    kind = "singular" if singular_at else ("indeterminate" if indeterminate_at else "regular")
    return RegularityVerdict(kind, singular_at, indeterminate_at,
                             scalar_roots(m.f.value, t_max, h),
                             invertibility_threshold(x).forced_non_invertible)


def _merge(ts) -> list[float]:
    out = []
    for t in sorted(ts):
        if not out or t - out[-1] > 1e-9:
            out.append(t)
    return out
