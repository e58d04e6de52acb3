"""Memory-kernel eigenvalues for component maps and their mixtures.

A kernel eigenvalue is ``kappa(t) = c delta(t) + kappa_reg(t)``; the delta
part is kept as the coefficient ``c``.  With lambda(t) = 1 - L(t), L' = ell,
the kernel of the mixture slot with weight x has Laplace transform

    kappa_x(s) = -s (1 - x) ell(s) / (1 - (1 - x) ell(s)),

and the closed forms below are its inverse transforms for the catalog
families.  The x -> 0 limit gives the component kernel.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import UnsupportedFamily
from .mixtures import Cos, EigenFunction, Exp, ExpCos, SemigroupMix

LEGIT_TOL = 1e-9


@dataclass(frozen=True)
class Kernel:
    delta_coeff: float
    regular: Callable[[np.ndarray], np.ndarray]
    slot: Optional[int] = None
    label: str = ""

    def __call__(self, t):
        """Regular part only; the delta part is ``delta_coeff``."""
        return self.regular(t)


@dataclass(frozen=True)
class EllFunction:
    """ell(t) together with its running integral L(t) = int_0^t ell."""

    ell: Callable
    integral: Callable
    tag: str = ""

    def __call__(self, t):
        return self.ell(t)


def ell_from_lambda(f: EigenFunction) -> EllFunction:
    """ell = -lambda', L = 1 - lambda."""
    return EllFunction(ell=lambda t: -np.asarray(f.derivative(t)),
                       integral=lambda t: 1.0 - np.asarray(f.value(t)),
                       tag=f.tag)


@dataclass(frozen=True)
class Legitimacy:
    legitimate: bool
    worst_slack: float
    worst_time: float
    failed: tuple[str, ...] = ()


def _grid(t_max, h):
    h = h or 1e-3 * t_max
    return np.linspace(0.0, t_max, int(math.ceil(t_max / h - 1e-9)) + 1)


def component_legitimacy(ell: EllFunction, d: int, t_max: float, h: Optional[float] = None) -> Legitimacy:
    """0 <= L(t) <= d/(d-1) on the grid."""
    t = _grid(t_max, h)
    L = np.asarray(ell.integral(t), dtype=float)
    lower = L
    upper = d / (d - 1) - L
    slack = np.minimum(lower, upper)
    i = int(np.argmin(slack))
    failed = tuple(name for name, s in (("lower", lower), ("upper", upper)) if s.min() < -LEGIT_TOL)
    return Legitimacy(not failed, float(slack[i]), float(t[i]), failed)


def mixture_legitimacy(ell: EllFunction, weights, d: int, t_max: float,
                       h: Optional[float] = None) -> Legitimacy:
    """Check the three admissibility conditions for L_alpha = (1 - x_alpha) L.

    (i)   L_alpha >= 0
    (ii)  sum_beta L_beta <= d^2/(d-1)
    (iii) sum_beta L_beta >= d L_alpha
    """
    x = np.asarray(weights, dtype=float)
    t = _grid(t_max, h)
    L = np.asarray(ell.integral(t), dtype=float)
    La = (1.0 - x)[:, None] * L[None, :]
    total = La.sum(axis=0)
    s1 = La.min(axis=0)
    s2 = d**2 / (d - 1) - total
    s3 = (total[None, :] - d * La).min(axis=0)
    slack = np.minimum(np.minimum(s1, s2), s3)
    i = int(np.argmin(slack))
    failed = tuple(name for name, s in (("i", s1), ("ii", s2), ("iii", s3)) if s.min() < -LEGIT_TOL)
    return Legitimacy(not failed, float(slack[i]), float(t[i]), failed)


def oscillation_condition(x: float, Z: float, omega: float) -> bool:
    """Whether the regular part of the ExpCos mixture kernel oscillates."""
    return x / (1.0 - x) ** 2 > (Z / (2.0 * omega)) ** 2


def _expcos_regular(x: float, Z: float, w: float):
    P2 = 4 * w**2 * x - Z**2 * (1 - x) ** 2
    P = np.sqrt(complex(P2))
    A = Z * P2 + (1 - x) * Z * (w**2 + Z**2)
    B_over_P = w**2 - x * Z**2

    def regular(t):
        t = np.asarray(t, dtype=float)
        # sin(P t/2)/P written via sinc so P -> 0 (trig/hyperbolic switch) is smooth
        sin_over_P = (t / 2) * np.sinc(P * t / (2 * np.pi))
        val = np.exp(-Z * (1 + x) * t / 2) * (-A * sin_over_P + B_over_P * np.cos(P * t / 2))
        val = np.asarray(val)
        imag = np.max(np.abs(val.imag)) if val.size else 0.0
        if imag > 1e-10 * max(1.0, float(np.max(np.abs(val.real)))):
            raise ArithmeticError(f"ExpCos kernel left imaginary residue {imag:.2e}")
        return -(1 - x) * val.real

    return regular


def slot_kernel(f: EigenFunction, x: float, slot: Optional[int] = None) -> Kernel:
    """Closed-form kernel of the mixture eigenvalue x + (1 - x) lambda(t)."""
    if isinstance(f, Cos):
        w = f.omega
        c = 0.0
        regular = lambda t: -w**2 * (1 - x) * np.cos(math.sqrt(x) * w * np.asarray(t, dtype=float))
    elif isinstance(f, ExpCos):
        c = -(1 - x) * f.Z
        regular = _expcos_regular(x, f.Z, f.omega)
    elif isinstance(f, SemigroupMix):
        r, d = f.r, f.d
        pref = -(r / d) * (d + 1) * (1 - x)
        S = (r / d) * (1 - (d + 1) * x)
        c = pref
        regular = lambda t: pref * S * np.exp(S * np.asarray(t, dtype=float))
    elif isinstance(f, Exp):
        r = f.r
        c = -(1 - x) * r
        regular = lambda t: (1 - x) * x * r**2 * np.exp(-x * r * np.asarray(t, dtype=float))
    else:
        raise UnsupportedFamily(f"no closed-form kernel for {type(f).__name__}")
    return Kernel(float(c), regular, slot, f"{f.tag}, x={x:g}")


def component_kernel_analytic(f: EigenFunction) -> Kernel:
    """Kernel eigenvalue of a single component map on its foreign slots."""
    return slot_kernel(f, 0.0)


def mixture_kernel_analytic(f: EigenFunction, weights) -> list[Kernel]:
    return [slot_kernel(f, float(x), a) for a, x in enumerate(np.asarray(weights, dtype=float), start=1)]


def slot_solution(f: EigenFunction, x: float):
    """Closed-form eigenvalue x + (1 - x) lambda(t) that the slot kernel must reproduce."""
    return lambda t: x + (1 - x) * np.asarray(f.value(t))
