"""Scalar memory-kernel equation solver.

Solves

    y'(t) = c y(t) + int_0^t k(t - s) y(s) ds,    y(0) = 1,

where ``c`` is the coefficient of a Dirac delta in the kernel and ``k`` its
regular part.  The convolution is discretized with the trapezoidal rule and
time is advanced with a trapezoidal predictor-corrector (PECE), giving a
second-order method.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .errors import GridMismatch, StepTooLarge


@dataclass(frozen=True)
class TimeGrid:
    t_max: float
    h: float

    def __post_init__(self):
        if not self.t_max > 0 or not self.h > 0:
            raise ValueError("t_max and h must be positive")
        if self.h > self.t_max / 10 * (1 + 1e-12):
            raise StepTooLarge(f"step {self.h} exceeds t_max/10 = {self.t_max / 10}")

    @property
    def n(self) -> int:
        return int(round(self.t_max / self.h))

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n + 1) * self.h


@dataclass(frozen=True)
class Trajectory:
    grid: TimeGrid
    values: np.ndarray  # shape (n_slots, n + 1)

    @property
    def t(self) -> np.ndarray:
        return self.grid.nodes


def solve_volterra(kernel, grid: TimeGrid) -> Trajectory:
    """Solve for one kernel (anything with ``delta_coeff`` and vectorized ``regular``)."""
    return Trajectory(grid, _solve(kernel.delta_coeff, kernel.regular, grid)[None, :])


def solve_volterra_slots(kernels: Sequence, grid: TimeGrid) -> Trajectory:
    rows = [_solve(k.delta_coeff, k.regular, grid) for k in kernels]
    return Trajectory(grid, np.vstack(rows))


def _solve(c: float, regular: Callable, grid: TimeGrid) -> np.ndarray:
    if not math.isfinite(c):
        raise ValueError("delta coefficient must be finite")
    h, n = grid.h, grid.n
    K = np.asarray(regular(grid.nodes), dtype=float)
    if K.shape != (n + 1,):
        K = np.broadcast_to(K, (n + 1,)).copy()
    y = np.empty(n + 1)
    y[0] = 1.0
    F = c  # y'(0): the convolution over [0, 0] is empty
    half_k0 = 0.5 * h * K[0]
    for i in range(n):
        # history part of the trapezoid sum at t_{i+1}: nodes 0..i
        hist = h * (np.dot(K[i + 1:0:-1], y[:i + 1]) - 0.5 * K[i + 1] * y[0])
        y_pred = y[i] + h * F
        F_pred = c * y_pred + hist + half_k0 * y_pred
        y[i + 1] = y[i] + 0.5 * h * (F + F_pred)
        F = c * y[i + 1] + hist + half_k0 * y[i + 1]
    return y


ClosedForm = Callable[[np.ndarray], np.ndarray]


def compare_trajectories(a: Trajectory, b: Union[Trajectory, ClosedForm]) -> tuple[float, float]:
    """Max |a - b| over nodes and slots, and the time where it occurs."""
    t = a.t
    if isinstance(b, Trajectory):
        if b.grid != a.grid:
            raise GridMismatch("trajectories live on different grids")
        ref = b.values
    else:
        ref = np.asarray(b(t), dtype=float)
    ref = np.atleast_2d(ref)
    if ref.shape[-1] != t.size or ref.shape[0] not in (1, a.values.shape[0]):
        raise GridMismatch(f"reference shape {ref.shape} does not match {a.values.shape}")
    err = np.abs(a.values - ref)
    idx = np.unravel_index(int(np.argmax(err)), err.shape)
    return float(err[idx]), float(t[idx[1]])


@dataclass(frozen=True)
class ConvergenceResult:
    order: float
    errors: list[float]
    ratios: list[float]
    steps: list[float]


def convergence_order(kernel, t_max: float, h_list: Sequence[float],
                      exact: ClosedForm | None = None) -> ConvergenceResult:
    """Empirical global order from a sequence of halved steps.

    With ``exact`` the errors are measured against it directly.  Without it,
    successive solutions are differenced on the coarse nodes (Richardson), so
    ``errors[i]`` is max |y_{h_i} - y_{h_{i+1}}|.  The reported order is from
    the last ratio.
    """
    h_list = list(h_list)
    if len(h_list) < 3:
        raise ValueError("need at least three step sizes")
    for a, b in zip(h_list, h_list[1:]):
        if abs(a / b - 2.0) > 1e-9:
            raise ValueError("steps must halve successively")
    sols = [_solve(kernel.delta_coeff, kernel.regular, TimeGrid(t_max, h)) for h in h_list]
    if exact is not None:
        errors = [float(np.max(np.abs(y - np.asarray(exact(TimeGrid(t_max, h).nodes)))))
                  for y, h in zip(sols, h_list)]
    else:
        errors = [float(np.max(np.abs(coarse - fine[::2])))
                  for coarse, fine in zip(sols, sols[1:])]
    ratios = [e0 / e1 for e0, e1 in zip(errors, errors[1:])]
    return ConvergenceResult(math.log2(ratios[-1]), errors, ratios, h_list)
