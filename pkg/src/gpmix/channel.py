"""Generalized Pauli channels in probability and eigenvalue form.

A channel on C^d (d prime) is

    Lambda[rho] = p_0 rho + 1/(d-1) sum_alpha p_alpha U_alpha-conjugation[rho]

with eigenvalues Lambda[U_alpha^k] = lambda_alpha U_alpha^k.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidDistribution, InvalidState, NonHermitianInput
from .mub_core import UnitaryFamily, check_dim, conjugation_map

CP_TOL = 1e-10
SIMPLEX_TOL = 1e-12


@dataclass(frozen=True)
class ChannelParams:
    """A channel stored in the form it was given.

    Exactly one of ``probabilities`` (length d+2: p_0..p_{d+1}) and
    ``eigenvalues`` (length d+1: lambda_1..lambda_{d+1}) is set.
    """

    d: int
    probabilities: Optional[np.ndarray] = None
    eigenvalues: Optional[np.ndarray] = None

    def __post_init__(self):
        check_dim(self.d)
        if (self.probabilities is None) == (self.eigenvalues is None):
            raise ValueError("give exactly one of probabilities / eigenvalues")
        if self.probabilities is not None:
            p = np.asarray(self.probabilities, dtype=float)
            _check_distribution(p, self.d)
            object.__setattr__(self, "probabilities", p)
        else:
            lam = np.asarray(self.eigenvalues, dtype=float)
            if lam.shape != (self.d + 1,):
                raise ValueError(f"expected {self.d + 1} eigenvalues, got shape {lam.shape}")
            object.__setattr__(self, "eigenvalues", lam)

    @classmethod
    def from_probabilities(cls, p, d: int) -> "ChannelParams":
        return cls(d=d, probabilities=p)

    @classmethod
    def from_eigenvalues(cls, lam, d: int) -> "ChannelParams":
        return cls(d=d, eigenvalues=lam)

    def as_eigenvalues(self) -> np.ndarray:
        if self.eigenvalues is not None:
            return self.eigenvalues
        return probabilities_to_eigenvalues(self.probabilities, self.d)

    def as_probabilities(self) -> np.ndarray:
        """Probability vector; may contain negative entries when the channel is not CP."""
        if self.probabilities is not None:
            return self.probabilities
        return eigenvalues_to_probabilities(self.eigenvalues, self.d)

    def cp_report(self) -> "CpReport":
        return fujiwara_algoet_check(self.as_eigenvalues(), self.d)


@dataclass(frozen=True)
class CpReport:
    is_cp: bool
    lower_slack: float
    upper_slack: float
    choi_min_eigenvalue: Optional[float] = None


def _check_distribution(p: np.ndarray, d: int) -> None:
    if p.shape != (d + 2,):
        raise InvalidDistribution(f"expected {d + 2} probabilities, got shape {p.shape}")
    if np.any(p < -SIMPLEX_TOL) or abs(p.sum() - 1.0) > SIMPLEX_TOL:
        raise InvalidDistribution(f"not a probability distribution: {p}")


def probabilities_to_eigenvalues(p, d: int) -> np.ndarray:
    """lambda_alpha = [d (p_alpha + p_0) - 1] / (d - 1), alpha = 1..d+1."""
    p = np.asarray(p, dtype=float)
    _check_distribution(p, d)
    return (d * (p[1:] + p[0]) - 1.0) / (d - 1)


def eigenvalues_to_probabilities(lam, d: int) -> np.ndarray:
    """Inverse of :func:`probabilities_to_eigenvalues`.

    Summing the forward relation over alpha gives
    sum(lambda) = (d^2 p_0 - 1)/(d - 1), which fixes p_0; each p_alpha then
    follows from its own relation.  Negative entries are returned as-is.
    """
    lam = np.asarray(lam, dtype=float)
    p0 = (1.0 + (d - 1) * lam.sum()) / d**2
    pa = ((d - 1) * lam + 1.0) / d - p0
    return np.concatenate([[p0], pa])


def fujiwara_algoet_check(lam, d: int) -> CpReport:
    lam = np.asarray(lam, dtype=float)
    total = lam.sum()
    lower = total + 1.0 / (d - 1)
    upper = 1.0 + d * lam.min() - total
    return CpReport(is_cp=bool(lower >= -CP_TOL and upper >= -CP_TOL),
                    lower_slack=float(lower), upper_slack=float(upper))


def _apply(p: np.ndarray, u: UnitaryFamily, rho: np.ndarray) -> np.ndarray:
    out = p[0] * rho
    for a in range(1, u.d + 2):
        if p[a] != 0.0:
            out = out + p[a] / (u.d - 1) * conjugation_map(u, a, rho)
    return out


def apply_channel(c: ChannelParams, u: UnitaryFamily, rho, validate: bool = True) -> np.ndarray:
    """Apply the channel to ``rho`` through its operator-sum form.

    With ``validate`` (the default) ``rho`` must be Hermitian with unit trace.
    Pass ``validate=False`` to act on arbitrary operators, e.g. U_alpha^k.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (u.d, u.d):
        raise InvalidState(f"expected a {u.d}x{u.d} matrix, got {rho.shape}")
    if validate:
        if np.max(np.abs(rho - rho.conj().T)) > 1e-10 or abs(np.trace(rho) - 1) > 1e-10:
            raise InvalidState("state must be Hermitian with unit trace")
    return _apply(c.as_probabilities(), u, rho)


def choi_matrix(c: ChannelParams, u: UnitaryFamily) -> np.ndarray:
    """sum_{ij} |i><j| (x) Lambda(|i><j|), i.e. d times the normalized Choi state."""
    d = u.d
    p = c.as_probabilities()
    C = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            E = np.zeros((d, d), dtype=complex)
            E[i, j] = 1.0
            C += np.kron(E, _apply(p, u, E))
    return C


def choi_psd_check(C, tol: float = CP_TOL) -> tuple[bool, float]:
    C = np.asarray(C)
    if np.max(np.abs(C - C.conj().T)) > tol:
        raise NonHermitianInput("Choi matrix is not Hermitian within tolerance")
    w = np.linalg.eigvalsh((C + C.conj().T) / 2)
    return bool(w[0] >= -tol), float(w[0])


def cp_report_with_choi(c: ChannelParams, u: UnitaryFamily) -> CpReport:
    rep = c.cp_report()
    _, wmin = choi_psd_check(choi_matrix(c, u))
    return CpReport(rep.is_cp, rep.lower_slack, rep.upper_slack, wmin)
