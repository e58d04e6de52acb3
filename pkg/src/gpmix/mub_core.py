"""Mutually unbiased bases in prime dimension and the unitaries built from them.

Basis index ``alpha`` runs over 1..d+1 everywhere in the public API.  For
d = 2 the slots are the eigenbases of sigma_x, sigma_y, sigma_z (in that
order); for odd prime d the slots 1..d hold the quadratic-phase bases and
slot d+1 is the computational basis.  In both cases the computational
basis is the last slot.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConstructionFailure, IndexOutOfRange, NonPrimeDimension

ATOL = 1e-12


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def check_dim(d) -> int:
    if isinstance(d, bool) or int(d) != d:
        raise NonPrimeDimension(f"dimension must be an integer, got {d!r}")
    d = int(d)
    if not is_prime(d):
        raise NonPrimeDimension(f"dimension must be prime, got {d}")
    return d


@dataclass(frozen=True)
class MubFamily:
    """d+1 orthonormal bases of C^d.

    ``bases[a, k]`` is the k-th vector of basis slot a+1 (zero-based array
    axis, one-based slot numbering in the API).
    """

    d: int
    bases: np.ndarray  # shape (d+1, d, d)

    def vector(self, alpha: int, k: int) -> np.ndarray:
        _check_slot(self.d, alpha)
        return self.bases[alpha - 1, k]

    def projector(self, alpha: int, k: int) -> np.ndarray:
        v = self.vector(alpha, k)
        return np.outer(v, v.conj())

    def max_deviation(self) -> float:
        """Largest deviation of |<psi_k^a|psi_l^b>|^2 from its ideal MUB value."""
        return mub_deviation(self.bases)


@dataclass(frozen=True)
class UnitaryFamily:
    d: int
    U: np.ndarray  # shape (d+1, d, d)

    @property
    def omega(self) -> complex:
        return np.exp(2j * np.pi / self.d)

    def power(self, alpha: int, k: int) -> np.ndarray:
        """U_alpha^k."""
        _check_slot(self.d, alpha)
        return np.linalg.matrix_power(self.U[alpha - 1], k)


def _check_slot(d: int, alpha: int) -> None:
    if not (1 <= alpha <= d + 1):
        raise IndexOutOfRange(f"basis index must lie in 1..{d + 1}, got {alpha}")


def mub_deviation(bases: np.ndarray) -> float:
    n, d, _ = bases.shape
    # gram[a, k, b, l] = <psi_k^a | psi_l^b>
    gram = np.einsum("akj,blj->akbl", bases.conj(), bases)
    target = np.full((n, d, n, d), 1.0 / d)
    for a in range(n):
        target[a, :, a, :] = np.eye(d)
    return float(np.max(np.abs(np.abs(gram) ** 2 - target)))


def _pauli_bases() -> np.ndarray:
    s = 1 / np.sqrt(2)
    bx = np.array([[s, s], [s, -s]], dtype=complex)
    by = np.array([[s, 1j * s], [s, -1j * s]], dtype=complex)
    bz = np.eye(2, dtype=complex)
    return np.stack([bx, by, bz])


def _quadratic_bases(d: int) -> np.ndarray:
    j = np.arange(d)
    k = j[:, None]
    out = np.empty((d + 1, d, d), dtype=complex)
    for m in range(d):
        # integer exponent reduced mod d before the complex exponential
        phase = (m * j[None, :] ** 2 + k * j[None, :]) % d
        out[m] = np.exp(2j * np.pi * phase / d) / np.sqrt(d)
    out[d] = np.eye(d)
    return out


def build_mubs(d: int) -> MubFamily:
    """Complete set of d+1 MUBs for prime ``d``, verified numerically before return."""
    d = check_dim(d)
    bases = _pauli_bases() if d == 2 else _quadratic_bases(d)
    dev = mub_deviation(bases)
    if not dev <= ATOL:
        raise ConstructionFailure(f"MUB check failed for d={d}: deviation {dev:.3e}")
    return MubFamily(d=d, bases=bases)


def build_unitaries(m: MubFamily) -> UnitaryFamily:
    """U_alpha = sum_l omega^l |psi_l^alpha><psi_l^alpha|."""
    d = m.d
    w = np.exp(2j * np.pi * np.arange(d) / d)
    # columns of V are the basis vectors, so U = V diag(w) V^dagger
    U = np.stack([(b.T * w) @ b.conj() for b in m.bases])
    eye = np.eye(d)
    for a, u in enumerate(U, start=1):
        unit = np.max(np.abs(u @ u.conj().T - eye))
        cyc = np.max(np.abs(np.linalg.matrix_power(u, d) - eye))
        if unit > ATOL or cyc > ATOL:
            raise ConstructionFailure(
                f"U_{a} check failed for d={d}: unitarity {unit:.2e}, U^d {cyc:.2e}")
    return UnitaryFamily(d=d, U=U)


def unitary_family(d: int) -> UnitaryFamily:
    return build_unitaries(build_mubs(d))


def conjugation_map(u: UnitaryFamily, alpha: int, rho: np.ndarray) -> np.ndarray:
    """sum_{k=1}^{d-1} U_alpha^k rho (U_alpha^k)^dagger."""
    _check_slot(u.d, alpha)
    rho = np.asarray(rho, dtype=complex)
    Ua = u.U[alpha - 1]
    out = np.zeros_like(rho)
    Uk = np.eye(u.d, dtype=complex)
    for _ in range(1, u.d):
        Uk = Uk @ Ua
        out += Uk @ rho @ Uk.conj().T
    return out


def generator_block(u: UnitaryFamily, alpha: int, rho: np.ndarray) -> np.ndarray:
    """(1/d) [conjugation_map(alpha) - (d-1) id] applied to ``rho``."""
    rho = np.asarray(rho, dtype=complex)
    return (conjugation_map(u, alpha, rho) - (u.d - 1) * rho) / u.d
