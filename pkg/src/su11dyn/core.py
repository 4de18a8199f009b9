"""su(1,1) two-level algebra: Hamiltonians, Cayley-Klein propagators, density matrices.

Conventions used throughout the package:

* basis order is (|+>, |->) with sigma_z|+> = +|+>;
* a Hamiltonian is ``[[Omega, -omega], [conj(omega), -Omega]]`` with
  ``omega = |omega| exp(i phi_omega)``;
* a propagator is ``U = [[a, -b], [-conj(b), conj(a)]]`` with ``|a|^2 - |b|^2 = 1``.

All quantities are dimensionless (time in units of 1/|omega_0|).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .errors import DomainError, NormalizationError, SingularityError

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)

# su(1,1) generators in the 2x2 representation
K0 = SIGMA_Z / 2
K1 = -1j * SIGMA_Y / 2
K2 = 1j * SIGMA_X / 2

# metric operator: H^dagger = ETA H ETA^-1
ETA = SIGMA_Z.copy()

KET_PLUS = np.array([1, 0], dtype=complex)
KET_MINUS = np.array([0, 1], dtype=complex)

DET_TOL = 1e-10
DENSITY_TOL = 1e-12

ScalarFn = Callable[[float], float]


def constant(value: float) -> ScalarFn:
    """Return a callable t -> value that broadcasts over numpy arrays."""
    value = float(value)

    def fn(t):
        if np.ndim(t) == 0:
            return value
        return np.full(np.shape(t), value)

    fn.value = value
    return fn


_zero = constant(0.0)


@dataclass(frozen=True)
class Su11Hamiltonian:
    """Time-dependent su(1,1) Hamiltonian given by (Omega, |omega|, phi_omega)."""

    omega_big: ScalarFn
    omega_abs: ScalarFn
    phi_omega: ScalarFn
    phi_omega_dot: ScalarFn = _zero
    t_min: float = 0.0
    t_max: float = math.inf

    def matrix(self, t: float) -> np.ndarray:
        return assemble_hamiltonian(self, t)

    def off_diagonal(self, t: float) -> complex:
        """omega(t) = |omega| exp(i phi_omega)."""
        w = float(self.omega_abs(t))
        if w < 0:
            raise DomainError(f"|omega|({t}) = {w} is negative")
        return w * complex(math.cos(self.phi_omega(t)), math.sin(self.phi_omega(t)))


def assemble_hamiltonian(h: Su11Hamiltonian, t: float) -> np.ndarray:
    """Matrix ``[[Omega, -omega], [omega*, -Omega]]`` at time ``t``."""
    if not (h.t_min <= t <= h.t_max) or not math.isfinite(t):
        raise DomainError(f"t={t} outside [{h.t_min}, {h.t_max}]")
    big = float(h.omega_big(t))
    om = h.off_diagonal(t)
    return np.array([[big, -om], [om.conjugate(), -big]], dtype=complex)


def is_pseudo_hermitian(H: np.ndarray, atol: float = 0.0) -> bool:
    """True iff ETA H ETA^-1 == H^dagger (exact by default)."""
    lhs = ETA @ H @ ETA
    return bool(np.all(np.abs(lhs - H.conj().T) <= atol))


class SpectrumKind(str, Enum):
    REAL = "real"
    EXCEPTIONAL = "exceptional"
    COMPLEX = "complex"


def spectrum_kind(omega_big: float, omega_abs: float, rtol: float = 1e-12) -> SpectrumKind:
    """Classify the instantaneous eigenvalues +-sqrt(Omega^2 - |omega|^2).

    ``REAL`` in the quasi-Hermitian region |omega|^2 < Omega^2, ``COMPLEX`` for a
    complex-conjugate pair, ``EXCEPTIONAL`` at the degenerate boundary.
    """
    gap = omega_big**2 - omega_abs**2
    scale = max(omega_big**2, omega_abs**2, 1e-300)
    if abs(gap) <= rtol * scale:
        return SpectrumKind.EXCEPTIONAL
    return SpectrumKind.REAL if gap > 0 else SpectrumKind.COMPLEX


def eigenvalues(omega_big: float, omega_abs: float) -> tuple[complex, complex]:
    e = np.sqrt(complex(omega_big**2 - omega_abs**2))
    return e, -e


@dataclass(frozen=True)
class CayleyKlein:
    """Cayley-Klein pair (a, b) of an SU(1,1) propagator at time ``t``."""

    a: complex
    b: complex
    t: float = 0.0

    @property
    def det(self) -> float:
        return abs(self.a) ** 2 - abs(self.b) ** 2

    def matrix(self) -> np.ndarray:
        a, b = complex(self.a), complex(self.b)
        return np.array([[a, -b], [-b.conjugate(), a.conjugate()]], dtype=complex)

    @classmethod
    def from_matrix(cls, U: np.ndarray, t: float = 0.0) -> CayleyKlein:
        return cls(complex(U[0, 0]), complex(-U[0, 1]), t)

    def det_error(self) -> float:
        """|det - 1| scaled by max(1, |a|^2); round-off grows with |a|^2."""
        return abs(self.det - 1.0) / max(1.0, abs(self.a) ** 2)

    def is_valid(self, tol: float = DET_TOL) -> bool:
        return self.det_error() <= tol and abs(self.a) >= 1.0 - tol


@dataclass(frozen=True)
class DensityMatrix2:
    """2x2 Hermitian, unit-trace, positive semidefinite state."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (2, 2):
            raise DomainError(f"density matrix must be 2x2, got {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > DENSITY_TOL:
            raise DomainError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > DENSITY_TOL:
            raise DomainError(f"density matrix trace {np.trace(rho)} != 1")
        if np.min(np.linalg.eigvalsh(rho)) < -DENSITY_TOL:
            raise DomainError("density matrix is not positive semidefinite")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @classmethod
    def pure(cls, psi) -> DensityMatrix2:
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    def expectation(self, op: np.ndarray) -> float:
        return float(np.real(np.trace(self.rho @ op)))


RHO_MINUS = DensityMatrix2.pure(KET_MINUS)


def check_su11_membership(U: np.ndarray, tol: float = 1e-10) -> bool:
    """True iff sigma_z U^dagger sigma_z == U^-1 and det U == 1 within ``tol``."""
    U = np.asarray(U, dtype=complex)
    det = np.linalg.det(U)
    if abs(det) < 1e-300:
        raise SingularityError("U is singular")
    try:
        inv = np.linalg.inv(U)
    except np.linalg.LinAlgError as exc:
        raise SingularityError("U is singular") from exc
    lhs = SIGMA_Z @ U.conj().T @ SIGMA_Z
    return bool(np.max(np.abs(lhs - inv)) <= tol and abs(det - 1.0) <= tol)


def evolve_density(ck: CayleyKlein | np.ndarray, rho0: DensityMatrix2) -> DensityMatrix2:
    """Normalized non-unitary evolution U rho0 U^dagger / Tr{U rho0 U^dagger}."""
    U = ck.matrix() if isinstance(ck, CayleyKlein) else np.asarray(ck, dtype=complex)
    m = U @ rho0.rho @ U.conj().T
    tr = float(np.real(np.trace(m)))
    if not tr > 0:
        raise NormalizationError(f"Tr(U rho U^dagger) = {tr}")
    m = m / tr
    return DensityMatrix2(0.5 * (m + m.conj().T))


def transition_probability(ck: CayleyKlein) -> float:
    """Probability of |+> starting from |->: |b|^2 / (1 + 2|b|^2)."""
    b = abs(ck.b)
    if b > 1e150:
        return 0.5
    b2 = b * b
    if b2 < 1.0:
        return b2 / (1.0 + 2.0 * b2)
    # composed of monotone roundings, so P never decreases as |b| grows
    return 0.5 - 0.5 / (1.0 + 2.0 * b2)


def expectations(ck: CayleyKlein, phi_omega: float, theta: float, kappa: float) -> tuple[float, float]:
    """Closed-form <sigma_z> and <sigma_x> for rho(0) = |-><-|.

    ``sigma_x`` is the closed form sqrt(kappa^2/(1+kappa^2)) cos(phi_omega - Theta - pi/2).
    With the Cayley-Klein convention of this package it equals ``-Tr{rho sigma_x}``;
    use :func:`evolve_density` when the sign matters.
    """
    sigma_z = -1.0 / (abs(ck.a) ** 2 + abs(ck.b) ** 2)
    sigma_x = math.sqrt(kappa**2 / (1.0 + kappa**2)) * math.cos(phi_omega - theta - math.pi / 2)
    return sigma_z, sigma_x


@dataclass(frozen=True)
class PtModel:
    """Sink-source matrix [[r e^{-i theta}, gamma], [gamma, r e^{i theta}]]."""

    r: float
    theta: float
    gamma: ScalarFn

    def __post_init__(self):
        if self.r < 0:
            raise DomainError("r must be nonnegative")
        if not 0.0 < self.theta < math.pi:
            raise DomainError("theta must lie in (0, pi)")

    @property
    def phi_omega(self) -> float:
        # +pi/2 on (0, pi/2], -pi/2 on (pi/2, pi)
        return math.pi / 2 if self.theta <= math.pi / 2 else -math.pi / 2

    @property
    def omega_abs(self) -> float:
        return abs(self.r * math.sin(self.theta))

    def matrix(self, t: float) -> np.ndarray:
        g = float(self.gamma(t))
        return np.array(
            [[self.r * np.exp(-1j * self.theta), g], [g, self.r * np.exp(1j * self.theta)]],
            dtype=complex,
        )

    def hamiltonian(self) -> Su11Hamiltonian:
        """su(1,1) form: Omega = gamma, |omega| = |r sin theta|, phi_omega = +-pi/2.

        The constant diagonal part r cos(theta) is dropped.
        """
        return Su11Hamiltonian(
            omega_big=self.gamma,
            omega_abs=constant(self.omega_abs),
            phi_omega=constant(self.phi_omega),
        )
