"""Physical front ends: the sink-source two-box model and two PT-coupled waveguides.

The waveguide equation i dE/dz = M(z) E with M = [[i eps, -gamma], [-gamma, -i eps]]
is brought to the su(1,1) form by the rotation R = exp(-i pi/4 sigma_y), which maps
sigma_z -> sigma_x, sigma_x -> -sigma_z, sigma_y -> sigma_y. In the rotated frame
Omega = gamma(z), |omega| = eps and phi_omega = -pi/2; z plays the role of time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .closed_forms import TAU_COUPLING, Example1Model, _check_convention
from .core import (
    RHO_MINUS,
    SIGMA_Y,
    CayleyKlein,
    PtModel,
    Su11Hamiltonian,
    constant,
    evolve_density,
    transition_probability,
)
from .errors import DegenerateCouplingError, DomainError
from .oracle import integrate_schrodinger
from .solver import SolvableModel

ROTATION = (np.eye(2) - 1j * SIGMA_Y) / math.sqrt(2.0)


def coupling_schedule(w: float, convention: str = TAU_COUPLING):
    """gamma(t) for constant |omega| = w, in the tau form or the exactly solvable kappa form."""
    _check_convention(convention)

    def gamma(t):
        tau = w * np.asarray(t, dtype=float)
        if convention == TAU_COUPLING:
            return 0.5 * w * (2.0 + 1.0 / (1.0 + tau * tau))
        return w * (1.0 + 1.0 / (1.0 + 4.0 * tau * tau))

    return gamma


def sink_source_model(r: float, theta: float, t_max: float = 20.0,
                      convention: str = TAU_COUPLING) -> tuple[PtModel, SolvableModel]:
    """PT sink-source model with |omega| = |r sin theta| and the arctan schedule attached.

    phi_omega = +pi/2 for 0 < theta <= pi/2 and -pi/2 for pi/2 < theta < pi.
    """
    if not r > 0:
        raise DomainError("r must be positive")
    if not 0.0 < theta < math.pi:
        raise DomainError("theta must lie in (0, pi)")
    w = abs(r * math.sin(theta))
    if w < 1e-15:
        raise DegenerateCouplingError("sin(theta) = 0: no PT coupling")
    pt = PtModel(r, theta, coupling_schedule(w, convention))
    model = Example1Model(w, pt.phi_omega).solvable_model(t_max)
    return pt, model


@dataclass(frozen=True)
class WaveguideParams:
    epsilon: float
    z_max: float
    initial_fields: tuple[complex, complex] = (1.0, 0.0)
    convention: str = TAU_COUPLING

    def __post_init__(self):
        if not self.epsilon > 0:
            raise DomainError("epsilon must be positive")
        if not self.z_max > 0:
            raise DomainError("z_max must be positive")
        if all(abs(e) == 0 for e in self.initial_fields):
            raise DomainError("initial fields must not both vanish")
        _check_convention(self.convention)


def waveguide_coupling(epsilon: float, z, convention: str = TAU_COUPLING):
    """gamma(eps, z): tau form (eps/2)[2 + 1/(1 + (eps z)^2)] or kappa form eps[1 + 1/(1 + (2 eps z)^2)]."""
    if not epsilon > 0:
        raise DomainError("epsilon must be positive")
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise DomainError("z must be nonnegative")
    out = coupling_schedule(epsilon, convention)(z)
    return float(out) if np.ndim(out) == 0 else out


def waveguide_matrix(epsilon: float, gamma: float) -> np.ndarray:
    return np.array([[1j * epsilon, -gamma], [-gamma, -1j * epsilon]], dtype=complex)


def waveguide_transform(p: WaveguideParams) -> Su11Hamiltonian:
    """su(1,1) form of the waveguide equation in the frame rotated by :data:`ROTATION`."""
    return Su11Hamiltonian(
        omega_big=coupling_schedule(p.epsilon, p.convention),
        omega_abs=constant(p.epsilon),
        phi_omega=constant(-math.pi / 2),
        t_max=p.z_max,
    )


@dataclass(frozen=True)
class FieldTrajectory:
    z: np.ndarray
    E1: np.ndarray
    E2: np.ndarray
    transfer: np.ndarray          # |b|^2 / (1 + 2|b|^2)
    transfer_density: np.ndarray  # rho_11 of the normalized state started in |->
    power_fraction: np.ndarray    # |E2|^2 / (|E1|^2 + |E2|^2), raw fields
    cayley_klein: tuple[CayleyKlein, ...]


def propagate_fields(p: WaveguideParams, grid, tol: float = 1e-10) -> FieldTrajectory:
    """Propagate the raw field amplitudes and report the transfer probability alongside.

    Fields are unnormalized (the propagator is not unitary and they may grow); the
    transfer probability uses the normalized evolution of the rotated-frame state.
    """
    z = np.asarray(grid, dtype=float)
    if z.ndim != 1 or len(z) == 0:
        raise DomainError("grid must be a nonempty 1-d array")
    if np.any(np.diff(z) <= 0) or z[0] < 0 or z[-1] > p.z_max:
        raise DomainError(f"grid must increase within [0, {p.z_max}]")
    if z[-1] > 0:
        res = integrate_schrodinger(waveguide_transform(p), (0.0, float(z[-1])), tol, z)
        U = res.U
    else:
        U = np.eye(2, dtype=complex)[None]
    e0 = np.asarray(p.initial_fields, dtype=complex)
    fields = np.einsum("ij,njk,kl,l->ni", ROTATION.conj().T, U, ROTATION, e0)
    cks = tuple(CayleyKlein.from_matrix(u, float(zi)) for u, zi in zip(U, z))
    transfer = np.array([transition_probability(ck) for ck in cks])
    dens = np.array([evolve_density(u, RHO_MINUS).rho[0, 0].real for u in U])
    power = np.abs(fields[:, 1]) ** 2 / np.sum(np.abs(fields) ** 2, axis=1)
    return FieldTrajectory(z, fields[:, 0], fields[:, 1], transfer, dens, power, cks)

