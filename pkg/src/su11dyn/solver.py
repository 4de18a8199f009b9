"""Exactly solvable su(1,1) dynamics from a freely chosen phase schedule Theta(t).

Given Theta (with Theta(0) = 0), |omega|(t) and phi_omega(t), the propagator is

    a = cosh(Lambda) exp(i[(phi_omega - phi_omega(0))/2 - Theta/2 - R])
    b = -i sinh(Lambda) exp(i[(phi_omega + phi_omega(0))/2 - Theta/2 + R])

with Lambda = int |omega| cos(Theta) and R = int |omega| sin(Theta) / sinh(2 Lambda),
provided the diagonal term is

    Omega = (Theta' + 2 |omega| sin(Theta) coth(2 Lambda) - phi_omega') / 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import CayleyKlein, Su11Hamiltonian, constant
from .errors import DomainError, SolvabilityError
from .quadrature import CumulativeIntegral, as_vectorized

# |2 Lambda| below which sinh/coth are replaced by their first-order limit
GUARD = 1e-6
# |2 Lambda| below which sin(Theta)/(2 Lambda) is itself replaced by its 0/0 limit
LIMIT = 1e-8
# sin(Theta) above this while Lambda ~ 0 is a genuine singularity
SIN_BREAKDOWN = 1e-6


@dataclass(frozen=True)
class ThetaSchedule:
    """Real phase schedule Theta(t) on [0, t_max] together with its exact derivative."""

    theta: Callable
    theta_dot: Callable
    t_max: float
    check_points: int = 20

    def __post_init__(self):
        if not self.t_max > 0:
            raise DomainError("t_max must be positive")
        th = as_vectorized(self.theta)
        thd = as_vectorized(self.theta_dot)
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "theta_dot", thd)
        if float(th(np.array(0.0))) != 0.0:
            raise DomainError(f"Theta(0) must be 0, got {float(th(np.array(0.0)))}")
        self._check_derivative()

    def _check_derivative(self):
        rng = np.random.default_rng(0)
        h = 1e-3 * min(1.0, self.t_max / 8)
        t = rng.uniform(2 * h, self.t_max - 2 * h, self.check_points)
        th = self.theta
        fd = (-th(t + 2 * h) + 8 * th(t + h) - 8 * th(t - h) + th(t - 2 * h)) / (12 * h)
        exact = self.theta_dot(t)
        bad = np.abs(fd - exact) > 1e-6 * np.maximum(1.0, np.abs(exact))
        if np.any(bad):
            i = int(np.argmax(bad))
            raise DomainError(
                f"theta_dot inconsistent with theta at t={t[i]:.6g}: "
                f"finite difference {fd[i]:.10g} vs supplied {exact[i]:.10g}"
            )


def _weighted_ratio(two_lam, sin_th, w, theta_dot, t):
    """|omega| sin(Theta) / (2 Lambda), guarded at the 0/0 points of Lambda."""
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(np.abs(two_lam) >= LIMIT, w * sin_th / two_lam, 0.5 * theta_dot)
    broken = (np.abs(two_lam) < LIMIT) & (np.abs(sin_th) > SIN_BREAKDOWN)
    if np.any(broken):
        tb = float(np.min(np.ravel(t)[np.ravel(broken)]))
        raise SolvabilityError(
            f"Lambda vanishes at t={tb:.6g} while sin(Theta) does not; "
            "the schedule is not solvable there",
            t=tb,
        )
    return q


class SolvableModel:
    """Exactly solvable model built from a Theta schedule and a given |omega|, phi_omega.

    Lambda and R are tabulated at construction; queries beyond ``t_max`` raise
    :class:`DomainError`. Instances are read-only after construction.
    """

    def __init__(self, theta: ThetaSchedule, omega_abs: Callable,
                 phi_omega: Callable | float = math.pi / 2,
                 phi_omega_dot: Callable | None = None, *,
                 n_cells: int = 1024, quad_tol: float = 1e-10, r_tol: float = 1e-9):
        if not callable(phi_omega):
            phi_omega = constant(phi_omega)
        if phi_omega_dot is None:
            if not hasattr(phi_omega, "value"):
                raise DomainError("phi_omega_dot is required for a time-dependent phi_omega")
            phi_omega_dot = constant(0.0)
        self.theta = theta
        self.omega_abs = as_vectorized(omega_abs)
        self.phi_omega = as_vectorized(phi_omega)
        self.phi_omega_dot = as_vectorized(phi_omega_dot)
        self.t_max = theta.t_max
        self.phi_omega0 = float(self.phi_omega(np.array(0.0)))

        probe = self.omega_abs(np.linspace(0.0, self.t_max, 257))
        if np.any(probe < 0):
            raise DomainError("|omega| must be nonnegative")

        th, w = theta.theta, self.omega_abs
        self._lam = CumulativeIntegral(lambda s: w(s) * np.cos(th(s)), self.t_max,
                                       n_cells=n_cells, tol=quad_tol)
        self._r = CumulativeIntegral(self._r_integrand, self.t_max,
                                     n_cells=n_cells, tol=r_tol)

    def _terms(self, t):
        t = np.asarray(t, dtype=float)
        two_lam = 2.0 * np.asarray(self._lam(t))
        sin_th = np.sin(self.theta.theta(t))
        w = self.omega_abs(t)
        q = _weighted_ratio(two_lam, sin_th, w, self.theta.theta_dot(t), t)
        return two_lam, sin_th, w, q

    def _r_integrand(self, t):
        two_lam, sin_th, w, q = self._terms(t)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            full = w * sin_th / np.sinh(two_lam)
        return np.where(np.abs(two_lam) >= GUARD, full, q)

    def _coth_term(self, t):
        """2 |omega| sin(Theta) coth(2 Lambda) with the 0/0 guard."""
        two_lam, sin_th, w, q = self._terms(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            full = 2.0 * w * sin_th / np.tanh(two_lam)
        return np.where(np.abs(two_lam) >= GUARD, full, 2.0 * q)

    def lambda_theta(self, t):
        """Lambda(t) = int_0^t |omega| cos(Theta) dt'."""
        return self._lam(t)

    def script_r(self, t):
        """R(t) = int_0^t |omega| sin(Theta) / sinh(2 Lambda) dt'."""
        return self._r(t)

    def induced_omega_big(self, t):
        """Diagonal term Omega(t) that makes the model exactly solvable."""
        scalar = np.ndim(t) == 0
        t = np.asarray(t, dtype=float)
        self._lam._check(t)
        out = 0.5 * (self.theta.theta_dot(t) + self._coth_term(t) - self.phi_omega_dot(t))
        return float(out) if scalar else out

    def amplitude(self, t):
        """A(t) = tanh(Lambda), the modulus of the auxiliary function X."""
        return np.tanh(self._lam(t))

    def cayley_klein_solution(self, t: float) -> CayleyKlein:
        t = float(t)
        lam = self._lam(t)
        r = self._r(t)
        th = float(self.theta.theta(np.array(t)))
        ph = float(self.phi_omega(np.array(t)))
        ph0 = self.phi_omega0
        a = math.cosh(lam) * np.exp(1j * ((ph - ph0) / 2 - th / 2 - r))
        b = -1j * math.sinh(lam) * np.exp(1j * ((ph + ph0) / 2 - th / 2 + r))
        return CayleyKlein(complex(a), complex(b), t)

    def hamiltonian(self) -> Su11Hamiltonian:
        """The Hamiltonian (induced Omega, |omega|, phi_omega) this solution belongs to."""
        return Su11Hamiltonian(
            omega_big=self.induced_omega_big,
            omega_abs=self.omega_abs,
            phi_omega=self.phi_omega,
            phi_omega_dot=self.phi_omega_dot,
            t_min=0.0,
            t_max=self.t_max,
        )


lambda_theta = SolvableModel.lambda_theta
script_r = SolvableModel.script_r
induced_omega_big = SolvableModel.induced_omega_big
cayley_klein_solution = SolvableModel.cayley_klein_solution


def x_function(ck: CayleyKlein) -> complex:
    """X = i b / a, so that b = -i a X and |a|^2 (1 - |X|^2) = 1."""
    return 1j * complex(ck.b) / complex(ck.a)
