"""Closed-form solvable families: the two arctan schedules, the cos^2 preset and the nu-family."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, NamedTuple

import numpy as np

from .core import CayleyKlein, SpectrumKind, Su11Hamiltonian, constant, spectrum_kind
from .errors import DomainError
from .quadrature import CumulativeIntegral, as_vectorized
from .solver import SolvableModel, ThetaSchedule

TAU_COUPLING = "tau"
KAPPA_COUPLING = "kappa"
CONVENTIONS = (TAU_COUPLING, KAPPA_COUPLING)


def _check_convention(convention):
    if convention not in CONVENTIONS:
        raise DomainError(f"convention must be one of {CONVENTIONS}, got {convention!r}")


# --------------------------------------------------------------------------
# Example 1: Lambda = arcsinh(kappa)/2, Theta = arctan(kappa), kappa = 2 w t
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Example1Model:
    """Constant coupling |omega| = w with Theta = arctan(2 w t)."""

    w: float
    phi_omega: float = math.pi / 2

    def __post_init__(self):
        if not self.w > 0:
            raise DomainError("w must be positive")

    def kappa(self, t):
        return 2.0 * self.w * np.asarray(t, dtype=float)

    def theta(self, t):
        return np.arctan(self.kappa(t))

    def theta_dot(self, t):
        k = self.kappa(t)
        return 2.0 * self.w / (1.0 + k * k)

    def lambda_theta(self, t):
        return 0.5 * np.arcsinh(self.kappa(t))

    def script_r(self, t):
        return 0.5 * np.arcsinh(self.kappa(t))

    def omega_big(self, t):
        """Omega obtained from the solvability relation: w [1 + 1/(1 + kappa^2)]."""
        k = self.kappa(t)
        return self.w * (1.0 + 1.0 / (1.0 + k * k))

    def hamiltonian(self, t_max: float = math.inf) -> Su11Hamiltonian:
        return Su11Hamiltonian(self.omega_big, constant(self.w), constant(self.phi_omega),
                               t_max=t_max)

    def solvable_model(self, t_max: float, **kw) -> SolvableModel:
        sched = ThetaSchedule(self.theta, self.theta_dot, t_max)
        return SolvableModel(sched, constant(self.w), self.phi_omega, **kw)


def ex1_solution(m: Example1Model, t: float) -> CayleyKlein:
    """a = sqrt((sqrt(1+k^2)+1)/2) e^{-i(Theta/2+R)}, b = sqrt((sqrt(1+k^2)-1)/2) e^{-i(Theta/2-R)}."""
    if t < 0:
        raise DomainError("t must be nonnegative")
    k = float(m.kappa(t))
    root = math.sqrt(1.0 + k * k)
    a_mod = math.sqrt((root + 1.0) / 2.0)
    # (root - 1)/2 written without cancellation
    b_mod = math.sqrt(k * k / (2.0 * (root + 1.0)))
    th, r = math.atan(k), 0.5 * math.asinh(k)
    a = a_mod * np.exp(-1j * (th / 2 + r))
    b = b_mod * np.exp(-1j * (th / 2 - r))
    if m.phi_omega != math.pi / 2:
        # this pair belongs to phi_omega = pi/2; rotate b for other gauges
        b = b * np.exp(1j * (m.phi_omega - math.pi / 2))
    return CayleyKlein(complex(a), complex(b), float(t))


def ex1_gamma(m: Example1Model, tau, convention: str = TAU_COUPLING):
    """Coupling schedule gamma(tau), tau = w t, in the chosen convention.

    ``tau``: (w/2) [2 + 1/(1 + tau^2)];
    ``kappa``: the Omega that actually solves the model, w [1 + 1/(1 + 4 tau^2)] = w [1 + 1/(1 + kappa^2)].
    """
    _check_convention(convention)
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise DomainError("tau must be nonnegative")
    if convention == TAU_COUPLING:
        out = 0.5 * m.w * (2.0 + 1.0 / (1.0 + tau * tau))
    else:
        out = m.w * (1.0 + 1.0 / (1.0 + 4.0 * tau * tau))
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# Example 2: Lambda = arcsinh(kappa/2), Theta = arctan(kappa/2), Omega = |omega|
# --------------------------------------------------------------------------

def ex2_solution(kappa: float, w: float = 1.0) -> CayleyKlein:
    """a = sqrt(1 + k^2/4) e^{-i(Theta/2+R)}, b = (k/2) e^{-i(Theta/2-R)}, R = arctan(k/2)/2."""
    if kappa < 0:
        raise DomainError("kappa must be nonnegative")
    half = 0.5 * kappa
    th = math.atan(half)
    r = 0.5 * th
    a = math.sqrt(1.0 + half * half) * np.exp(-1j * (th / 2 + r))
    b = half * np.exp(-1j * (th / 2 - r))
    return CayleyKlein(complex(a), complex(b), kappa / (2.0 * w))


def ex2_omega_big(omega_abs):
    """Side condition of the second schedule: Omega = |omega|."""
    return omega_abs


def ex2_model(w: float, t_max: float, **kw) -> SolvableModel:
    sched = ThetaSchedule(lambda t: np.arctan(w * np.asarray(t)),
                          lambda t: w / (1.0 + (w * np.asarray(t)) ** 2), t_max)
    return SolvableModel(sched, constant(w), math.pi / 2, **kw)


def ex2_hamiltonian(w: float, t_max: float = math.inf) -> Su11Hamiltonian:
    return Su11Hamiltonian(constant(w), constant(w), constant(math.pi / 2), t_max=t_max)


# --------------------------------------------------------------------------
# cos^2 preset: |omega| = w0 cos^2(w0 t), Theta = w0 t
# --------------------------------------------------------------------------

def fig2_preset(w0: float, t_max: float | None = None, **kw) -> SolvableModel:
    """Schedule with |omega| = w0 cos^2(w0 t), Theta = w0 t and constant phi_omega = pi/2.

    R has no closed form here and is evaluated by quadrature. Lambda vanishes at
    w0 t = pi, 2 pi, ... together with sin(Theta), so the guarded limits are exercised.
    """
    if not w0 > 0:
        raise DomainError("w0 must be positive")
    if t_max is None:
        t_max = 20.0 / w0
    sched = ThetaSchedule(lambda t: w0 * np.asarray(t, dtype=float),
                          constant(w0), t_max)
    return SolvableModel(sched, lambda t: w0 * np.cos(w0 * np.asarray(t)) ** 2,
                         math.pi / 2, **kw)


# --------------------------------------------------------------------------
# nu-family: 2 Omega + phi_omega' = 2 nu |omega|
# --------------------------------------------------------------------------

class Regime(str, Enum):
    OSCILLATORY = "oscillatory"
    HYPERBOLIC = "hyperbolic"
    BOUNDARY = "boundary"


# |nu^2 - 1| below which the series forms replace the sin/sinh ratios
SERIES_SWITCH = 1e-6


def regime_of(nu: float) -> Regime:
    if nu > 1:
        return Regime.OSCILLATORY
    if nu < 1:
        return Regime.HYPERBOLIC
    return Regime.BOUNDARY


def _cos_sinc(q, s):
    """g = cos(sqrt(q) s), f = sin(sqrt(q) s)/sqrt(q), continued to q <= 0."""
    s = np.asarray(s, dtype=float)
    if abs(q) < SERIES_SWITCH:
        x = -q * s * s
        g = np.ones_like(s)
        f = np.ones_like(s)
        term_g = np.ones_like(s)
        term_f = np.ones_like(s)
        for k in range(1, 80):
            term_g = term_g * x / ((2 * k - 1) * (2 * k))
            term_f = term_f * x / ((2 * k) * (2 * k + 1))
            g = g + term_g
            f = f + term_f
            if np.all(np.abs(term_g) <= 1e-17 * np.abs(g)) and np.all(np.abs(term_f) <= 1e-17 * np.abs(f)):
                break
        return g, s * f
    if q > 0:
        root = math.sqrt(q)
        return np.cos(root * s), np.sin(root * s) / root
    root = math.sqrt(-q)
    return np.cosh(root * s), np.sinh(root * s) / root


class NuFamilyModel:
    """Solvable family with Omega = nu |omega| - phi_omega'/2.

    ``omega_abs`` is a nonnegative constant or callable; a callable needs ``t_max``
    so that int_0^t |omega| can be tabulated. phi_omega(t) = phi_omega0 + rate t.
    """

    def __init__(self, nu: float, omega_abs: float | Callable = 1.0,
                 phi_omega0: float = math.pi / 2, phi_omega_rate: float = 0.0,
                 t_max: float | None = None):
        if not nu >= 0:
            raise DomainError("nu must be nonnegative")
        self.nu = float(nu)
        self.phi_omega0 = float(phi_omega0)
        self.phi_omega_rate = float(phi_omega_rate)
        self.t_max = math.inf if t_max is None else float(t_max)
        if callable(omega_abs):
            if t_max is None:
                raise DomainError("t_max is required for a time-dependent |omega|")
            self.omega_abs = as_vectorized(omega_abs)
            self._s = CumulativeIntegral(self.omega_abs, self.t_max, tol=1e-12)
        else:
            if omega_abs < 0:
                raise DomainError("|omega| must be nonnegative")
            w = float(omega_abs)
            self.omega_abs = constant(w)
            self._s = lambda t: w * np.asarray(t, dtype=float)

    @property
    def regime(self) -> Regime:
        return regime_of(self.nu)

    @property
    def q(self) -> float:
        return self.nu * self.nu - 1.0

    def integrated_coupling(self, t):
        """int_0^t |omega| dt'."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.t_max):
            raise DomainError(f"t outside [0, {self.t_max}]")
        out = self._s(t)
        return float(out) if np.ndim(out) == 0 else out

    def phi_omega(self, t):
        return self.phi_omega0 + self.phi_omega_rate * np.asarray(t, dtype=float)

    def omega_big(self, t):
        return self.nu * self.omega_abs(t) - 0.5 * self.phi_omega_rate

    def hamiltonian(self) -> Su11Hamiltonian:
        return Su11Hamiltonian(self.omega_big, self.omega_abs, self.phi_omega,
                               constant(self.phi_omega_rate), t_max=self.t_max)


def nu_phi(m: NuFamilyModel, t):
    """Continuous phase phi_nu(t) with tan(phi_nu) = nu/sqrt(nu^2-1) tan(sqrt(nu^2-1) s).

    The branch is fixed by the tan argument x = sqrt(nu^2 - 1) s: phi_nu and x
    always lie within pi/2 of each other, which selects the lift uniquely.
    For nu < 1 the hyperbolic continuation tan(ix) = i tanh(x) keeps phi_nu bounded.
    """
    s = np.asarray(m.integrated_coupling(t), dtype=float)
    g, f = _cos_sinc(m.q, s)
    base = np.arctan2(m.nu * f, g)
    x = math.sqrt(m.q) * s if m.q > 0 else np.zeros_like(s)
    out = base + 2.0 * np.pi * np.round((x - base) / (2.0 * np.pi))
    return float(out) if out.ndim == 0 else out


def nu_solution(m: NuFamilyModel, t: float) -> CayleyKlein:
    """a = [g - i nu f] e^{i(phi_omega - phi0)/2}, b = -i f e^{i(phi_omega + phi0)/2}.

    g, f are cos and sin/sqrt(nu^2-1) of sqrt(nu^2-1) int|omega| (cosh and
    sinh/sqrt(1-nu^2) for nu < 1, power series near nu = 1).
    """
    s = m.integrated_coupling(t)
    g, f = _cos_sinc(m.q, s)
    g, f = float(g), float(f)
    ph = float(m.phi_omega(t))
    a = complex(g, -m.nu * f) * np.exp(0.5j * (ph - m.phi_omega0))
    b = -1j * f * np.exp(0.5j * (ph + m.phi_omega0))
    return CayleyKlein(complex(a), complex(b), float(t))


def nu_x_function(m: NuFamilyModel, t) -> complex:
    """X_nu = sin(phi_nu)/nu exp(i(phi_nu + phi_omega0)) (defined for nu > 0)."""
    ph = nu_phi(m, t)
    return np.sin(ph) / m.nu * np.exp(1j * (ph + m.phi_omega0))


class RegimeClassification(NamedTuple):
    regime: Regime
    spectrum: SpectrumKind
    coincident: bool
    omega_big: float


def classify_regime_and_spectrum(nu: float, omega0: float, phi0: float) -> RegimeClassification:
    """Compare the nu-based dynamical regime with the spectrum of the constant Hamiltonian.

    Constant case Omega = Omega0, |omega| = |omega0|, phi_omega' = phi0 with
    Omega0 = (2 nu |omega0| - phi0)/2. The two classifications coincide when the
    regime is oscillatory exactly when the spectrum is real.
    """
    w = abs(omega0)
    big = (2.0 * nu * w - phi0) / 2.0
    regime = regime_of(nu)
    spectrum = spectrum_kind(big, w)
    coincident = (regime is Regime.OSCILLATORY) == (spectrum is SpectrumKind.REAL)
    return RegimeClassification(regime, spectrum, coincident, big)
