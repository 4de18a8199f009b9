"""Independent numerics: direct integration of i dU/dt = H(t) U and consistency checks."""

from __future__ import annotations

import cmath
import math
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .core import IDENTITY, SIGMA_Z, CayleyKlein, DensityMatrix2, Su11Hamiltonian
from .errors import DomainError, StiffnessError

TOL_RANGE = (1e-12, 1e-4)
# |b| below which arg(a conj(b)) is too ill-conditioned to compare
PHASE_FLOOR = 1e-3


@dataclass(frozen=True)
class PropagationResult:
    times: np.ndarray
    U: np.ndarray  # shape (n, 2, 2)
    est_error: float
    n_steps: int

    def cayley_klein(self, i: int) -> CayleyKlein:
        return CayleyKlein.from_matrix(self.U[i], float(self.times[i]))

    def scale(self) -> np.ndarray:
        """max(1, max|U_ij|^2) per sample; round-off in det and metric grows with it."""
        return np.maximum(1.0, np.max(np.abs(self.U), axis=(1, 2)) ** 2)

    def det_drift(self) -> float:
        det = np.linalg.det(self.U)
        return float(np.max(np.abs(det - 1.0) / self.scale()))

    def metric_defect(self) -> float:
        """max || sigma_z U^dagger sigma_z U - 1 ||, scaled like :meth:`det_drift`."""
        prod = SIGMA_Z @ np.conj(np.swapaxes(self.U, 1, 2)) @ SIGMA_Z @ self.U
        return float(np.max(np.max(np.abs(prod - IDENTITY), axis=(1, 2)) / self.scale()))


def _rhs(h: Su11Hamiltonian):
    def f(t, y):
        big = float(h.omega_big(t))
        w = float(h.omega_abs(t))
        ph = float(h.phi_omega(t))
        if not (math.isfinite(big) and math.isfinite(w) and math.isfinite(ph)):
            raise StiffnessError(f"non-finite Hamiltonian at t={t}", last_time=t)
        om = w * cmath.exp(1j * ph)
        omc = om.conjugate()
        u00, u01, u10, u11 = y
        return np.array([
            -1j * (big * u00 - om * u10),
            -1j * (big * u01 - om * u11),
            -1j * (omc * u00 - big * u10),
            -1j * (omc * u01 - big * u11),
        ])
    return f


def integrate_schrodinger(h: Su11Hamiltonian, t_span: tuple[float, float], tol: float = 1e-9,
                          t_eval: Sequence[float] | None = None) -> PropagationResult:
    """Propagate U(t_span[0]) = 1 with Dormand-Prince 5(4) at local tolerance ``tol``.

    ``est_error`` is a crude global bound on the quadratic invariants (det U,
    sigma_z U^dagger sigma_z U): accepted steps x tol x max(1, max|U|^2).
    """
    lo, hi = map(float, t_span)
    if not TOL_RANGE[0] <= tol <= TOL_RANGE[1]:
        raise DomainError(f"tol must lie in {TOL_RANGE}")
    if not hi > lo:
        raise DomainError("empty time span")
    if lo < h.t_min or hi > h.t_max:
        raise DomainError(f"span [{lo}, {hi}] outside the Hamiltonian's domain")
    if t_eval is not None:
        t_eval = np.asarray(t_eval, dtype=float)
    y0 = IDENTITY.astype(complex).ravel()
    sol = solve_ivp(_rhs(h), (lo, hi), y0, method="RK45", rtol=tol, atol=tol, t_eval=t_eval)
    if sol.status != 0:
        last = float(sol.t[-1]) if len(sol.t) else lo
        raise StiffnessError(f"integration stopped at t={last}: {sol.message}", last_time=last)
    U = sol.y.T.reshape(-1, 2, 2)
    n_steps = max(1, (sol.nfev - 1) // 6)
    est = tol * n_steps * max(1.0, float(np.max(np.abs(U))) ** 2)
    return PropagationResult(np.asarray(sol.t), U, est, n_steps)


def nonlinear_rhs(H: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """-i[K, rho] - {Gamma, rho} + 2 rho Tr(rho Gamma), with H = K - i Gamma."""
    K = 0.5 * (H + H.conj().T)
    G = 0.5j * (H - H.conj().T)
    return -1j * (K @ rho - rho @ K) - (G @ rho + rho @ G) + 2.0 * rho * np.trace(rho @ G)


def nonlinear_residual(h: Su11Hamiltonian, times: Sequence[float],
                       rho_traj: Sequence[DensityMatrix2] | np.ndarray) -> float:
    """Max over interior samples of || d(rho)/dt - RHS(rho) ||_inf.

    The derivative is the 4th-order central difference on a uniform grid; the
    two samples at each end are excluded.
    """
    times = np.asarray(times, dtype=float)
    rho = np.array([r.rho if isinstance(r, DensityMatrix2) else r for r in rho_traj], dtype=complex)
    if len(times) < 9 or len(rho) != len(times):
        raise DomainError("need at least 9 matching samples")
    dt = np.diff(times)
    step = dt[0]
    if not step > 0 or np.max(np.abs(dt - step)) > 1e-9 * step:
        raise DomainError("grid must be uniform and increasing")
    deriv = (rho[:-4] - 8 * rho[1:-3] + 8 * rho[3:-1] - rho[4:]) / (12 * step)
    worst = 0.0
    for i, d in enumerate(deriv, start=2):
        res = d - nonlinear_rhs(h.matrix(times[i]), rho[i])
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


@dataclass(frozen=True)
class ComparisonReport:
    max_dev_abs_a: float
    max_dev_abs_b: float
    max_dev_a: float
    max_dev_b: float
    max_relative_phase_dev: float
    global_phase: float
    global_phase_drift: float
    threshold: float
    passed: bool
    n_samples: int

    def to_dict(self) -> dict:
        return asdict(self)


def compare_solutions(analytic: Callable[[float], CayleyKlein], numeric: PropagationResult,
                      threshold: float = 1e-6) -> ComparisonReport:
    """Compare a closed-form solution with an oracle run sample by sample.

    Deviations are scaled by max(1, |x|) so growing (hyperbolic) solutions are
    compared relatively. ``passed`` refers to the moduli; the relative phase
    arg(a conj(b)) is free of any global-phase convention and reported alongside.
    """
    ca = np.empty(len(numeric.times), dtype=complex)
    cb = np.empty_like(ca)
    for i, t in enumerate(numeric.times):
        ck = analytic(float(t))
        ca[i], cb[i] = ck.a, ck.b
    na = numeric.U[:, 0, 0]
    nb = -numeric.U[:, 0, 1]
    sa = np.maximum(1.0, np.abs(ca))
    sb = np.maximum(1.0, np.abs(cb))
    dev_abs_a = float(np.max(np.abs(np.abs(na) - np.abs(ca)) / sa))
    dev_abs_b = float(np.max(np.abs(np.abs(nb) - np.abs(cb)) / sb))
    dev_a = float(np.max(np.abs(na - ca) / sa))
    dev_b = float(np.max(np.abs(nb - cb) / sb))

    has_b = np.abs(cb) > PHASE_FLOOR
    if np.any(has_b):
        rel = np.angle(na[has_b] * np.conj(nb[has_b])) - np.angle(ca[has_b] * np.conj(cb[has_b]))
        rel = np.angle(np.exp(1j * rel))
        rel_dev = float(np.max(np.abs(rel)))
    else:
        rel_dev = 0.0
    chi = np.unwrap(np.angle(na * np.conj(ca)))
    return ComparisonReport(
        max_dev_abs_a=dev_abs_a,
        max_dev_abs_b=dev_abs_b,
        max_dev_a=dev_a,
        max_dev_b=dev_b,
        max_relative_phase_dev=rel_dev,
        global_phase=float(np.mean(chi)),
        global_phase_drift=float(np.max(chi) - np.min(chi)),
        threshold=threshold,
        passed=bool(max(dev_abs_a, dev_abs_b) <= threshold),
        n_samples=len(numeric.times),
    )
