"""Analytical post-buckling of a heated clamped-clamped beam.

The first buckling mode is treated with the exact elastica of the quarter
beam.  Writing ``beta = sin(theta_max / 2)`` for the elliptic modulus built
from the largest slope angle, ``K`` and ``E`` for the complete elliptic
integrals of the first and second kind, ``N`` for the compressive axial
force and ``L'`` for the bowed arc length, the buckled equilibrium obeys

    sqrt(N / (E_y I)) * L' = 4 K(beta)          (quarter-wave arc relation)
    L  = L' * (2 E(beta) / K(beta) - 1)         (fixed distance between clamps)
    (L' - L) / L = alpha (T - T0) - N / (E_y A) (thermal minus elastic strain)

and the midspan deflection is ``gamma_max = 4 beta sqrt(E_y I / N)``.

The load parameter throughout this module is the *thermal load*

    P = E_y * A * alpha * (T - T0),

the compressive force the clamps would feel if the beam were held straight.
Unlike the internal force ``N`` (which saturates near the Euler load after
buckling), ``P`` grows monotonically with temperature, so sweeping P traces
the whole deflection-temperature curve.  Below the Euler load
``P_cr = 4 pi^2 E_y I / L^2`` the beam is straight and N = P (membrane
branch).  Above it, eliminating ``L'`` reduces the system to one equation in
beta,

    E_y A * eps(beta) + N(beta) = P,

with ``eps = 2 S / (1 - 2 S)`` and ``N = P_cr * (2 K (1 - 2 S) / pi)^2``,
where ``S = (K - E) / K`` is evaluated cancellation-free by the
arithmetic-geometric-mean iteration.  The equation has exactly one root in
the physical range and is solved by bracketed Brent iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from ._ioutil import atomic_write_text, format_float
from .errors import ConvergenceError, DomainError, NumericalError, ValidationError
from .geometry import BeamGeometry
from .materials import MaterialModel, cte, young_modulus

# Modulus at which the chord of the quarter-wave elastica vanishes
# (2 E(beta) = K(beta)); equilibria beyond it would self-intersect.
_BETA_CHORD_LIMIT = 0.9089085575485414

SWEEP_CSV_HEADER = "P_n,beta,theta_max_rad,epsilon,T_c,gamma_max_m,converged,iters"


@dataclass(frozen=True)
class ElasticaState:
    """One converged equilibrium of the analytical model.

    Attributes:
        P_n: axial thermal load E_y*A*alpha*(T - T0), N.
        beta: elliptic modulus sin(theta_max/2), in [0, 1).
        theta_max_rad: largest slope angle of the bowed beam.
        epsilon: arc-length strain (L' - L)/L.
        T_c: average beam temperature, degC.
        gamma_max_m: midspan transverse deflection, m.
        axial_force_n: internal compressive force N (equals P_n on the
            straight branch, saturates near the Euler load after buckling).
        converged: property-iteration convergence flag.
        iterations: property-update iterations spent (0 for fixed properties).
    """

    P_n: float
    beta: float
    theta_max_rad: float
    epsilon: float
    T_c: float
    gamma_max_m: float
    axial_force_n: float
    converged: bool = True
    iterations: int = 0


def _agm_k_and_sum(beta: float) -> tuple[float, float]:
    """AGM evaluation of K(beta) and S = (K - E)/K.

    S is accumulated as the positive series ``sum(2^(n-1) c_n^2)`` with
    ``c_0 = beta``, so K - E keeps full relative accuracy even for tiny
    moduli where direct subtraction would cancel.
    """
    a = 1.0
    b = math.sqrt((1.0 - beta) * (1.0 + beta))
    s = 0.5 * beta * beta
    pow2 = 0.5
    # quadratic convergence: one extra pass after |a-b| ~ 1e-9 a lands at
    # rounding level, so a relative 1e-9 exit threshold is machine accurate
    for _ in range(40):
        if abs(a - b) <= 1e-9 * a:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        pow2 *= 2.0
        s += pow2 * c * c
    a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
    pow2 *= 2.0
    s += pow2 * c * c
    k = math.pi / (a + b)
    return k, s


def elliptic_k(beta: float) -> float:
    """Complete elliptic integral of the first kind, K(beta).

    ``beta`` is the modulus k, not the parameter m = k**2.  Evaluated with
    the arithmetic-geometric mean, ``K = pi / (2 AGM(1, sqrt(1 - beta^2)))``,
    which converges quadratically to machine accuracy.

    Raises:
        DomainError: if beta < 0 or beta >= 1.
    """
    if not (0.0 <= beta < 1.0):
        raise DomainError(f"elliptic_k requires 0 <= beta < 1, got {beta!r}")
    a = 1.0
    b = math.sqrt((1.0 - beta) * (1.0 + beta))
    for _ in range(40):
        if abs(a - b) <= 1e-9 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (a + b)


def elliptic_e(beta: float) -> float:
    """Complete elliptic integral of the second kind, E(beta)."""
    if not (0.0 <= beta < 1.0):
        raise DomainError(f"elliptic_e requires 0 <= beta < 1, got {beta!r}")
    k, s = _agm_k_and_sum(beta)
    return k * (1.0 - s)


def invert_k(target: float) -> float:
    """Solve K(beta) = target for the unique beta in [0, 1).

    K is strictly increasing on [0, 1), so the root is found by a Newton
    iteration safeguarded with bisection inside a sign-change bracket.

    Raises:
        DomainError: if target < pi/2 - 1e-15 (below the range of K).
    """
    half_pi = 0.5 * math.pi
    if target < half_pi - 1e-15:
        raise DomainError(f"invert_k requires target >= pi/2, got {target!r}")
    if target <= half_pi:
        return 0.0
    # Seed from the small-modulus series or the logarithmic blow-up.
    if target < 1.8:
        beta = 2.0 * math.sqrt(target / half_pi - 1.0)
    else:
        bc = 4.0 * math.exp(-target)
        beta = math.sqrt(max(1.0 - bc * bc, 0.5))
    beta = min(max(beta, 1e-12), 1.0 - 1e-16)
    lo, hi = 0.0, 1.0 - 1e-16
    for _ in range(200):
        k, s = _agm_k_and_sum(beta)
        f = k - target
        if abs(f) <= 1e-14 * target:
            return beta
        if f > 0.0:
            hi = beta
        else:
            lo = beta
        if hi - lo <= 4e-16 * hi:
            # bracket tighter than a few ulps: best representable beta
            return beta
        # dK/dbeta = (E - (1-beta^2) K) / (beta (1-beta^2)) = K (beta^2 - S) /
        # (beta (1-beta^2)); beta^2 - S > 0 on (0, 1).
        dk = k * (beta * beta - s) / (beta * (1.0 - beta * beta))
        step = f / dk
        beta_new = beta - step
        if not (lo < beta_new < hi):
            beta_new = 0.5 * (lo + hi)
        if abs(beta_new - beta) < 1e-17:
            return beta_new
        beta = beta_new
    return beta


def critical_load(geom: BeamGeometry, E_pa: float) -> float:
    """First-mode Euler load of the clamped-clamped beam, 4 pi^2 E I / L^2."""
    if not (E_pa > 0.0):
        raise DomainError(f"critical_load requires E > 0, got {E_pa!r}")
    return 4.0 * math.pi**2 * E_pa * geom.inertia_m4 / geom.length_m**2


def _postbuckled_beta(P_n: float, P_cr: float, EA: float) -> tuple[float, float, float]:
    """Root of E_y A eps(beta) + N(beta) = P; returns (beta, eps, N)."""

    def residual(beta: float) -> float:
        k, s = _agm_k_and_sum(beta)
        chord = 1.0 - 2.0 * s
        if chord <= 0.0:
            return math.inf
        eps = 2.0 * s / chord
        n_force = P_cr * (2.0 * k * chord / math.pi) ** 2
        return EA * eps + n_force - P_n

    # eps ~ beta^2 near onset, so this overshoots the root slightly.
    hi = min(2.0 * math.sqrt((P_n - P_cr) / EA) + 1e-6, 0.9 * _BETA_CHORD_LIMIT)
    while residual(hi) < 0.0:
        hi = _BETA_CHORD_LIMIT - 0.5 * (_BETA_CHORD_LIMIT - hi)
    beta = brentq(residual, 0.0, hi, xtol=1e-15, rtol=4.0 * np.finfo(float).eps)
    k, s = _agm_k_and_sum(beta)
    chord = 1.0 - 2.0 * s
    eps = 2.0 * s / chord
    n_force = P_cr * (2.0 * k * chord / math.pi) ** 2
    return beta, eps, n_force


def solve_state(
    geom: BeamGeometry,
    E_pa: float,
    alpha_per_c: float,
    T_0_c: float,
    P_n: float,
) -> ElasticaState:
    """Equilibrium state at fixed material properties and thermal load P.

    Below the Euler load the beam stays straight and the clamps carry the
    full thermal load (membrane branch, T = T0 + P/(E_y A alpha)).  Above it
    the buckled elastica equilibrium is solved as described in the module
    docstring.  The two branches join continuously at P = P_cr.

    Raises:
        DomainError: on non-positive P, E or alpha.
        NumericalError: if the deflection radicand alpha*(T-T0) - eps is not
            positive (an inconsistent property set).
    """
    if not (P_n > 0.0):
        raise DomainError(f"solve_state requires P > 0, got {P_n!r}")
    if not (E_pa > 0.0):
        raise DomainError(f"solve_state requires E > 0, got {E_pa!r}")
    if not (alpha_per_c > 0.0):
        raise DomainError(f"solve_state requires alpha > 0, got {alpha_per_c!r}")

    area = geom.area_m2
    EA = E_pa * area
    P_cr = critical_load(geom, E_pa)
    T_c = T_0_c + P_n / (EA * alpha_per_c)
    if P_n <= P_cr:
        return ElasticaState(
            P_n=P_n,
            beta=0.0,
            theta_max_rad=0.0,
            epsilon=0.0,
            T_c=T_c,
            gamma_max_m=0.0,
            axial_force_n=P_n,
        )

    beta, eps, n_force = _postbuckled_beta(P_n, P_cr, EA)
    radicand = alpha_per_c * (T_c - T_0_c) - eps  # equals N / (E_y A)
    if radicand <= 0.0:
        raise NumericalError(
            f"deflection radicand alpha*dT - eps = {radicand!r} is not "
            "positive; property set is inconsistent"
        )
    gamma = 4.0 * beta * math.sqrt(geom.inertia_m4 / (radicand * area))
    return ElasticaState(
        P_n=P_n,
        beta=beta,
        theta_max_rad=2.0 * math.asin(beta),
        epsilon=eps,
        T_c=T_c,
        gamma_max_m=gamma,
        axial_force_n=n_force,
    )


def solve_state_tdep(
    geom: BeamGeometry,
    mat: MaterialModel,
    P_n: float,
    tol_T_c: float = 0.01,
    max_iter: int = 200,
) -> ElasticaState:
    """Equilibrium at thermal load P with properties consistent with T.

    Fixed-point iteration: start from the state solved with properties at
    ``mat.T_0_c``; at each pass re-evaluate E and alpha at the current
    temperature and re-solve.  After the first sign flip of the temperature
    update the iteration switches to under-relaxation with factor 0.5 to
    damp oscillation.  Stops when the applied update is below ``tol_T_c``.

    Raises:
        ConvergenceError: after ``max_iter`` passes without meeting the
            tolerance; the last state (flagged unconverged) is attached to
            the exception as ``result``.
    """
    if not (tol_T_c > 0.0):
        raise DomainError(f"tol_T_c must be > 0, got {tol_T_c!r}")
    if max_iter < 1:
        raise DomainError(f"max_iter must be >= 1, got {max_iter!r}")

    T = mat.T_0_c
    relax = 1.0
    prev_update = 0.0
    for iteration in range(1, max_iter + 1):
        state = solve_state(geom, young_modulus(mat, T), cte(mat, T), mat.T_0_c, P_n)
        update = state.T_c - T
        if update * prev_update < 0.0:
            relax = 0.5
        T_next = T + relax * update
        step = T_next - T
        prev_update = update
        T = T_next
        if abs(step) < tol_T_c:
            return replace(state, converged=True, iterations=iteration)
    state = replace(state, converged=False, iterations=max_iter)
    raise ConvergenceError(
        f"property iteration did not reach tol_T={tol_T_c} degC within "
        f"{max_iter} iterations at P={P_n!r} N (last update {prev_update!r})",
        result=state,
    )


def sweep(
    geom: BeamGeometry,
    mat: MaterialModel,
    P_min_n: float,
    P_max_n: float,
    n_points: int,
    mode: str = "tdep",
    spacing: str = "linear",
    tol_T_c: float = 0.01,
    max_iter: int = 200,
) -> list[ElasticaState]:
    """Solve ``n_points`` states over [P_min, P_max], ordered by P.

    ``mode='constant'`` freezes the properties at ``mat.T_0_c``;
    ``mode='tdep'`` runs the property fixed-point at every load.  Points
    whose property iteration fails are flagged (``converged=False``) and
    kept in place, never dropped.
    """
    if not (0.0 < P_min_n < P_max_n):
        raise ValidationError(
            f"sweep requires 0 < P_min_n < P_max_n, got P_min_n={P_min_n!r}, "
            f"P_max_n={P_max_n!r}"
        )
    if n_points < 2:
        raise ValidationError(f"sweep requires n_points >= 2, got {n_points!r}")
    if mode not in ("constant", "tdep"):
        raise ValidationError(f"sweep mode must be 'constant' or 'tdep', got {mode!r}")
    if spacing == "linear":
        loads = np.linspace(P_min_n, P_max_n, n_points)
    elif spacing == "geometric":
        loads = np.geomspace(P_min_n, P_max_n, n_points)
    else:
        raise ValidationError(
            f"sweep spacing must be 'linear' or 'geometric', got {spacing!r}"
        )

    E0 = young_modulus(mat, mat.T_0_c)
    alpha0 = cte(mat, mat.T_0_c)
    states = []
    for P in loads:
        P = float(P)
        if mode == "constant":
            states.append(solve_state(geom, E0, alpha0, mat.T_0_c, P))
        else:
            try:
                states.append(solve_state_tdep(geom, mat, P, tol_T_c, max_iter))
            except ConvergenceError as exc:
                states.append(exc.result)
    return states


def write_sweep_csv(states, path) -> None:
    """Write sweep states as CSV (17 significant digits, atomic rename)."""
    rows = [SWEEP_CSV_HEADER]
    for s in states:
        rows.append(
            ",".join(
                [
                    format_float(s.P_n),
                    format_float(s.beta),
                    format_float(s.theta_max_rad),
                    format_float(s.epsilon),
                    format_float(s.T_c),
                    format_float(s.gamma_max_m),
                    "1" if s.converged else "0",
                    str(s.iterations),
                ]
            )
        )
    atomic_write_text(path, "\n".join(rows) + "\n")
