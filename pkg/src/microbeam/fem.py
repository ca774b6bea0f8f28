"""Geometrically nonlinear thermal buckling FEM for a clamped-clamped beam.

One-dimensional mesh of 2-node corotational Timoshenko elements with three
degrees of freedom per node (axial displacement u, transverse displacement v,
cross-section rotation theta).  The corotational split filters the rigid
chord rotation exactly, so the local element sees small strains even at
elastica-scale rotations:

    ubar   = l_n - l_0                  (chord stretch)
    tbar_i = theta_i - alpha_r           (local end rotations)

The local response is the shear-flexible 2-node Timoshenko element with the
interdependent-interpolation stiffness (exact for the local ODE, no shear
locking).  Heating enters through the mechanical axial strain

    eps_mech = ubar / l_0 - alpha(T) (T - T0)

so a fully constrained hot beam builds up compression until it buckles.  A
small uniform transverse "imperfection" line load stands in for fabrication
defects and makes the buckling transition smooth; it is applied as consistent
nodal forces on the undeformed configuration (a dead load).

Temperature is ramped in uniform increments.  Properties are frozen at each
step's target temperature, equilibrium is found by a full Newton iteration
with the consistent corotational tangent (material + geometric parts), and
failed increments are bisected up to 8 times before giving up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from ._ioutil import atomic_write_text, format_float
from .errors import ConvergenceError, ValidationError
from .geometry import BeamGeometry
from .materials import MaterialModel, cte, shear_modulus, young_modulus

PATH_CSV_HEADER = "T_c,gamma_mid_m,axial_reaction_n,clamp_moment_nm,newton_iters,residual"

_HALF_BAND = 5  # 2-node elements, 3 dof/node: couplings span at most 5 dofs


@dataclass(frozen=True)
class FemModel:
    """Discrete model: uniform mesh, both end nodes fully fixed.

    ``n_elems`` must be even so a node sits exactly at midspan.
    ``imperfection_q`` is the transverse line load in N/m; ``shear_factor``
    is the Timoshenko correction (5/6 for rectangles).
    """

    geom: BeamGeometry
    n_elems: int
    imperfection_q: float
    shear_factor: float = 5.0 / 6.0
    bc: str = "clamped-clamped"

    def __post_init__(self):
        if self.n_elems < 4 or self.n_elems % 2 != 0:
            raise ValidationError(
                f"n_elems must be even and >= 4, got {self.n_elems!r}"
            )
        if self.imperfection_q < 0.0:
            raise ValidationError(
                f"imperfection_q must be >= 0, got {self.imperfection_q!r}"
            )
        if not (0.0 < self.shear_factor <= 1.0):
            raise ValidationError(
                f"shear_factor must lie in (0, 1], got {self.shear_factor!r}"
            )
        if self.bc != "clamped-clamped":
            raise ValidationError(f"unsupported boundary condition {self.bc!r}")

    @property
    def n_nodes(self) -> int:
        return self.n_elems + 1

    @property
    def n_dofs(self) -> int:
        return 3 * self.n_nodes

    @property
    def elem_length_m(self) -> float:
        return self.geom.length_m / self.n_elems

    @property
    def mid_node(self) -> int:
        return self.n_elems // 2

    @property
    def free_slice(self) -> slice:
        """Free dofs: everything except the two fully fixed end nodes."""
        return slice(3, self.n_dofs - 3)


@dataclass(frozen=True)
class FemStep:
    """One converged equilibrium along the temperature path."""

    T_c: float
    gamma_mid_m: float
    axial_reaction_n: float
    clamp_moment_nm: float
    newton_iters: int
    residual: float
    u: np.ndarray = field(repr=False, compare=False, default=None)


@dataclass(frozen=True)
class FemSolutionPath:
    """Ordered converged equilibria; temperatures strictly increase."""

    steps: tuple[FemStep, ...]

    def __post_init__(self):
        temps = [s.T_c for s in self.steps]
        if any(t2 <= t1 for t1, t2 in zip(temps, temps[1:])):
            raise ValidationError("path temperatures must strictly increase")

    @property
    def temperatures_c(self) -> np.ndarray:
        return np.array([s.T_c for s in self.steps])

    @property
    def deflections_m(self) -> np.ndarray:
        return np.array([s.gamma_mid_m for s in self.steps])


def build_model(
    geom: BeamGeometry, n_elems: int = 64, imperfection_q: float = 0.0
) -> FemModel:
    """Validated uniform mesh of ``n_elems`` 2-node elements."""
    return FemModel(geom=geom, n_elems=n_elems, imperfection_q=imperfection_q)


def default_imperfection_q(
    geom: BeamGeometry,
    mat: MaterialModel,
    deflection_fraction: float = 1e-3,
    shear_factor: float = 5.0 / 6.0,
) -> float:
    """Line load giving a midspan deflection of ``fraction * t`` at T0.

    Uses the clamped-clamped closed form for a uniform load,
    ``w_mid = q L^4 / (384 E I) + q L^2 / (8 k_s G A)``.
    """
    E0 = young_modulus(mat, mat.T_0_c)
    G0 = shear_modulus(mat, mat.T_0_c)
    L = geom.length_m
    compliance = L**4 / (384.0 * E0 * geom.inertia_m4) + L**2 / (
        8.0 * shear_factor * G0 * geom.area_m2
    )
    return deflection_fraction * geom.thickness_m / compliance


def _element_indices(model: FemModel) -> np.ndarray:
    i1 = np.arange(model.n_elems)
    nodes = np.stack([i1, i1 + 1], axis=1)
    return (3 * nodes[:, :, None] + np.arange(3)[None, None, :]).reshape(-1, 6)


def _assemble(
    model: FemModel,
    u: np.ndarray,
    E_pa: float,
    G_pa: float,
    thermal_strain: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Internal force vector and consistent tangent for displacement ``u``."""
    l0 = model.elem_length_m
    A = model.geom.area_m2
    inertia = model.geom.inertia_m4
    EA = E_pa * A
    phi = 12.0 * E_pa * inertia / (model.shear_factor * G_pa * A * l0**2)
    cb = E_pa * inertia / (l0 * (1.0 + phi))
    k_tt = (4.0 + phi) * cb  # local theta-theta stiffness, same end
    k_tx = (2.0 - phi) * cb  # local theta-theta stiffness, cross end

    idx = _element_indices(model)
    ue = u[idx]  # (n, 6): u1 v1 t1 u2 v2 t2
    du = ue[:, 3] - ue[:, 0]
    dv = ue[:, 4] - ue[:, 1]
    dx = l0 + du
    ln = np.hypot(dx, dv)
    c = dx / ln
    s = dv / ln
    # chord stretch via ln^2 - l0^2 to avoid cancellation at small strains
    ubar = (2.0 * l0 * du + du * du + dv * dv) / (ln + l0)
    alpha_r = np.arctan2(dv, dx)
    tb1 = ue[:, 2] - alpha_r
    tb2 = ue[:, 5] - alpha_r

    N = EA * (ubar / l0 - thermal_strain)
    M1 = k_tt * tb1 + k_tx * tb2
    M2 = k_tx * tb1 + k_tt * tb2

    zero = np.zeros_like(c)
    one = np.ones_like(c)
    r = np.stack([-c, -s, zero, c, s, zero], axis=1)
    z = np.stack([s, -c, zero, -s, c, zero], axis=1)
    e3 = np.stack([zero, zero, one, zero, zero, zero], axis=1)
    e6 = np.stack([zero, zero, zero, zero, zero, one], axis=1)
    b2 = e3 - z / ln[:, None]
    b3 = e6 - z / ln[:, None]

    f_el = N[:, None] * r + M1[:, None] * b2 + M2[:, None] * b3

    def outer(x, y):
        return np.einsum("ei,ej->eij", x, y)

    k_el = (
        (EA / l0) * outer(r, r)
        + k_tt * (outer(b2, b2) + outer(b3, b3))
        + k_tx * (outer(b2, b3) + outer(b3, b2))
        + (N / ln)[:, None, None] * outer(z, z)
        + ((M1 + M2) / ln**2)[:, None, None] * (outer(r, z) + outer(z, r))
    )

    f_int = np.zeros(model.n_dofs)
    np.add.at(f_int, idx, f_el)
    k_full = np.zeros((model.n_dofs, model.n_dofs))
    np.add.at(k_full, (idx[:, :, None], idx[:, None, :]), k_el)
    return f_int, k_full


def external_load(model: FemModel) -> np.ndarray:
    """Consistent nodal forces of the uniform imperfection line load."""
    q = model.imperfection_q
    l0 = model.elem_length_m
    f_el = np.array([0.0, q * l0 / 2.0, q * l0**2 / 12.0, 0.0, q * l0 / 2.0, -q * l0**2 / 12.0])
    f = np.zeros(model.n_dofs)
    np.add.at(f, _element_indices(model), f_el[None, :])
    return f


def _solve_linear(k_ff: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Banded LU solve; couplings never span more than 5 dofs."""
    n = k_ff.shape[0]
    kl = ku = _HALF_BAND
    ab = np.zeros((kl + ku + 1, n))
    for off in range(-kl, ku + 1):
        diag = np.diagonal(k_ff, offset=off)
        start = max(off, 0)
        ab[ku - off, start : start + diag.size] = diag
    return solve_banded((kl, ku), ab, rhs)


def _is_stable(model: FemModel, k_ff: np.ndarray, u: np.ndarray) -> bool:
    """Accept only equilibria on the physically reachable branch.

    A converged state is rejected if the tangent has a clearly negative
    eigenvalue (a saddle, e.g. the straight configuration past the critical
    temperature) or if the midspan has flipped against the imperfection
    load.  Rejection makes the caller halve the temperature increment, which
    steers the continuation around the buckling knee instead of across it.
    """
    if model.imperfection_q > 0.0:
        # the saddle rides at small NEGATIVE midspan deflection for a +y
        # load; a legitimate state is never negative beyond roundoff
        if u[3 * model.mid_node + 1] < -1e-16 * model.geom.length_m:
            return False
    # rotation dofs are scaled by the element length so every dof carries
    # length units; without this the buckling mode's negative eigenvalue is
    # hidden below factorization roundoff by the meter/radian mismatch
    l0 = model.elem_length_m
    n = k_ff.shape[0]
    d = np.ones(n)
    d[2::3] = l0  # free dofs start on a node boundary: pattern (u, v, theta)
    k_scaled = k_ff * d[:, None] * d[None, :]
    # shift passes knee states that are singular to roundoff but rejects
    # genuinely indefinite (saddle) tangents
    shift = 1e-11 * float(np.abs(np.diagonal(k_scaled)).max())
    try:
        np.linalg.cholesky(k_scaled + shift * np.eye(n))
    except np.linalg.LinAlgError:
        return False
    return True


def _newton(
    model: FemModel,
    u0: np.ndarray,
    E_pa: float,
    G_pa: float,
    thermal_strain: float,
    f_ext: np.ndarray,
    force_ref: float,
    tol_r: float,
    tol_u: float,
    max_newton: int = 25,
):
    """Newton iteration at fixed properties; returns (u, iters, rel_res) or None."""
    free = model.free_slice
    L = model.geom.length_m
    u = u0.copy()
    du_norm = 0.0
    for it in range(max_newton + 1):
        f_int, k_full = _assemble(model, u, E_pa, G_pa, thermal_strain)
        res = f_ext[free] - f_int[free]
        res_norm = float(np.linalg.norm(res))
        if res_norm <= tol_r * force_ref and (it > 0 or res_norm == 0.0) and (
            du_norm <= tol_u * L
        ):
            if not _is_stable(model, k_full[free, free.start : free.stop], u):
                return None
            return u, it, res_norm / force_ref if force_ref > 0.0 else 0.0
        if it == max_newton:
            return None
        try:
            du = _solve_linear(k_full[free, free.start : free.stop], res)
        except (ValueError, np.linalg.LinAlgError):
            return None
        if not np.all(np.isfinite(du)):
            return None
        u[free] += du
        du_norm = float(np.linalg.norm(du))
    return None


def solve_path(
    model: FemModel,
    mat: MaterialModel,
    T_max_c: float,
    n_steps: int = 200,
    tol_r: float = 1e-8,
    tol_u: float = 1e-10,
    mode: str = "tdep",
) -> FemSolutionPath:
    """Temperature ramp from ``mat.T_0_c`` to ``T_max_c``.

    Records one converged equilibrium per grid temperature
    ``T_i = T0 + i (T_max - T0)/n_steps`` (including the ambient state
    ``i = 0``).  Convergence requires both a residual drop below
    ``tol_r * force_ref`` (``force_ref`` is the larger of the thermal load
    E A alpha dT and the total imperfection load) and a Newton update below
    ``tol_u * L``.  A non-converging increment is halved up to 8 times and
    the step size recovers afterwards.

    ``mode='constant'`` freezes properties at T0 instead of the step
    temperature.

    Raises:
        ValidationError: on bad arguments.
        ConvergenceError: if an increment fails at the smallest subdivision;
            the partial path is attached as ``result``.
    """
    T0 = mat.T_0_c
    if T_max_c < T0:
        raise ValidationError(f"T_max_c ({T_max_c!r}) must be >= T_0 ({T0!r})")
    if n_steps < 1:
        raise ValidationError(f"n_steps must be >= 1, got {n_steps!r}")
    if mode not in ("tdep", "constant"):
        raise ValidationError(f"mode must be 'tdep' or 'constant', got {mode!r}")

    A = model.geom.area_m2
    L = model.geom.length_m
    f_ext = external_load(model)
    q_force = model.imperfection_q * L

    def props_at(T: float) -> tuple[float, float, float]:
        T_eval = T0 if mode == "constant" else T
        E = young_modulus(mat, T_eval)
        G = shear_modulus(mat, T_eval)
        alpha = cte(mat, T_eval)
        return E, G, alpha

    def force_ref_at(T: float, E: float, alpha: float) -> float:
        ref = max(E * A * alpha * (T - T0), q_force)
        return ref if ref > 0.0 else 1e-12 * E * A

    if T_max_c == T0:
        grid = [T0]
    else:
        grid = list(T0 + (T_max_c - T0) * np.arange(n_steps + 1) / n_steps)

    u = np.zeros(model.n_dofs)
    steps: list[FemStep] = []

    def record(T: float, u_conv: np.ndarray, iters: int, rel_res: float):
        f_int, _ = _assemble(model, u_conv, *_eg(T))
        reaction = f_int - f_ext
        steps.append(
            FemStep(
                T_c=T,
                gamma_mid_m=float(u_conv[3 * model.mid_node + 1]),
                axial_reaction_n=float(reaction[0]),
                clamp_moment_nm=float(reaction[2]),
                newton_iters=iters,
                residual=rel_res,
                u=u_conv.copy(),
            )
        )

    def _eg(T: float):
        E, G, alpha = props_at(T)
        return E, G, alpha * (T - T0)

    T_cur = T0
    for i, T_target in enumerate(grid):
        span = T_target - T_cur
        if i > 0 and span <= 0.0:
            continue  # duplicated grid point
        inc = span if span > 0.0 else 0.0
        halvings = 0
        total_iters = 0
        last_res = 0.0
        while True:
            T_try = T_target if inc >= (T_target - T_cur) else T_cur + inc
            E, G, alpha = props_at(T_try)
            result = _newton(
                model,
                u,
                E,
                G,
                alpha * (T_try - T0),
                f_ext,
                force_ref_at(T_try, E, alpha),
                tol_r,
                tol_u,
            )
            if result is not None:
                u, iters, last_res = result
                total_iters += iters
                T_cur = T_try
                if T_cur >= T_target:
                    break
                inc *= 2.0
            else:
                halvings += 1
                if halvings > 8:
                    raise ConvergenceError(
                        f"temperature step to {T_try!r} degC failed after "
                        f"{halvings - 1} halvings",
                        result=FemSolutionPath(steps=tuple(steps)),
                    )
                inc *= 0.5
        record(T_target, u, total_iters, last_res)

    return FemSolutionPath(steps=tuple(steps))


def linear_static_check(
    model: FemModel, E_pa: float, load_n: float, nu: float = 0.22
) -> float:
    """Midspan deflection under a transverse midspan point load, linear mode.

    Geometric nonlinearity is disabled (single solve at the undeformed
    tangent); used by verification tests against the closed-form
    ``F L^3/(192 E I) + F L/(4 k_s G A)``.
    """
    G_pa = E_pa / (2.0 * (1.0 + nu))
    free = model.free_slice
    _, k_full = _assemble(model, np.zeros(model.n_dofs), E_pa, G_pa, 0.0)
    rhs = np.zeros(model.n_dofs)
    rhs[3 * model.mid_node + 1] = load_n
    du = _solve_linear(k_full[free, free.start : free.stop], rhs[free])
    u = np.zeros(model.n_dofs)
    u[free] = du
    return float(u[3 * model.mid_node + 1])


def tangent_consistency(
    model: FemModel,
    mat: MaterialModel,
    u: np.ndarray,
    T_c: float,
    step_fraction: float = 1e-7,
) -> float:
    """Max relative mismatch between the assembled tangent and central
    finite differences of the internal force vector, over free dofs.

    The comparison is normalized by the largest finite-difference entry.
    """
    E = young_modulus(mat, T_c)
    G = shear_modulus(mat, T_c)
    strain = cte(mat, T_c) * (T_c - mat.T_0_c)
    free = model.free_slice
    _, k_full = _assemble(model, u, E, G, strain)
    k_a = k_full[free, free.start : free.stop]

    h = step_fraction * model.geom.length_m
    n_free = free.stop - free.start
    k_fd = np.zeros_like(k_a)
    for j in range(n_free):
        up = u.copy()
        up[free.start + j] += h
        um = u.copy()
        um[free.start + j] -= h
        fp, _ = _assemble(model, up, E, G, strain)
        fm, _ = _assemble(model, um, E, G, strain)
        k_fd[:, j] = (fp[free] - fm[free]) / (2.0 * h)
    scale = np.abs(k_fd).max()
    return float(np.abs(k_a - k_fd).max() / scale)


def write_path_csv(path_result: FemSolutionPath, path) -> None:
    """Write the solution path as CSV (17 significant digits, atomic)."""
    rows = [PATH_CSV_HEADER]
    for s in path_result.steps:
        rows.append(
            ",".join(
                [
                    format_float(s.T_c),
                    format_float(s.gamma_mid_m),
                    format_float(s.axial_reaction_n),
                    format_float(s.clamp_moment_nm),
                    str(s.newton_iters),
                    format_float(s.residual),
                ]
            )
        )
    atomic_write_text(path, "\n".join(rows) + "\n")
