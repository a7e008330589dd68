"""Surrogate dynamical models and their stability machinery.

The 1D and 2D models use saturating (Michaelis-Menten style) coupling with
linear damping. This module integrates them, locates equilibria three ways
(printed closed forms, a theta-scaled variant, and a damped-Newton
multistart that serves as the numerical oracle), and provides the
frequency-domain checks: sector bounds for the nonlinearity and a strict
positive-real test for general (A, B, C, M, psi) interconnections.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import Trajectory
from .errors import (
    ConfigError,
    DivergenceError,
    DomainError,
    ScaleError,
    ShapeError,
    SingularityError,
)

logger = logging.getLogger(__name__)

CHI_AUTO_SCAN = (0.0, 0.1, 1.0, 10.0)


@dataclass(frozen=True)
class Model1D:
    """dx/dt = b_lin * x + beta * x^h / (1 + x^h)."""

    b_lin: float
    beta: float
    h: float = 1.0

    def __post_init__(self):
        if self.h <= 0 or not np.isfinite(self.h):
            raise DomainError(f"exponent h must be positive; got {self.h}")


@dataclass(frozen=True)
class Model2D:
    """Coupled topology/feature surrogate:

    dr/dt = -m * r + gamma_r * q^h / (1 + gamma_r * q^h)
    dq/dt = -c * q + gamma_q * r^h / (1 + gamma_q * r^h)
    """

    m: float
    c: float
    gamma_r: float
    gamma_q: float
    h: float = 1.0

    def __post_init__(self):
        if self.m <= 0 or self.c <= 0:
            raise DomainError(
                f"damping must be positive; got m = {self.m}, c = {self.c}"
            )
        if self.gamma_r < 0 or self.gamma_q < 0:
            raise DomainError("coupling gains must be non-negative")
        if self.h <= 0 or not np.isfinite(self.h):
            raise DomainError(f"exponent h must be positive; got {self.h}")


def _saturating(gain, value, h):
    z = gain * value**h
    return z / (1.0 + z)


def rhs_1d(model, x):
    """Right-hand side of the 1D model; the state must be non-negative."""
    if x < 0:
        raise DomainError(f"state must be non-negative; got x = {x}")
    return float(model.b_lin * x + model.beta * _saturating(1.0, x, model.h))


def rhs_2d(model, r, q):
    """Right-hand side of the 2D model; both states must be non-negative."""
    if r < 0 or q < 0:
        raise DomainError(f"states must be non-negative; got r = {r}, q = {q}")
    return _rhs_2d_raw(model, np.array([float(r), float(q)]))


def _rhs_2d_raw(model, y):
    r, q = y
    dr = -model.m * r + _saturating(model.gamma_r, q, model.h)
    dq = -model.c * q + _saturating(model.gamma_q, r, model.h)
    return np.array([dr, dq])


def _rhs_1d_raw(model, y):
    x = y[0]
    return np.array([model.b_lin * x + model.beta * _saturating(1.0, x, model.h)])


def jacobian_2d(model, r, q):
    """Analytic Jacobian of rhs_2d at (r, q)."""
    h = model.h
    # d/dv [g v^h / (1 + g v^h)] = g h v^(h-1) / (1 + g v^h)^2
    d_rq = model.gamma_r * h * q ** (h - 1.0) / (1.0 + model.gamma_r * q**h) ** 2
    d_qr = model.gamma_q * h * r ** (h - 1.0) / (1.0 + model.gamma_q * r**h) ** 2
    return np.array([[-model.m, d_rq], [d_qr, -model.c]])


def integrate(model, initial_state, dt, t_end):
    """Classical fixed-step RK4 trajectory on [0, t_end].

    Stage inputs and committed states are clamped at zero from below (the
    models are only defined on the non-negative orthant); each clamp is a
    logged event. A non-finite state aborts with the time stamp.
    """
    if dt <= 0 or t_end <= 0:
        raise DomainError(f"need dt > 0 and t_end > 0; got dt = {dt}, t_end = {t_end}")
    if isinstance(model, Model1D):
        raw = _rhs_1d_raw
        dim = 1
    elif isinstance(model, Model2D):
        raw = _rhs_2d_raw
        dim = 2
    else:
        raise ConfigError(f"unsupported model type {type(model).__name__}")

    y = np.atleast_1d(np.asarray(initial_state, dtype=float))
    if y.shape != (dim,):
        raise ShapeError(f"initial state must have shape ({dim},); got {y.shape}")
    if (y < 0).any():
        raise DomainError(f"initial state must be non-negative; got {y}")

    n_full = int(math.floor(t_end / dt + 1e-12))
    rem = t_end - n_full * dt
    steps = [dt] * n_full
    if rem > 1e-12 * max(1.0, t_end):
        steps.append(rem)

    def f(state):
        return raw(model, np.maximum(state, 0.0))

    times = [0.0]
    states = [y.copy()]
    t = 0.0
    clamped = 0
    for step in steps:
        k1 = f(y)
        k2 = f(y + 0.5 * step * k1)
        k3 = f(y + 0.5 * step * k2)
        k4 = f(y + step * k3)
        y = y + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += step
        if not np.isfinite(y).all():
            raise DivergenceError(t)
        if (y < 0).any():
            clamped += 1
            logger.debug("integrate: clamped negative state at t = %.6g", t)
            y = np.maximum(y, 0.0)
        times.append(t)
        states.append(y.copy())
    if clamped:
        logger.info("integrate: clamped %d step(s) at the zero boundary", clamped)
    return Trajectory(times=np.array(times), states=np.array(states))


# ---------------------------------------------------------------------------
# equilibria


def equilibrium_closed_form(model):
    """Printed closed-form equilibrium (r*, q*) of the h = 1 model.

    Raises SingularityError naming the factor when a denominator vanishes.
    These expressions are kept exactly as printed; the numeric multistart
    solver below is the ground truth they can be compared against.
    """
    if model.h != 1.0:
        raise DomainError("closed form is stated for h = 1 only")
    m, c = model.m, model.c
    gr, gq = model.gamma_r, model.gamma_q
    num = gr * gq + m * c
    if c - gr == 0.0:
        raise SingularityError("c - gamma_r")
    if gq == 0.0:
        raise SingularityError("gamma_q")
    if gr == 0.0:
        raise SingularityError("gamma_r")
    r_star = num / (-m * (c - gr) * gq)
    q_star = num / (c * (-m - gq) * gr)
    return float(r_star), float(q_star)


def equilibrium_theta(model, theta):
    """Theta-scaled closed-form feature equilibrium q*.

    At theta = 1 this coincides with the r-component of
    equilibrium_closed_form wherever both are defined.
    """
    if model.h != 1.0:
        raise DomainError("closed form is stated for h = 1 only")
    if theta <= 0 or not np.isfinite(theta):
        raise DomainError(f"theta must be positive; got {theta}")
    m, c = model.m, model.c
    gr, gq = model.gamma_r, model.gamma_q
    if c - gr == 0.0:
        raise SingularityError("c - gamma_r")
    if gq == 0.0:
        raise SingularityError("gamma_q")
    return float((gr * gq + m * c) / (-theta * m * (c - gr) * gq))


@dataclass(frozen=True)
class Root:
    """One equilibrium of the 2D model with its local stability label."""

    r: float
    q: float
    stable: bool


def _newton_2d(model, start, tol, max_iter=100, max_halvings=40):
    y = np.asarray(start, dtype=float).copy()
    fy = _rhs_2d_raw(model, y)
    if not np.isfinite(fy).all():
        return None
    for _ in range(max_iter):
        res = np.abs(fy).max()
        if res < tol:
            return y
        jac = jacobian_2d(model, y[0], y[1])
        if not np.isfinite(jac).all():
            return None
        try:
            delta = np.linalg.solve(jac, -fy)
        except np.linalg.LinAlgError:
            return None
        lam = 1.0
        for _ in range(max_halvings):
            cand = y + lam * delta
            fc = _rhs_2d_raw(model, cand)
            if np.isfinite(fc).all() and np.abs(fc).max() < res:
                y, fy = cand, fc
                break
            lam *= 0.5
        else:
            return None  # no damped step improved the residual
    return None


def equilibrium_numeric(model, multistart_count=49, tol=1e-10):
    """All equilibria found by damped Newton from a deterministic start grid.

    Starts form a g x g lattice over [0, 10]^2 with g = round(sqrt(count)).
    Converged points outside the non-negative orthant are discarded; the
    rest are deduplicated (max-norm radius 1e-4), re-verified against tol,
    and labeled stable iff every Jacobian eigenvalue has negative real part.
    """
    if multistart_count < 4:
        raise ConfigError("multistart_count must be at least 4")
    g = max(2, int(round(math.sqrt(multistart_count))))
    axis = np.linspace(0.0, 10.0, g)
    roots = []
    for r0 in axis:
        for q0 in axis:
            y = _newton_2d(model, (r0, q0), tol)
            if y is None:
                continue
            if y.min() < -1e-8:
                continue
            y = np.maximum(y, 0.0)
            if np.abs(_rhs_2d_raw(model, y)).max() >= tol:
                continue
            if not any(np.abs(y - z).max() <= 1e-4 for z in roots):
                roots.append(y)
    out = []
    for y in sorted(roots, key=lambda z: (z[0], z[1])):
        eigs = np.linalg.eigvals(jacobian_2d(model, y[0], y[1]))
        out.append(Root(r=float(y[0]), q=float(y[1]), stable=bool(eigs.real.max() < 0)))
    return tuple(out)


# ---------------------------------------------------------------------------
# sector bounds


def boundary_k(h, x_max=10.0, grid_points=10001):
    """Supremum over x > 0 of x^(h-1) / (1 + x^h) for h >= 1.

    Grid scan plus local ternary refinement, with the x -> 0+ limit handled
    analytically (it dominates at h = 1). For h < 1 the ratio is unbounded.
    """
    if not np.isfinite(h):
        raise DomainError("h must be finite")
    if h < 1.0:
        raise DomainError(
            "unsupported exponent: the ratio is unbounded as x -> 0 for h < 1"
        )
    if grid_points < 1000:
        raise ConfigError("grid_points must be at least 1000")
    if x_max <= 0:
        raise ConfigError("x_max must be positive")

    def ratio(x):
        return x ** (h - 1.0) / (1.0 + x**h)

    limit_zero = 1.0 if h == 1.0 else 0.0
    xs = np.linspace(x_max / grid_points, x_max, grid_points)
    vals = xs ** (h - 1.0) / (1.0 + xs**h)
    i = int(np.argmax(vals))
    lo = xs[max(i - 1, 0)]
    hi = xs[min(i + 1, grid_points - 1)]
    for _ in range(200):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if ratio(m1) < ratio(m2):
            lo = m1
        else:
            hi = m2
    refined = ratio(0.5 * (lo + hi))
    return float(max(limit_zero, vals[i], refined))


@dataclass(frozen=True)
class SectorBound:
    """Admissible sector gains for the two channels at a given theta.

    k_r_min * k_q_min is exactly 1.0 (the fields are nudged by at most a
    couple of ulps from 1/theta and theta so the identity holds in floats).
    sup_ratio is the saturating nonlinearity's boundary constant.
    """

    theta: float
    k_r_min: float
    k_q_min: float
    sup_ratio: float


def _exact_reciprocal_pair(theta):
    # find (kr, kq) with kr*kq == 1.0 exactly, each within ~2 ulp of (1/theta, theta)
    kq_cands = [theta]
    up = down = theta
    for _ in range(3):
        up = math.nextafter(up, math.inf)
        down = math.nextafter(down, -math.inf)
        kq_cands.extend((up, down))
    for kq in kq_cands:
        kr = 1.0 / kq
        if kr * kq == 1.0:
            return kr, kq
        hi = lo = kr
        for _ in range(3):
            hi = math.nextafter(hi, math.inf)
            lo = math.nextafter(lo, -math.inf)
            if hi * kq == 1.0:
                return hi, kq
            if lo * kq == 1.0:
                return lo, kq
    logger.warning("sector_intervals: no exact reciprocal pair near theta = %r", theta)
    return 1.0 / theta, theta


def sector_intervals(theta, h=1.0):
    """Minimum admissible sector gains: k_r in [1/theta, inf), k_q in [theta, inf)."""
    if theta <= 0 or not np.isfinite(theta):
        raise DomainError(f"theta must be positive and finite; got {theta}")
    k_r_min, k_q_min = _exact_reciprocal_pair(float(theta))
    return SectorBound(
        theta=float(theta),
        k_r_min=k_r_min,
        k_q_min=k_q_min,
        sup_ratio=boundary_k(h),
    )


# ---------------------------------------------------------------------------
# strict positive-real checks


@dataclass(frozen=True)
class SprResult:
    """Strict-positivity verdict over a frequency grid.

    witness_omega is the first failing frequency (math.inf when only the
    high-frequency limit fails); None when the check passes.
    """

    positive: bool
    witness_omega: float | None


def spr_check_1d(m_or_c, gamma, k, chi, omega_grid):
    """Evaluate 2/k + 2*gamma*(m + chi*w^2) / (m^2 + w^2) on a grid.

    Returns strict positivity of the expression at every grid frequency and
    at the w -> infinity limit (2/k + 2*gamma*chi). gamma may be any real:
    negative gains are exactly the interesting probes.
    """
    if m_or_c <= 0:
        raise DomainError(f"damping must be positive; got {m_or_c}")
    if k <= 0:
        raise DomainError(f"sector gain must be positive; got {k}")
    omega = np.asarray(omega_grid, dtype=float)
    if omega.size == 0:
        raise ConfigError("omega_grid must be non-empty")
    if not np.isfinite(omega).all() or (omega < 0).any():
        raise DomainError("omega_grid must be finite and non-negative")
    vals = 2.0 / k + 2.0 * gamma * (m_or_c + chi * omega**2) / (m_or_c**2 + omega**2)
    bad = np.flatnonzero(~(vals > 0.0))
    if bad.size:
        return SprResult(positive=False, witness_omega=float(omega[bad[0]]))
    if not 2.0 / k + 2.0 * gamma * chi > 0.0:
        return SprResult(positive=False, witness_omega=math.inf)
    return SprResult(positive=True, witness_omega=None)


@dataclass(frozen=True)
class GeneralSystem:
    """Interconnection data (A, B, C, M, psi) for the matrix SPR test.

    a_mat is n x n, b_mat n x p, c_mat p x n; m_diag and psi_diag hold the
    diagonal entries of M (positive) and psi (non-negative).
    """

    a_mat: np.ndarray
    b_mat: np.ndarray
    c_mat: np.ndarray
    m_diag: np.ndarray
    psi_diag: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a_mat, dtype=float)
        b = np.asarray(self.b_mat, dtype=float)
        c = np.asarray(self.c_mat, dtype=float)
        m = np.asarray(self.m_diag, dtype=float)
        psi = np.asarray(self.psi_diag, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ShapeError(f"a_mat must be square; got {a.shape}")
        n = a.shape[0]
        if b.ndim != 2 or b.shape[0] != n:
            raise ShapeError(f"b_mat must be ({n}, p); got {b.shape}")
        p = b.shape[1]
        if c.shape != (p, n):
            raise ShapeError(f"c_mat must be ({p}, {n}); got {c.shape}")
        if m.shape != (p,) or psi.shape != (p,):
            raise ShapeError(f"m_diag and psi_diag must have shape ({p},)")
        if (m <= 0).any():
            raise DomainError("m_diag entries must be positive")
        if (psi < 0).any():
            raise DomainError("psi_diag entries must be non-negative")
        for name, arr in (("a_mat", a), ("b_mat", b), ("c_mat", c),
                          ("m_diag", m), ("psi_diag", psi)):
            if not np.isfinite(arr).all():
                raise ShapeError(f"{name} contains non-finite values")
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def n(self):
        return self.a_mat.shape[0]

    @property
    def p(self):
        return self.b_mat.shape[1]


@dataclass(frozen=True)
class StabilityVerdict:
    """Outcome of theorem1_check; overall is the conjunction."""

    hurwitz: bool
    eigen_condition: bool
    spr: bool
    spr_witness: float | None
    chi_used: tuple

    @property
    def overall(self):
        return self.hurwitz and self.eigen_condition and self.spr


def _min_hermitian_eig(t_mat):
    herm = 0.5 * (t_mat + t_mat.conj().T)
    return float(np.linalg.eigvalsh(herm).min())


def _spr_scan(system, psi, omega_points):
    """Positive definiteness of the Hermitian part of
    M + (I + jw*psi) C (jwI - A)^{-1} B over a log grid plus both limits."""
    a, b, c = system.a_mat, system.b_mat, system.c_mat
    m_mat = np.diag(system.m_diag)
    psi_mat = np.diag(psi)
    eye_p = np.eye(system.p)
    eye_n = np.eye(system.n)

    # w -> 0 limit: M - C A^{-1} B (skipped if A is singular)
    try:
        t0 = m_mat - c @ np.linalg.solve(a, b)
        if _min_hermitian_eig(t0) <= 0.0:
            return False, 0.0
    except np.linalg.LinAlgError:
        logger.warning("theorem1_check: A singular; skipping the w -> 0 limit")

    for omega in np.logspace(-3.0, 3.0, omega_points):
        jw = 1j * omega
        try:
            resolvent = np.linalg.solve(jw * eye_n - a, b)
        except np.linalg.LinAlgError:
            logger.warning(
                "theorem1_check: resolvent singular at w = %.6g; skipped", omega
            )
            continue
        t = m_mat + (eye_p + jw * psi_mat) @ c @ resolvent
        if _min_hermitian_eig(t) <= 0.0:
            return False, float(omega)

    # w -> infinity limit: M + psi C B
    t_inf = m_mat + psi_mat @ c @ b
    if _min_hermitian_eig(t_inf) <= 0.0:
        return False, math.inf
    return True, None


def theorem1_check(system, omega_points=200, eigen_tol=1e-9, auto_chi=False):
    """Three-part interconnection stability check.

    hurwitz: all eigenvalues of A strictly in the left half-plane.
    eigen_condition: |1 + lambda_k * chi_i| > eigen_tol for all pairs.
    spr: the transfer Hermitian part is positive definite on the scanned
    grid and at both frequency limits.

    With auto_chi the multiplier diagonal is swept over uniform values
    {0, 0.1, 1, 10} and the first fully passing verdict wins.
    """
    if system.n > 50:
        raise ScaleError(f"dense check limited to n <= 50; got n = {system.n}")
    if omega_points < 2:
        raise ConfigError("omega_points must be at least 2")

    eigs = np.linalg.eigvals(system.a_mat)
    hurwitz = bool(eigs.real.max() < 0.0)

    def verdict_for(psi):
        eigen_ok = bool(
            (np.abs(1.0 + np.outer(eigs, psi)) > eigen_tol).all()
        )
        spr_ok, witness = _spr_scan(system, psi, omega_points)
        return StabilityVerdict(
            hurwitz=hurwitz,
            eigen_condition=eigen_ok,
            spr=spr_ok,
            spr_witness=witness,
            chi_used=tuple(float(x) for x in psi),
        )

    if not auto_chi:
        return verdict_for(system.psi_diag)
    last = None
    for chi in CHI_AUTO_SCAN:
        last = verdict_for(np.full(system.p, chi))
        if last.overall:
            return last
    return last


# ---------------------------------------------------------------------------
# equilibrium surfaces


@dataclass(frozen=True)
class SurfaceRow:
    """One (gamma_r, gamma_q) cell of an equilibrium surface."""

    gamma_r: float
    gamma_q: float
    r_star: float
    q_star: float
    status: str


def _validate_grid(name, grid):
    arr = np.asarray(grid, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ConfigError(f"{name} must be a non-empty 1D grid")
    if not np.isfinite(arr).all():
        raise ConfigError(f"{name} contains non-finite values")
    if arr.size > 1 and not (np.diff(arr) > 0).all():
        raise ConfigError(f"{name} must be strictly ascending")
    return arr

def surface_sweep(m, c, gamma_r_grid, gamma_q_grid, theta=1.0, mode="closed_form",
                  h=1.0):
    """Equilibrium surface over a (gamma_r, gamma_q) product grid.

    closed_form rows use the printed expressions (theta scales the feature
    component); numeric rows report the stable strictly-positive root of the
    multistart solver, falling back to the origin with a flag. Problem cells
    are flagged in `status`, never dropped.
    """
    if mode not in ("closed_form", "numeric"):
        raise ConfigError(f"mode must be closed_form or numeric; got {mode!r}")
    grs = _validate_grid("gamma_r_grid", gamma_r_grid)
    gqs = _validate_grid("gamma_q_grid", gamma_q_grid)
    rows = []
    for gr in grs:
        for gq in gqs:
            model = Model2D(m=m, c=c, gamma_r=float(gr), gamma_q=float(gq), h=h)
            if mode == "closed_form":
                try:
                    r_star = equilibrium_closed_form(model)[0]
                    q_star = equilibrium_theta(model, theta)
                    status = "ok"
                except SingularityError:
                    r_star = q_star = math.nan
                    status = "singular"
            else:
                stable_pos = [
                    root
                    for root in equilibrium_numeric(model)
                    if root.stable and root.r > 1e-8 and root.q > 1e-8
                ]
                if stable_pos:
                    best = max(stable_pos, key=lambda z: z.r + z.q)
                    r_star, q_star, status = best.r, best.q, "ok"
                else:
                    r_star = q_star = 0.0
                    status = "origin"
            rows.append(
                SurfaceRow(
                    gamma_r=float(gr),
                    gamma_q=float(gq),
                    r_star=float(r_star),
                    q_star=float(q_star),
                    status=status,
                )
            )
    return rows
