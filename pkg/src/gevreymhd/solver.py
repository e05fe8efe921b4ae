"""Time integration of ideal incompressible MHD with on-line diagnostics.

The primitive pair (u, h) is evolved with classical RK4; the nonlinear terms
are evaluated pseudo-spectrally, Leray-projected and dealiased every stage.
The vorticity/current pair and its evolution equation are available as
diagnostics, and the run loop feeds the analyticity-radius tracker.
"""

from dataclasses import dataclass, field

import numpy as np

from .norms import GevreyParams, NormRecord, RadiusFitError, fit_radius, state_norms, sup_gradient
from .operators import advect, biot_savart, curl, gradient_physical, inner_l2
from .radius import RadiusModel, integrate_radius, radius_lower_bound
from .spectral import (
    MHDState,
    SpectralField,
    dealias,
    from_physical,
    leray_project,
    to_physical,
)


class StepError(RuntimeError):
    """Non-finite values appeared during a time step."""


@dataclass
class Tendency:
    """Time derivatives of a pair of fields (primitive or curled form)."""

    du: SpectralField
    dh: SpectralField


@dataclass
class DiagnosticsRecord:
    """One row of run diagnostics at time t."""

    t: float
    energy: float
    cross_helicity: float
    bkm_integrand: float
    grad_sum: float
    norms: NormRecord
    tau: float
    tau_fit: float
    tau_lower: float


@dataclass
class RunResult:
    records: list
    state: MHDState
    status: str  # "completed" | "blow-up" | "radius-collapse"
    model: RadiusModel | None = None


def _nonlinear(state: MHDState):
    """Physical-space evaluation of (u.grad)u - (h.grad)h and (u.grad)h - (h.grad)u.

    Shares the transforms of u, h and their gradients across the four
    advection terms; returns the two spectral, dealiased products.
    """
    grid = state.grid
    uphys = to_physical(state.u)
    hphys = to_physical(state.h)
    gradu = gradient_physical(state.u)
    gradh = gradient_physical(state.h)
    adv_uu = np.einsum("mxyz,mcxyz->cxyz", uphys, gradu)
    adv_hh = np.einsum("mxyz,mcxyz->cxyz", hphys, gradh)
    adv_uh = np.einsum("mxyz,mcxyz->cxyz", uphys, gradh)
    adv_hu = np.einsum("mxyz,mcxyz->cxyz", hphys, gradu)
    nlu = dealias(from_physical(grid, adv_uu - adv_hh))
    nlh = dealias(from_physical(grid, adv_uh - adv_hu))
    return nlu, nlh


def rhs_primitive(state: MHDState) -> Tendency:
    """du = -P[(u.grad)u - (h.grad)h], dh = -P[(u.grad)h - (h.grad)u]."""
    nlu, nlh = _nonlinear(state)
    du = leray_project(nlu)
    dh = leray_project(nlh)
    du.coeffs *= -1.0
    dh.coeffs *= -1.0
    return Tendency(du, dh)


def rhs_curl(state: MHDState) -> Tendency:
    """Tendency of the vorticity/current pair, evaluated term by term.

    d omega = -(u.grad)omega + (h.grad)J + (omega.grad)u - (J.grad)h
    d J     = -(u.grad)J + (h.grad)omega + (omega.grad)h - (J.grad)u
    """
    omega = curl(state.u)
    current = curl(state.h)
    u, h = state.u, state.h
    domega = SpectralField(
        state.grid,
        -advect(u, omega).coeffs + advect(h, current).coeffs
        + advect(omega, u).coeffs - advect(current, h).coeffs,
    )
    dcurrent = SpectralField(
        state.grid,
        -advect(u, current).coeffs + advect(h, omega).coeffs
        + advect(omega, h).coeffs - advect(current, u).coeffs,
    )
    return Tendency(domega, dcurrent)


def cross_gradient_curl_term(u: SpectralField, h: SpectralField) -> SpectralField:
    """The gradient-coupling part of the curl of the induction nonlinearity.

    curl((a.grad)b) = (a.grad)(curl b) + E(a, b) with
    E(a, b)_i = eps_{ijk} d_j a_l d_l b_k; this returns the spectral,
    dealiased E(u, h) - E(h, u).
    """
    gu = gradient_physical(u)
    gh = gradient_physical(h)
    # gradient_physical[m, c] = d_m of component c, so d_j u_l = gu[j, l]
    # and d_l h_k = gh[:, k] contracted over the leading axis l.
    n = u.grid.n
    e_uh = np.empty((3, n, n, n))
    e_hu = np.empty((3, n, n, n))
    for i, (j, k) in enumerate(((1, 2), (2, 0), (0, 1))):
        e_uh[i] = (np.einsum("lxyz,lxyz->xyz", gu[j], gh[:, k])
                   - np.einsum("lxyz,lxyz->xyz", gu[k], gh[:, j]))
        e_hu[i] = (np.einsum("lxyz,lxyz->xyz", gh[j], gu[:, k])
                   - np.einsum("lxyz,lxyz->xyz", gh[k], gu[:, j]))
    return dealias(from_physical(u.grid, e_uh - e_hu))


def rhs_curl_pair(omega: SpectralField, current: SpectralField) -> Tendency:
    """Tendency of a prognostic vorticity/current pair.

    The transporting fields are recovered by curl inversion of the
    divergence-free parts of the pair; the pair itself is not projected, so
    this closes the vorticity/current system as stated, whose current
    tendency carries a gradient part.
    """
    u = biot_savart(leray_project(omega))
    h = biot_savart(leray_project(current))
    domega = SpectralField(
        omega.grid,
        -advect(u, omega).coeffs + advect(h, current).coeffs
        + advect(omega, u).coeffs - advect(current, h).coeffs,
    )
    dcurrent = SpectralField(
        omega.grid,
        -advect(u, current).coeffs + advect(h, omega).coeffs
        + advect(omega, h).coeffs - advect(current, u).coeffs,
    )
    return Tendency(domega, dcurrent)


def step_rk4_curl(omega: SpectralField, current: SpectralField,
                  dt: float) -> tuple:
    """One RK4 step of the prognostic vorticity/current system."""
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    w0, j0 = omega.coeffs, current.coeffs
    grid = omega.grid

    def stage(wc, jc):
        tend = rhs_curl_pair(
            SpectralField(grid, wc), SpectralField(grid, jc)
        )
        if not (np.all(np.isfinite(tend.du.coeffs))
                and np.all(np.isfinite(tend.dh.coeffs))):
            raise StepError(f"non-finite curl-pair tendency (dt={dt:.3g})")
        return tend

    k1 = stage(w0, j0)
    k2 = stage(w0 + 0.5 * dt * k1.du.coeffs, j0 + 0.5 * dt * k1.dh.coeffs)
    k3 = stage(w0 + 0.5 * dt * k2.du.coeffs, j0 + 0.5 * dt * k2.dh.coeffs)
    k4 = stage(w0 + dt * k3.du.coeffs, j0 + dt * k3.dh.coeffs)
    wnew = w0 + dt / 6.0 * (k1.du.coeffs + 2 * k2.du.coeffs
                            + 2 * k3.du.coeffs + k4.du.coeffs)
    jnew = j0 + dt / 6.0 * (k1.dh.coeffs + 2 * k2.dh.coeffs
                            + 2 * k3.dh.coeffs + k4.dh.coeffs)
    return (dealias(SpectralField(grid, wnew)),
            dealias(SpectralField(grid, jnew)))


def cfl_timestep(state: MHDState, cfl: float = 0.5) -> float:
    """dt = cfl * dx / max(|u| + |h|) at collocation points."""
    speed = np.max(
        np.linalg.norm(to_physical(state.u), axis=0)
        + np.linalg.norm(to_physical(state.h), axis=0)
    )
    if speed == 0.0:
        return np.inf
    return float(cfl * state.grid.spacing / speed)


def step_rk4(state: MHDState, dt: float) -> MHDState:
    """Classical 4-stage explicit step; output re-projected and dealiased."""
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    u0, h0 = state.u.coeffs, state.h.coeffs

    def stage(uc, hc, t):
        st = MHDState(
            SpectralField(state.grid, uc), SpectralField(state.grid, hc), t
        )
        tend = rhs_primitive(st)
        if not (np.all(np.isfinite(tend.du.coeffs))
                and np.all(np.isfinite(tend.dh.coeffs))):
            raise StepError(
                f"non-finite tendency at t={t:.6g} (dt={dt:.3g})"
            )
        return tend

    k1 = stage(u0, h0, state.t)
    k2 = stage(u0 + 0.5 * dt * k1.du.coeffs, h0 + 0.5 * dt * k1.dh.coeffs,
               state.t + 0.5 * dt)
    k3 = stage(u0 + 0.5 * dt * k2.du.coeffs, h0 + 0.5 * dt * k2.dh.coeffs,
               state.t + 0.5 * dt)
    k4 = stage(u0 + dt * k3.du.coeffs, h0 + dt * k3.dh.coeffs, state.t + dt)
    unew = u0 + dt / 6.0 * (k1.du.coeffs + 2 * k2.du.coeffs
                            + 2 * k3.du.coeffs + k4.du.coeffs)
    hnew = h0 + dt / 6.0 * (k1.dh.coeffs + 2 * k2.dh.coeffs
                            + 2 * k3.dh.coeffs + k4.dh.coeffs)
    u = dealias(leray_project(SpectralField(state.grid, unew)))
    h = dealias(leray_project(SpectralField(state.grid, hnew)))
    return MHDState(u, h, state.t + dt)


def energy(state: MHDState) -> float:
    return 0.5 * (inner_l2(state.u, state.u) + inner_l2(state.h, state.h))


def cross_helicity(state: MHDState) -> float:
    return inner_l2(state.u, state.h)


def _sample_diagnostics(state: MHDState, params: GevreyParams,
                        fit_s: float) -> tuple:
    omega = curl(state.u)
    current = curl(state.h)
    grad_u = sup_gradient(state.u)
    grad_h = sup_gradient(state.h)
    norms = state_norms(omega, current, params, grad_u, grad_h)
    omega_sup = float(np.max(np.linalg.norm(to_physical(omega), axis=0)))
    current_sup = float(np.max(np.linalg.norm(to_physical(current), axis=0)))
    try:
        tau_fit = fit_radius(_pair_max_field(omega, current), fit_s)
    except RadiusFitError:
        tau_fit = float("nan")
    return norms, omega_sup + current_sup, grad_u + grad_h, tau_fit


def _pair_max_field(omega: SpectralField, current: SpectralField) -> SpectralField:
    """Mode-wise max-amplitude envelope of the pair, for radius fitting."""
    amp = np.maximum(np.abs(omega.coeffs), np.abs(current.coeffs))
    return SpectralField(omega.grid, amp.astype(np.complex128))


def recompute_radius(records: list, model: RadiusModel) -> list:
    """Re-run the radius tracking over recorded diagnostics with new constants.

    Returns records with tau and tau_lower replaced; the PDE diagnostics are
    untouched.  Useful after fitting the constants from a completed run.
    """
    from .radius import RadiusCollapse, cumulative_integral, gronwall_majorant

    times = [rec.t for rec in records]
    grad_sums = [rec.grad_sum for rec in records]
    hr_series = [rec.norms.hr for rec in records]
    model.populate_from_initial(hr_series[0], records[0].norms.x_norm)
    integral = cumulative_integral(times, grad_sums)
    majorant = gronwall_majorant(times, hr_series, integral, model.C,
                                 model.tau0, records[0].norms.x_norm)
    a_series = model.C * np.asarray(grad_sums)
    b_series = model.C * (np.asarray(hr_series) + majorant)
    try:
        tau_series = integrate_radius(times, a_series, b_series, model.tau0)
    except RadiusCollapse:
        tau_series = np.full(len(times), 1e-300)
        tau_series[0] = model.tau0
    out = []
    for i, rec in enumerate(records):
        out.append(DiagnosticsRecord(
            t=rec.t, energy=rec.energy, cross_helicity=rec.cross_helicity,
            bkm_integrand=rec.bkm_integrand, grad_sum=rec.grad_sum,
            norms=rec.norms, tau=float(tau_series[i]), tau_fit=rec.tau_fit,
            tau_lower=radius_lower_bound(rec.t - times[0], model,
                                         float(integral[i])),
        ))
    return out


def run(state: MHDState, *, params: GevreyParams, t_end: float,
        dt: float | None = None, cfl: float | None = None,
        cadence: int = 1, model: RadiusModel | None = None,
        blowup_factor: float = 1e6) -> RunResult:
    """Step until t_end, sampling diagnostics every `cadence` steps.

    The radius tracker advances at the same cadence using the measured
    gradient sup-norms, Sobolev norm and Gronwall majorant.  The run aborts
    with status "blow-up" when the continuation-criterion integrand grows by
    more than blowup_factor from its initial value.
    """
    if (dt is None) == (cfl is None):
        raise ValueError("exactly one of dt and cfl must be given")
    params.warn_if_subcritical()
    if model is None:
        model = RadiusModel(tau0=params.tau if params.tau > 0 else 1.0)
    fit_s = params.s

    records: list[DiagnosticsRecord] = []
    times = [state.t]
    grad_sums = []
    hr_series = []
    taus = [model.tau0]

    norms, bkm, grad_sum, tau_fit = _sample_diagnostics(state, params, fit_s)
    model.populate_from_initial(norms.hr, norms.x_norm)
    grad_sums.append(grad_sum)
    hr_series.append(norms.hr)
    bkm0 = max(bkm, 1e-300)
    records.append(DiagnosticsRecord(
        t=state.t, energy=energy(state), cross_helicity=cross_helicity(state),
        bkm_integrand=bkm, grad_sum=grad_sum, norms=norms,
        tau=model.tau0, tau_fit=tau_fit, tau_lower=model.tau0,
    ))

    status = "completed"
    from .radius import cumulative_integral, gronwall_majorant, RadiusCollapse

    step_dt = dt if dt is not None else min(cfl_timestep(state, cfl), t_end)
    steps_done = 0
    while state.t < t_end - 1e-12 * max(t_end, 1.0):
        if cfl is not None:
            step_dt = min(cfl_timestep(state, cfl), t_end - state.t)
        else:
            step_dt = min(dt, t_end - state.t)
        state = step_rk4(state, step_dt)
        steps_done += 1
        if steps_done % cadence != 0 and state.t < t_end - 1e-12:
            continue

        norms, bkm, grad_sum, tau_fit = _sample_diagnostics(state, params, fit_s)
        times.append(state.t)
        grad_sums.append(grad_sum)
        hr_series.append(norms.hr)
        integral = cumulative_integral(times, grad_sums)
        majorant = gronwall_majorant(
            times, hr_series, integral, model.C, model.tau0,
            records[0].norms.x_norm,
        )
        a_series = model.C * np.asarray(grad_sums)
        b_series = model.C * (np.asarray(hr_series) + majorant)
        try:
            tau_series = integrate_radius(times, a_series, b_series, model.tau0)
        except RadiusCollapse:
            status = "radius-collapse"
            tau_series = np.concatenate([taus, [1e-300]])
        tau_now = float(tau_series[-1])
        taus.append(tau_now)
        records.append(DiagnosticsRecord(
            t=state.t, energy=energy(state),
            cross_helicity=cross_helicity(state),
            bkm_integrand=bkm, grad_sum=grad_sum, norms=norms,
            tau=tau_now, tau_fit=tau_fit,
            tau_lower=radius_lower_bound(state.t - times[0], model,
                                         float(integral[-1])),
        ))
        if status == "radius-collapse":
            break
        if bkm > blowup_factor * bkm0:
            status = "blow-up"
            break
    return RunResult(records, state, status, model)
