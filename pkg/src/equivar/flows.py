"""Numerical flows of equivariant fields and gauge-based reconstruction.

On representations the field integrates directly. On a bundle local model
the skew-product representative system is integrated: the slice coordinate
follows the vertical (projected) part while the group representative
follows the left-translated horizontal part,

    v' = w(v),        g' = TL_g(xi_q(v)),

which is exactly the normal-form split of the field's tangent value.

Reconstruction: for isomorphic fields Y = X + d(psi), the flow of Y is
F(tau) . flow_X(tau) where F solves the left-translated group ODE driven by
psi along the base flow; both are co-integrated in one Runge-Kutta pass.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.integrate import solve_ivp

from . import groups
from .actions import BundlePoint, act, orbit_distance
from .errors import ChartExit, StepLimitExceeded
from .fields import EquivariantField, GaugeTransform, gauge_act
from .groups import exp_group, hat
from .scenarios import Scenario

CHART_RADIUS = 1e6


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk4"  # "rk4" | "rk45"
    dt: float = 1e-3
    t_span: tuple[float, float] = (0.0, 1.0)
    rtol: float = 1e-9
    atol: float = 1e-12
    max_steps: int = 2_000_000
    reorthonormalize_every: int = 100

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if not np.all(np.isfinite(self.t_span)):
            raise ValueError("t_span must be finite")


@dataclass
class FlowResult:
    times: np.ndarray
    states: list
    chart_exit: bool = False
    diagnostics: dict = dc_field(default_factory=dict)


@dataclass
class ReconstructionResult:
    base_flow: FlowResult
    group_curve: list
    reconstructed: list
    direct: FlowResult
    defect: float


# ---------------------------------------------------------------------------
# state packing


def _pack(scenario: Scenario, m):
    if not scenario.is_bundle:
        return np.asarray(m, float).copy()
    if scenario.space.group.kind == "so3":
        return np.concatenate([np.asarray(m.g, float).ravel(), m.v])
    return np.concatenate([np.asarray(m.g, float), m.v])


def _unpack(scenario: Scenario, state: np.ndarray):
    if not scenario.is_bundle:
        return state.copy()
    if scenario.space.group.kind == "so3":
        return BundlePoint(state[:9].reshape(3, 3).copy(), state[9:].copy())
    ng = scenario.space.group.dim_algebra
    return BundlePoint(state[:ng].copy(), state[ng:].copy())


def _state_derivative(scenario: Scenario, x: EquivariantField, lam: float):
    if not scenario.is_bundle:
        ev = x.evaluate
        return lambda state: ev(state, lam)
    split = groups.default_splitting(scenario.space.group)
    dq = split.dim_comp
    ev = x.evaluate
    group = scenario.space.group
    if group.kind == "so3":

        def deriv(state):
            p = BundlePoint(state[:9].reshape(3, 3), state[9:])
            tv = ev(p, lam)
            xi = split.comp_from_coords(tv[:dq])
            gdot = p.g @ hat(xi)
            return np.concatenate([gdot.ravel(), tv[dq:]])

        return deriv

    ng = group.dim_algebra

    def deriv(state):
        p = BundlePoint(state[:ng], state[ng:])
        tv = ev(p, lam)
        xi = split.comp_from_coords(tv[:dq])
        return np.concatenate([xi, tv[dq:]])

    return deriv


def _renormalize(scenario: Scenario, state: np.ndarray) -> np.ndarray:
    """Project the group part back onto the group (SO(3) representative drift)."""
    if scenario.is_bundle and scenario.space.group.kind == "so3":
        g = state[:9].reshape(3, 3)
        u, _, vt = np.linalg.svd(g)
        state = state.copy()
        state[:9] = (u @ vt).ravel()
    return state


# ---------------------------------------------------------------------------
# integrators


def _rk4_run(deriv, y0: np.ndarray, cfg: IntegratorConfig, renorm=None):
    t0, t1 = cfg.t_span
    n_steps = max(1, int(round((t1 - t0) / cfg.dt)))
    if n_steps > cfg.max_steps:
        raise StepLimitExceeded(f"{n_steps} steps exceed the limit {cfg.max_steps}")
    dt = (t1 - t0) / n_steps
    times = [t0]
    states = [y0.copy()]
    y = y0.copy()
    t = t0
    exited = False
    for k in range(n_steps):
        k1 = deriv(y)
        k2 = deriv(y + 0.5 * dt * k1)
        k3 = deriv(y + 0.5 * dt * k2)
        k4 = deriv(y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = t0 + (k + 1) * dt
        if renorm is not None and (k + 1) % cfg.reorthonormalize_every == 0:
            y = renorm(y)
        if not np.all(np.isfinite(y)) or np.linalg.norm(y) > CHART_RADIUS:
            exited = True
            break
        times.append(t)
        states.append(y.copy())
    return np.array(times), states, exited


def integrate(x: EquivariantField, m0, cfg: IntegratorConfig,
              lam: float = 0.0) -> FlowResult:
    """Integrate the field from m0 over the configured time span."""
    scenario = x.scenario
    deriv = _state_derivative(scenario, x, lam)
    y0 = _pack(scenario, m0)
    if cfg.method == "rk4":
        renorm = (lambda s: _renormalize(scenario, s)) if scenario.is_bundle else None
        times, raw, exited = _rk4_run(deriv, y0, cfg, renorm)
        states = [_unpack(scenario, s) for s in raw]
        if exited:
            result = FlowResult(times, states, chart_exit=True)
            return result
        return FlowResult(times, states)
    if cfg.method == "rk45":
        sol = solve_ivp(lambda t, y: deriv(y), cfg.t_span, y0, method="RK45",
                        rtol=cfg.rtol, atol=cfg.atol, dense_output=False)
        if not sol.success:
            raise ChartExit(f"adaptive integration failed: {sol.message}")
        states = [_unpack(scenario, _renormalize(scenario, s)) for s in sol.y.T]
        return FlowResult(sol.t, states, diagnostics={"nfev": int(sol.nfev)})
    raise ValueError(f"unknown integrator method {cfg.method!r}")


def releq_curve(scenario: Scenario, m, xi: np.ndarray, t_samples) -> list:
    """Closed-form trajectory exp(tau xi) . m of a relative equilibrium."""
    group = scenario.space.group
    xi = np.asarray(xi, float)
    return [act(scenario.space, exp_group(group, float(t) * xi), m) for t in t_samples]


# ---------------------------------------------------------------------------
# reconstruction of isomorphic flows


def _group_block(scenario: Scenario):
    """Packing and ODE for the reconstruction curve F on the scenario's group."""
    group = scenario.space.group
    if group.kind == "so3":
        size = 9

        def init():
            return np.eye(3).ravel()

        def deriv(block, xi):
            F = block.reshape(3, 3)
            return (F @ hat(xi)).ravel()

        def element(block):
            u, _, vt = np.linalg.svd(block.reshape(3, 3))
            return u @ vt

        return size, init, deriv, element

    size = group.dim_algebra

    def init():
        return np.zeros(size)

    def deriv(block, xi):
        # abelian (and the O(2) identity component): exp coordinates are
        # global and the left-translated ODE is coordinate-wise
        return np.asarray(xi, float)

    def element(block):
        return exp_group(group, block)

    return size, init, deriv, element


def reconstruct_flow(x: EquivariantField, psi: GaugeTransform, m0,
                     cfg: IntegratorConfig, lam: float = 0.0) -> ReconstructionResult:
    """Flow of psi . x as F(tau) . flow_x(tau), with the defect against direct integration.

    The base flow and the group curve F' = TL_F(psi(base)) are co-integrated
    in a single Runge-Kutta pass so the reconstruction shares the base
    flow's accuracy.
    """
    scenario = x.scenario
    if psi.scenario.name != scenario.name:
        from .errors import ScenarioMismatch

        raise ScenarioMismatch("gauge and field are bound to different scenarios")
    base_deriv = _state_derivative(scenario, x, lam)
    gsize, ginit, gderiv, gelement = _group_block(scenario)
    psi_ev = psi.evaluate
    nbase = _pack(scenario, m0).size

    def joint_deriv(state):
        ybase, F = state[:nbase], state[nbase:]
        point = _unpack(scenario, ybase)
        return np.concatenate([base_deriv(ybase), gderiv(F, psi_ev(point, lam))])

    y0 = np.concatenate([_pack(scenario, m0), ginit()])

    def renorm(state):
        out = state.copy()
        out[:nbase] = _renormalize(scenario, state[:nbase])
        return out

    if cfg.method == "rk4":
        times, raw, exited = _rk4_run(joint_deriv, y0, cfg, renorm if scenario.is_bundle else None)
    else:
        sol = solve_ivp(lambda t, y: joint_deriv(y), cfg.t_span, y0, method="RK45",
                        rtol=cfg.rtol, atol=cfg.atol)
        if not sol.success:
            raise ChartExit(f"adaptive integration failed: {sol.message}")
        times, raw, exited = sol.t, list(sol.y.T), False

    base_states = [_unpack(scenario, s[:nbase]) for s in raw]
    group_curve = [gelement(s[nbase:]) for s in raw]
    reconstructed = [act(scenario.space, g, p) for g, p in zip(group_curve, base_states)]
    base_flow = FlowResult(times, base_states, chart_exit=exited)

    direct = integrate(gauge_act(psi, x), m0, cfg, lam)
    n = min(len(reconstructed), len(direct.states))
    defect = 0.0
    stride = max(1, n // 400)  # defect sampled along the trajectory
    for i in range(0, n, stride):
        if scenario.is_bundle:
            gap = orbit_distance(scenario.space, reconstructed[i], direct.states[i])
        else:
            gap = float(np.linalg.norm(reconstructed[i] - direct.states[i]))
        defect = max(defect, gap)
    return ReconstructionResult(base_flow, group_curve, reconstructed, direct, defect)
