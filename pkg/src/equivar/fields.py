"""Equivariant vector fields and infinitesimal gauge transformations.

Both are first-class values bound to a catalog scenario. A gauge
transformation ``psi`` acts on fields by ``psi . X = X + d(psi)`` where
``d(psi)(m)`` is the fundamental vector field of ``psi(m)`` at ``m``; this
is the morphism action of the groupoid of equivariant vector fields.

Parameter dependence is carried by the coefficient tables themselves (an
extra polynomial variable), so a path of fields is an ordinary
:class:`EquivariantField` whose tables involve the parameter; ``at`` fixes
the parameter.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field, replace

import numpy as np

from . import actions, groups, scenarios
from .actions import transport_tangent, twist
from .errors import LambdaOutOfRange, ScenarioMismatch
from .poly import InvariantPolynomial
from .scenarios import Scenario, check_keys, coeffs_depend_on_lambda, get_scenario


def _check_same_scenario(a, b):
    if a.scenario.name != b.scenario.name:
        raise ScenarioMismatch(
            f"scenario mismatch: {a.scenario.name!r} vs {b.scenario.name!r}"
        )


@dataclass
class EquivariantField:
    """A vector field commuting with the scenario's group action.

    ``evaluate(m, lam)`` returns the flat tangent value. ``coeffs`` is set
    when the field is in standard form (serializable); composite fields
    built by :func:`gauge_act` remember their base and acting gauge so the
    standard-form split stays available through naturality.
    """

    scenario: Scenario
    evaluate: object
    coeffs: dict | None = None
    depends_on_lambda: bool = False
    lambda_interval: tuple[float, float] | None = None
    base: "EquivariantField | None" = None
    trail: "GaugeTransform | None" = None

    def __call__(self, m, lam: float = 0.0) -> np.ndarray:
        return self.evaluate(m, lam)

    def at(self, lam: float) -> "EquivariantField":
        """Fix the path parameter (Lambda out of a declared interval is an error)."""
        if self.lambda_interval is not None:
            lo, hi = self.lambda_interval
            if not (lo <= lam <= hi):
                raise LambdaOutOfRange(f"lambda={lam} outside [{lo}, {hi}]")
        if self.coeffs is not None and all(
            isinstance(c, InvariantPolynomial) for c in self.coeffs.values()
        ):
            fixed = {k: c.fix_lambda(lam) for k, c in self.coeffs.items()}
            return build_scenario_field(self.scenario, fixed)
        if self.base is not None and self.trail is not None:
            return gauge_act(self.trail.at(lam), self.base.at(lam))
        ev = self.evaluate
        return replace(self, evaluate=lambda m, _l=0.0, _ev=ev, _lam=lam: _ev(m, _lam),
                       coeffs=None, depends_on_lambda=False, base=None, trail=None)

    def __add__(self, other: "EquivariantField") -> "EquivariantField":
        _check_same_scenario(self, other)
        ev1, ev2 = self.evaluate, other.evaluate
        return EquivariantField(
            self.scenario,
            lambda m, lam=0.0: ev1(m, lam) + ev2(m, lam),
            depends_on_lambda=self.depends_on_lambda or other.depends_on_lambda,
            lambda_interval=self.lambda_interval or other.lambda_interval,
        )

    def __sub__(self, other: "EquivariantField") -> "EquivariantField":
        _check_same_scenario(self, other)
        ev1, ev2 = self.evaluate, other.evaluate
        return EquivariantField(
            self.scenario,
            lambda m, lam=0.0: ev1(m, lam) - ev2(m, lam),
            depends_on_lambda=self.depends_on_lambda or other.depends_on_lambda,
            lambda_interval=self.lambda_interval or other.lambda_interval,
        )

    def scaled(self, factor: float) -> "EquivariantField":
        ev = self.evaluate
        return EquivariantField(self.scenario, lambda m, lam=0.0: factor * ev(m, lam),
                                depends_on_lambda=self.depends_on_lambda,
                                lambda_interval=self.lambda_interval)


@dataclass
class GaugeTransform:
    """An Ad-equivariant map into the Lie algebra, bound to a scenario."""

    scenario: Scenario
    evaluate: object
    coeffs: dict | None = None
    depends_on_lambda: bool = False
    lambda_interval: tuple[float, float] | None = None

    def __call__(self, m, lam: float = 0.0) -> np.ndarray:
        return self.evaluate(m, lam)

    def at(self, lam: float) -> "GaugeTransform":
        if self.lambda_interval is not None:
            lo, hi = self.lambda_interval
            if not (lo <= lam <= hi):
                raise LambdaOutOfRange(f"lambda={lam} outside [{lo}, {hi}]")
        if self.coeffs is not None and all(
            isinstance(c, InvariantPolynomial) for c in self.coeffs.values()
        ):
            fixed = {k: c.fix_lambda(lam) for k, c in self.coeffs.items()}
            return build_scenario_gauge(self.scenario, fixed)
        ev = self.evaluate
        return replace(self, evaluate=lambda m, _l=0.0, _ev=ev, _lam=lam: _ev(m, _lam),
                       coeffs=None, depends_on_lambda=False)

    def __add__(self, other: "GaugeTransform") -> "GaugeTransform":
        _check_same_scenario(self, other)
        ev1, ev2 = self.evaluate, other.evaluate
        return GaugeTransform(
            self.scenario,
            lambda m, lam=0.0: ev1(m, lam) + ev2(m, lam),
            depends_on_lambda=self.depends_on_lambda or other.depends_on_lambda,
            lambda_interval=self.lambda_interval or other.lambda_interval,
        )

    def __neg__(self) -> "GaugeTransform":
        ev = self.evaluate
        return GaugeTransform(self.scenario, lambda m, lam=0.0: -ev(m, lam),
                              depends_on_lambda=self.depends_on_lambda,
                              lambda_interval=self.lambda_interval)

    def scaled(self, factor) -> "GaugeTransform":
        """Scale by a constant or by a scalar function of the point."""
        ev = self.evaluate
        if callable(factor):
            return GaugeTransform(self.scenario,
                                  lambda m, lam=0.0: factor(m) * ev(m, lam),
                                  depends_on_lambda=self.depends_on_lambda,
                                  lambda_interval=self.lambda_interval)
        return GaugeTransform(self.scenario, lambda m, lam=0.0: factor * ev(m, lam),
                              depends_on_lambda=self.depends_on_lambda,
                              lambda_interval=self.lambda_interval)


@dataclass(frozen=True)
class FieldIso:
    """A morphism of the groupoid: source field plus the acting gauge."""

    source: EquivariantField
    gauge: GaugeTransform

    @property
    def target(self) -> EquivariantField:
        return gauge_act(self.gauge, self.source)


def build_scenario_field(scenario, coeffs: dict) -> EquivariantField:
    """Assemble a standard-form field; guaranteed equivariant by construction."""
    if isinstance(scenario, str):
        scenario = get_scenario(scenario)
    check_keys(scenario, coeffs, scenario.field_keys, "field coefficient")
    return EquivariantField(
        scenario,
        scenarios.field_evaluator(scenario, coeffs),
        coeffs=dict(coeffs),
        depends_on_lambda=coeffs_depend_on_lambda(coeffs),
    )


def build_scenario_gauge(scenario, coeffs: dict) -> GaugeTransform:
    """Assemble a standard-form gauge transformation.

    On ``o2_c2`` the table is antisymmetrized (projection onto the
    equivariant candidates); on ``o2_c`` the assembled candidate is only
    genuinely equivariant when it is zero -- that rigidity is the point of
    the scenario and is what :func:`check_equivariance` detects.
    """
    if isinstance(scenario, str):
        scenario = get_scenario(scenario)
    check_keys(scenario, coeffs, scenario.gauge_keys, "gauge coefficient")
    stored = dict(coeffs)
    if scenario.name == "o2_c2":
        stored["psi"] = scenarios.antisymmetrize(stored["psi"])
    return GaugeTransform(
        scenario,
        scenarios.gauge_evaluator(scenario, stored),
        coeffs=stored,
        depends_on_lambda=coeffs_depend_on_lambda(coeffs),
    )


def zero_gauge(scenario: Scenario) -> GaugeTransform:
    zero = InvariantPolynomial.zero(scenario.nvars)
    return build_scenario_gauge(scenario, {k: zero for k in scenario.gauge_keys})


def induced_field(psi: GaugeTransform) -> EquivariantField:
    """The field d(psi): m -> fundamental vector of psi(m) at m."""
    space = psi.scenario.space
    ev = psi.evaluate
    return EquivariantField(
        psi.scenario,
        lambda m, lam=0.0: actions.infinitesimal_action(space, ev(m, lam), m),
        depends_on_lambda=psi.depends_on_lambda,
        lambda_interval=psi.lambda_interval,
    )


def gauge_act(psi: GaugeTransform, x: EquivariantField) -> EquivariantField:
    """The groupoid action psi . X = X + d(psi)."""
    _check_same_scenario(psi, x)
    out = x + induced_field(psi)
    out.base = x
    out.trail = psi
    return out


def transversal_parts(x: EquivariantField) -> tuple[EquivariantField, GaugeTransform]:
    """Standard-form split X = Y + d(psi) with Y the transversal part.

    Follows composite fields through their gauge trail (naturality of the
    split); raises for opaque fields with no standard form available.
    """
    if x.coeffs is not None:
        fparts, gparts = scenarios.transversal_split(x.scenario, x.coeffs)
        return build_scenario_field(x.scenario, fparts), build_scenario_gauge(x.scenario, gparts)
    if x.base is not None and x.trail is not None:
        y, psi = transversal_parts(x.base)
        return y, psi + x.trail
    raise ScenarioMismatch("field has no standard form to split")


# ---------------------------------------------------------------------------
# equivariance checking


@dataclass(frozen=True)
class EquivarianceReport:
    max_violation: float
    witness: tuple | None
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tol


def check_equivariance(obj, n_samples: int = 200, tol: float = 1e-9,
                       seed: int = 0, radius: float = 3.0) -> EquivarianceReport:
    """Sample (g, m) pairs deterministically and report the worst defect.

    Fields are checked for ``X(g m) = g X(m)``, gauge transformations for
    ``psi(g m) = Ad(g) psi(m)``. On bundles the sampling also twists the
    representative by K, which detects candidates that are only well defined
    on representatives rather than on the quotient.
    """
    scenario = obj.scenario
    space = scenario.space
    rng = np.random.default_rng(seed)
    is_field = isinstance(obj, EquivariantField)
    worst, witness = 0.0, None
    for _ in range(n_samples):
        m = actions.sample_point(space, rng, radius)
        g = actions.sample_group(space, rng)
        lam = rng.uniform(-1.0, 1.0) if obj.depends_on_lambda else 0.0
        if space.is_bundle:
            theta = rng.uniform(0.0, groups.TWO_PI)
            moved = actions.act(space, g, twist(space, m, theta))
            if is_field:
                defect = np.linalg.norm(
                    obj(moved, lam) - transport_tangent(space, theta, obj(m, lam))
                )
            else:
                defect = np.linalg.norm(
                    obj(moved, lam) - groups.adjoint(space.group, g, obj(m, lam))
                )
        else:
            if is_field:
                defect = np.linalg.norm(
                    obj(actions.act(space, g, m), lam)
                    - actions.act(space, g, obj(m, lam))
                )
            else:
                defect = np.linalg.norm(
                    obj(actions.act(space, g, m), lam)
                    - groups.adjoint(space.group, g, obj(m, lam))
                )
        if defect > worst:
            worst, witness = float(defect), (g, m, lam)
    return EquivarianceReport(worst, witness, tol)


def eval_path(path: EquivariantField, lam: float) -> EquivariantField:
    """Fix the parameter of a path of fields."""
    return path.at(lam)
