"""The scenario catalog: group + action + standard-form templates.

A scenario binds a catalog action to its declared invariant generators and
to the standard form of its equivariant vector fields and infinitesimal
gauge transformations. Coefficient dictionaries are keyed by the template
keys below; values are :class:`~equivar.poly.InvariantPolynomial` tables or
opaque ``(u, lam) -> float`` callables.

====================  =====================  ==========================
scenario              field keys             gauge keys
====================  =====================  ==========================
``circle``            f, g                   psi
``torus<n>``          f1..fn, g1..gn         psi1..psin
``o2_c``              f                      psi  (only zero is valid)
``o2_c2``             f, g, h, k             psi  (antisymmetrized)
``r_x_circle``        f, g, h                psi1, psi2
``so3_bundle``        f, q, h1, h2           psi_q1, psi_q2, psi_k
====================  =====================  ==========================

On the bundles, ``h``-type coefficients parameterize the horizontal part:
for ``r_x_circle`` the axis speed ``h(u)``; for ``so3_bundle`` the pair
``(h1, h2)`` gives the K-equivariant slice value ``h1(u) z + h2(u) i z`` of
the gauge transformation in the complement plane.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import actions
from .actions import ModelSpace, as_complex, as_real
from .errors import MissingCoefficient, ParseError, UnknownScenario
from .poly import InvariantPolynomial, coeff_depends_on_lambda, coeff_value


@dataclass(frozen=True)
class Scenario:
    name: str
    space: ModelSpace
    generators: tuple[str, ...]
    field_keys: tuple[str, ...]
    gauge_keys: tuple[str, ...]
    slice_scenario_name: str | None = None

    @property
    def nvars(self) -> int:
        return len(self.generators)

    @property
    def is_bundle(self) -> bool:
        return self.space.is_bundle


@lru_cache(maxsize=None)
def get_scenario(name: str) -> Scenario:
    if name == "circle":
        return Scenario("circle", actions.circle_on_c(), ("u1",), ("f", "g"), ("psi",))
    if name.startswith("torus"):
        try:
            n = int(name[len("torus"):])
        except ValueError:
            raise UnknownScenario(f"unknown scenario {name!r}")
        if n < 1:
            raise UnknownScenario(f"torus dimension must be positive, got {n}")
        gens = tuple(f"u{i + 1}" for i in range(n))
        fkeys = tuple(f"f{i + 1}" for i in range(n)) + tuple(f"g{i + 1}" for i in range(n))
        gkeys = tuple(f"psi{i + 1}" for i in range(n))
        return Scenario(name, actions.torus_on_cn(n), gens, fkeys, gkeys)
    if name == "o2_c":
        return Scenario("o2_c", actions.o2_on_c(), ("u1",), ("f",), ("psi",))
    if name == "o2_c2":
        return Scenario(
            "o2_c2", actions.o2_on_c2(), ("u1", "u2", "u3", "u4"),
            ("f", "g", "h", "k"), ("psi",),
        )
    if name == "r_x_circle":
        return Scenario(
            "r_x_circle", actions.rxs1_bundle(), ("u1",),
            ("f", "g", "h"), ("psi1", "psi2"), slice_scenario_name="circle",
        )
    if name == "so3_bundle":
        return Scenario(
            "so3_bundle", actions.so3_bundle(), ("u1",),
            ("f", "q", "h1", "h2"), ("psi_q1", "psi_q2", "psi_k"),
            slice_scenario_name="circle",
        )
    raise UnknownScenario(f"unknown scenario {name!r}")


def resolve_scenario(group_kind: str, model: str | None = None) -> Scenario:
    """Scenario from the external group-kind strings used in configs."""
    if group_kind == "circle":
        return get_scenario("circle")
    if group_kind == "torus2":
        return get_scenario("torus2")
    if group_kind.startswith("torusN:"):
        return get_scenario("torus" + group_kind.split(":", 1)[1])
    if group_kind == "o2":
        return get_scenario("o2_c2" if model == "c2" else "o2_c")
    if group_kind == "so3":
        return get_scenario("so3_bundle")
    if group_kind == "r_x_circle":
        return get_scenario("r_x_circle")
    raise UnknownScenario(f"unknown group kind {group_kind!r}")


def slice_scenario(scenario: Scenario) -> Scenario:
    if scenario.slice_scenario_name is None:
        raise UnknownScenario(f"scenario {scenario.name!r} has no slice scenario")
    return get_scenario(scenario.slice_scenario_name)


# ---------------------------------------------------------------------------
# invariant generators


def invariants(scenario: Scenario, m) -> np.ndarray:
    """Values of the declared invariant generators at a point."""
    if scenario.is_bundle:
        v = m.v if isinstance(m, actions.BundlePoint) else np.asarray(m, float)
        return np.array([float(v @ v)])
    m = np.asarray(m, float)
    z = as_complex(m)
    if scenario.name in ("circle", "o2_c") or scenario.name.startswith("torus"):
        return np.abs(z) ** 2
    if scenario.name == "o2_c2":
        prod = z[0] * z[1]
        return np.array([abs(z[0]) ** 2, abs(z[1]) ** 2, prod.real, prod.imag])
    raise UnknownScenario(scenario.name)


# ---------------------------------------------------------------------------
# coefficient validation


def check_keys(scenario: Scenario, coeffs: dict, keys: tuple[str, ...], what: str) -> None:
    for key in keys:
        if key not in coeffs:
            raise MissingCoefficient(f"{what} for scenario {scenario.name!r} is missing {key!r}")
    for key in coeffs:
        if key not in keys:
            raise ParseError(f"unknown {what} key {key!r} for scenario {scenario.name!r}")


# ---------------------------------------------------------------------------
# standard-form evaluators


def field_evaluator(scenario: Scenario, coeffs: dict):
    """(m, lam) -> flat tangent, assembled per the scenario's standard form."""
    name = scenario.name

    if name == "circle" or name.startswith("torus"):
        n = scenario.space.dim // 2

        def ev(m, lam=0.0):
            u = invariants(scenario, m)
            z = as_complex(m)
            out = np.empty(n, complex)
            for j in range(n):
                fj = coeffs["f" if name == "circle" else f"f{j + 1}"]
                gj = coeffs["g" if name == "circle" else f"g{j + 1}"]
                out[j] = (coeff_value(fj, u, lam) + 1j * coeff_value(gj, u, lam)) * z[j]
            return as_real(out)

        return ev

    if name == "o2_c":

        def ev(m, lam=0.0):
            u = invariants(scenario, m)
            return as_real(coeff_value(coeffs["f"], u, lam) * as_complex(m))

        return ev

    if name == "o2_c2":

        def ev(m, lam=0.0):
            z = as_complex(m)
            u = invariants(scenario, m)
            us = np.array([u[1], u[0], u[2], u[3]])  # swapped arguments
            c1 = (
                (coeff_value(coeffs["f"], u, lam) + 1j * coeff_value(coeffs["g"], u, lam)) * z[0]
                + (coeff_value(coeffs["h"], u, lam) + 1j * coeff_value(coeffs["k"], u, lam))
                * np.conj(z[1])
            )
            c2 = (
                (coeff_value(coeffs["f"], us, lam) + 1j * coeff_value(coeffs["g"], us, lam)) * z[1]
                + (coeff_value(coeffs["h"], us, lam) + 1j * coeff_value(coeffs["k"], us, lam))
                * np.conj(z[0])
            )
            return as_real(np.array([c1, c2]))

        return ev

    if name == "r_x_circle":

        def ev(m, lam=0.0):
            v = m.v
            u = invariants(scenario, m)
            z = as_complex(v)
            w = (coeff_value(coeffs["f"], u, lam) + 1j * coeff_value(coeffs["g"], u, lam)) * z
            return np.concatenate([[coeff_value(coeffs["h"], u, lam)], as_real(w)])

        return ev

    if name == "so3_bundle":

        def ev(m, lam=0.0):
            v = m.v
            u = invariants(scenario, m)
            z = complex(as_complex(v)[0])
            horiz = (coeff_value(coeffs["h1"], u, lam)
                     + 1j * coeff_value(coeffs["h2"], u, lam)) * z
            w = (coeff_value(coeffs["f"], u, lam) + 1j * coeff_value(coeffs["q"], u, lam)) * z
            return np.array([horiz.real, horiz.imag, w.real, w.imag])

        return ev

    raise UnknownScenario(name)


def gauge_evaluator(scenario: Scenario, coeffs: dict):
    """(m, lam) -> algebra vector, assembled per the scenario's standard form.

    Bundle gauges are extended equivariantly from their slice values by
    ``psi([g, v]) = Ad(g) s(v)``.
    """
    name = scenario.name

    if name == "circle" or name == "o2_c":

        def ev(m, lam=0.0):
            u = invariants(scenario, m)
            return np.array([coeff_value(coeffs["psi"], u, lam)])

        return ev

    if name.startswith("torus"):
        n = scenario.space.dim // 2

        def ev(m, lam=0.0):
            u = invariants(scenario, m)
            return np.array([coeff_value(coeffs[f"psi{j + 1}"], u, lam) for j in range(n)])

        return ev

    if name == "o2_c2":
        # equivariance forces antisymmetry under the argument swap
        anti = antisymmetrize(coeffs["psi"])

        def ev(m, lam=0.0):
            u = invariants(scenario, m)
            return np.array([coeff_value(anti, u, lam)])

        return ev

    if name == "r_x_circle":

        def ev(m, lam=0.0):
            u = invariants(scenario, m)
            return np.array(
                [coeff_value(coeffs["psi1"], u, lam), coeff_value(coeffs["psi2"], u, lam)]
            )

        return ev

    if name == "so3_bundle":

        def ev(m, lam=0.0):
            u = invariants(scenario, m)
            z = complex(as_complex(m.v)[0])
            plane = (coeff_value(coeffs["psi_q1"], u, lam)
                     + 1j * coeff_value(coeffs["psi_q2"], u, lam)) * z
            s = np.array([plane.real, plane.imag, coeff_value(coeffs["psi_k"], u, lam)])
            return m.g @ s

        return ev

    raise UnknownScenario(name)


def antisymmetrize(coeff):
    """Antisymmetric part under the swap of the first two generators."""
    if isinstance(coeff, InvariantPolynomial):
        return (coeff - coeff.swap_vars(0, 1)).scale(0.5)

    def anti(u, lam=0.0):
        us = np.array([u[1], u[0], u[2], u[3]])
        return 0.5 * (coeff(u, lam) - coeff(us, lam))

    return anti


def symmetrize(coeff):
    if isinstance(coeff, InvariantPolynomial):
        return (coeff + coeff.swap_vars(0, 1)).scale(0.5)

    def sym(u, lam=0.0):
        us = np.array([u[1], u[0], u[2], u[3]])
        return 0.5 * (coeff(u, lam) + coeff(us, lam))

    return sym


# ---------------------------------------------------------------------------
# tautological transversal / gauge split of the standard forms


def transversal_split(scenario: Scenario, coeffs: dict) -> tuple[dict, dict]:
    """Split standard-form coefficients into (transversal field, gauge) parts.

    This realizes the catalog's example-level isomorphisms: the angular
    coefficients of the standard form define a gauge transformation whose
    induced field accounts for the whole orbit-tangent part (for ``o2_c2``
    only the antisymmetric part of ``g`` is available; the rest of the field
    is not isomorphic to a radial one).
    """

    def zero():
        return InvariantPolynomial.zero(scenario.nvars)

    name = scenario.name
    if name == "circle":
        return {"f": coeffs["f"], "g": zero()}, {"psi": coeffs["g"]}
    if name.startswith("torus"):
        n = scenario.space.dim // 2
        field = {f"f{j + 1}": coeffs[f"f{j + 1}"] for j in range(n)}
        field.update({f"g{j + 1}": zero() for j in range(n)})
        gauge = {f"psi{j + 1}": coeffs[f"g{j + 1}"] for j in range(n)}
        return field, gauge
    if name == "o2_c":
        return dict(coeffs), {"psi": zero()}
    if name == "o2_c2":
        anti = antisymmetrize(coeffs["g"])
        field = {"f": coeffs["f"], "g": symmetrize(coeffs["g"]),
                 "h": coeffs["h"], "k": coeffs["k"]}
        return field, {"psi": anti}
    if name == "r_x_circle":
        field = {"f": coeffs["f"], "g": zero(), "h": zero()}
        return field, {"psi1": coeffs["h"], "psi2": coeffs["g"]}
    if name == "so3_bundle":
        field = {"f": coeffs["f"], "q": zero(), "h1": zero(), "h2": zero()}
        return field, {"psi_q1": coeffs["h1"], "psi_q2": coeffs["h2"], "psi_k": coeffs["q"]}
    raise UnknownScenario(name)


def slice_gauge_coeffs(scenario: Scenario, coeffs: dict) -> dict:
    """Natural gauge path on the slice of a bundle scenario.

    The k-valued angular coefficient of the standard form (the paper-side
    isomorphism used when reducing a bundle bifurcation problem).
    """
    if scenario.name == "r_x_circle":
        return {"psi": coeffs["g"]}
    if scenario.name == "so3_bundle":
        return {"psi": coeffs["q"]}
    raise UnknownScenario(f"scenario {scenario.name!r} has no slice gauge")


def coeffs_depend_on_lambda(coeffs: dict) -> bool:
    return any(coeff_depends_on_lambda(c) for c in coeffs.values())
