"""Catalog group actions on representation spaces and bundle local models.

Points on a representation are flat real arrays; a copy of C^k is stored
interleaved as ``[x1, y1, ..., xk, yk]``. Points of a local model G x^K V
are :class:`BundlePoint` representatives ``(g, v)``; two representatives
describe the same point iff :func:`orbit_distance` vanishes.

Tangent vectors are flat real arrays throughout. On a bundle the tangent at
a representative ``(g, v)`` is written in body coordinates normalized with
respect to the model's default splitting ``g = k (+) q``: the first block
holds the q-coordinates, the second the slice coordinates. This is the
``[g, v, xi_q, w]`` normal form of the tangent of the associated bundle.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import groups
from .errors import DimensionMismatch
from .groups import AlgebraSplitting, GroupModel, adjoint, inverse

# ---------------------------------------------------------------------------
# complex packing helpers


def as_complex(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, float)
    return x[0::2] + 1j * x[1::2]


def as_real(z: np.ndarray) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, complex))
    out = np.empty(2 * z.size)
    out[0::2] = z.real
    out[1::2] = z.imag
    return out


@dataclass(frozen=True)
class ModelSpace:
    """A catalog action: either a representation or a bundle local model."""

    name: str  # dispatch key, see _REP_ACTIONS / bundle names below
    group: GroupModel
    kind: str  # "representation" | "bundle"
    dim: int  # point dimension (representation) or slice dimension (bundle)

    @property
    def is_bundle(self) -> bool:
        return self.kind == "bundle"


@dataclass(frozen=True)
class BundlePoint:
    """Non-canonical representative (g, v) of a point [g, v] in G x^K V."""

    g: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "v", np.asarray(self.v, float))


def circle_on_c() -> ModelSpace:
    return ModelSpace("circle_on_c", groups.circle_group(), "representation", 2)


def torus_on_cn(n: int) -> ModelSpace:
    return ModelSpace("torus_on_cn", groups.torus_group(n), "representation", 2 * n)


def o2_on_c() -> ModelSpace:
    return ModelSpace("o2_on_c", groups.o2_group(), "representation", 2)


def o2_on_c2() -> ModelSpace:
    return ModelSpace("o2_on_c2", groups.o2_group(), "representation", 4)


def rxs1_bundle() -> ModelSpace:
    return ModelSpace("rxs1_bundle", groups.rxs1_group(), "bundle", 2)


def so3_bundle() -> ModelSpace:
    return ModelSpace("so3_bundle", groups.so3_group(), "bundle", 2)


@lru_cache(maxsize=None)
def bundle_splitting(space: ModelSpace) -> AlgebraSplitting:
    """Default splitting used for the bundle's tangent normal form."""
    return groups.default_splitting(space.group)


def tangent_dim(space: ModelSpace) -> int:
    if not space.is_bundle:
        return space.dim
    return bundle_splitting(space).dim_comp + space.dim


def point_dim(space: ModelSpace) -> int:
    return space.dim


# ---------------------------------------------------------------------------
# the actions


def act(space: ModelSpace, g: np.ndarray, m):
    """Left action of a group element on a point."""
    if space.is_bundle:
        return BundlePoint(groups.multiply(space.group, g, m.g), m.v)
    m = np.asarray(m, float)
    if m.size != space.dim:
        raise DimensionMismatch(f"point has size {m.size}, expected {space.dim}")
    if space.name == "circle_on_c":
        return as_real(np.exp(1j * g[0]) * as_complex(m))
    if space.name == "torus_on_cn":
        return as_real(np.exp(1j * g) * as_complex(m))
    if space.name == "o2_on_c":
        z = as_complex(m)
        if g[1]:
            z = np.conj(z)
        return as_real(np.exp(1j * g[0]) * z)
    if space.name == "o2_on_c2":
        z = as_complex(m)
        if g[1]:
            z = z[::-1]
        return as_real(np.array([np.exp(1j * g[0]) * z[0], np.exp(-1j * g[0]) * z[1]]))
    raise ValueError(f"unknown action {space.name!r}")


def slice_act(space: ModelSpace, theta: float, v: np.ndarray) -> np.ndarray:
    """Action of the subgroup element with angle theta on the slice (K = S^1)."""
    return as_real(np.exp(1j * theta) * as_complex(v))


def k_element(space: ModelSpace, theta: float) -> np.ndarray:
    """Subgroup element of K < G with angle coordinate theta."""
    split = bundle_splitting(space)
    return groups.exp_group(space.group, theta * split.subalgebra_basis[0])


def twist(space: ModelSpace, p: BundlePoint, theta: float) -> BundlePoint:
    """Equivalent representative (g k^-1, k v) of the same bundle point."""
    k = k_element(space, theta)
    return BundlePoint(groups.multiply(space.group, p.g, inverse(space.group, k)),
                       slice_act(space, theta, p.v))


def slice_infinitesimal(space: ModelSpace, kappa: float, v: np.ndarray) -> np.ndarray:
    """Fundamental vector field of kappa in the K-slice representation."""
    return as_real(1j * kappa * as_complex(v))


def infinitesimal_action(space: ModelSpace, xi: np.ndarray, m) -> np.ndarray:
    """Closed-form fundamental vector field of xi at m, as a flat tangent."""
    xi = np.asarray(xi, float)
    if xi.size != space.group.dim_algebra:
        raise DimensionMismatch(
            f"algebra vector has size {xi.size}, expected {space.group.dim_algebra}"
        )
    if space.is_bundle:
        split = bundle_splitting(space)
        eta = adjoint(space.group, inverse(space.group, m.g), xi)
        a = split.comp_coords(eta)
        kappa = split.sub_coords(eta)[0]
        return np.concatenate([a, slice_infinitesimal(space, kappa, m.v)])
    m = np.asarray(m, float)
    if space.name == "circle_on_c":
        return as_real(1j * xi[0] * as_complex(m))
    if space.name == "torus_on_cn":
        return as_real(1j * xi * as_complex(m))
    if space.name == "o2_on_c":
        return as_real(1j * xi[0] * as_complex(m))
    if space.name == "o2_on_c2":
        z = as_complex(m)
        return as_real(np.array([1j * xi[0] * z[0], -1j * xi[0] * z[1]]))
    raise ValueError(f"unknown action {space.name!r}")


def transport_tangent(space: ModelSpace, theta: float, tv: np.ndarray) -> np.ndarray:
    """Push a bundle tangent along the representative change by k = k(theta).

    A tangent (xi, w) at (g, v) equals (Ad(k) xi, k w) at (g k^-1, k v); for
    the catalog models Ad(k) preserves the default complement q, so the
    normal form is preserved.
    """
    split = bundle_splitting(space)
    dq = split.dim_comp
    a, w = tv[:dq], tv[dq:]
    k = k_element(space, theta)
    xi_new = adjoint(space.group, k, split.comp_from_coords(a))
    return np.concatenate([split.comp_coords(xi_new), slice_act(space, theta, w)])


def ev_jacobian(space: ModelSpace, m) -> np.ndarray:
    """Matrix of T ev_m: columns are the fundamental fields of the algebra basis."""
    dg = space.group.dim_algebra
    cols = [infinitesimal_action(space, e, m) for e in np.eye(dg)]
    return np.column_stack(cols)


def isotropy_algebra(space: ModelSpace, m, tol: float = 1e-8) -> np.ndarray:
    """Orthonormal basis (rows) of the kernel of T ev_m, by SVD with threshold tol."""
    J = ev_jacobian(space, m)
    u, s, vt = np.linalg.svd(J)
    if s.size == 0 or s[0] == 0.0:
        return np.eye(space.group.dim_algebra)
    cutoff = tol * s[0]
    null_rows = [vt[i] for i in range(vt.shape[0]) if i >= s.size or s[i] <= cutoff]
    if not null_rows:
        return np.zeros((0, space.group.dim_algebra))
    return np.array(null_rows)


def slice_embed(space: ModelSpace, v: np.ndarray) -> BundlePoint:
    """The slice embedding j(v) = [1, v]."""
    return BundlePoint(groups.identity(space.group), np.asarray(v, float))


def orbit_tangency_residual(space: ModelSpace, tv: np.ndarray, m) -> tuple[float, np.ndarray]:
    """Distance of a tangent vector to the orbit tangent space at m.

    Returns ``(residual, xi)`` where ``xi`` is the minimum-norm least-squares
    solution of ``T ev_m(xi) = tv``; the residual vanishes exactly when the
    vector is tangent to the group orbit.
    """
    J = ev_jacobian(space, m)
    xi, _, _, _ = np.linalg.lstsq(J, np.asarray(tv, float), rcond=None)
    residual = float(np.linalg.norm(J @ xi - tv))
    return residual, xi


def _rep_gap(space: ModelSpace, theta: float, p: BundlePoint, q: BundlePoint) -> float:
    tw = twist(space, p, theta)
    return float(np.hypot(groups.group_distance(space.group, tw.g, q.g),
                          np.linalg.norm(tw.v - q.v)))


def orbit_distance(space: ModelSpace, p: BundlePoint, q: BundlePoint,
                   grid: int = 64) -> float:
    """Distance between bundle points, minimized over the K-gauge freedom.

    Coarse scan over the circle K followed by golden-section refinement of
    the bracketing interval.
    """
    thetas = np.linspace(0.0, groups.TWO_PI, grid, endpoint=False)
    vals = [_rep_gap(space, t, p, q) for t in thetas]
    i = int(np.argmin(vals))
    step = groups.TWO_PI / grid
    lo, hi = thetas[i] - step, thetas[i] + step
    # golden-section refinement
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = _rep_gap(space, c, p, q), _rep_gap(space, d, p, q)
    for _ in range(80):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = _rep_gap(space, c, p, q)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = _rep_gap(space, d, p, q)
    return min(vals[i], fc, fd)


def points_close(space: ModelSpace, p, q, tol: float = 1e-9) -> bool:
    if space.is_bundle:
        return orbit_distance(space, p, q) <= tol
    return bool(np.linalg.norm(np.asarray(p) - np.asarray(q)) <= tol)


# ---------------------------------------------------------------------------
# deterministic sampling


def sample_point(space: ModelSpace, rng: np.random.Generator, radius: float = 3.0):
    if space.is_bundle:
        g = groups.sample_element(space.group, rng)
        return BundlePoint(g, _ball_point(rng, space.dim, radius))
    return _ball_point(rng, space.dim, radius)


def _ball_point(rng: np.random.Generator, dim: int, radius: float) -> np.ndarray:
    x = rng.normal(size=dim)
    n = np.linalg.norm(x)
    if n == 0.0:
        return x
    return x * (rng.uniform(0.05, 1.0) * radius / n)


def sample_group(space: ModelSpace, rng: np.random.Generator) -> np.ndarray:
    return groups.sample_element(space.group, rng)
