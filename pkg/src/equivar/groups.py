"""Concrete Lie group models: S^1, T^n, O(2), SO(3), R x S^1.

Group elements are plain numpy arrays with a per-model convention:

* ``circle``      -- shape ``(1,)``, angle in ``[0, 2*pi)``
* ``torus``       -- shape ``(n,)``, angles in ``[0, 2*pi)``
* ``o2``          -- shape ``(2,)``, ``(angle, flag)`` where ``flag`` is 0/1
  and the element is ``R_angle * kappa**flag`` (``kappa`` = conjugation)
* ``so3``         -- shape ``(3, 3)``, orthogonal with determinant 1
* ``r_x_circle``  -- shape ``(2,)``, ``(shift, angle)``

Algebra vectors are real arrays of length ``dim_algebra`` in a fixed basis:
axis vectors for so(3), angular velocities for tori, ``(shift rate, angular
rate)`` for R x S^1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import AmbiguousRank, SupplementNotInvariant

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class GroupModel:
    """A catalog Lie group, with an optional distinguished compact subgroup K.

    ``subgroup_basis`` is a matrix whose rows span the Lie algebra of K in
    the fixed basis of the model's algebra (used by the bundle models).
    """

    kind: str  # "circle" | "torus" | "o2" | "so3" | "r_x_circle"
    n: int = 1
    subgroup_basis: tuple[tuple[float, ...], ...] | None = None

    @property
    def dim_algebra(self) -> int:
        return {"circle": 1, "torus": self.n, "o2": 1, "so3": 3, "r_x_circle": 2}[self.kind]

    @property
    def dim_group(self) -> int:
        return self.dim_algebra

    @property
    def abelian(self) -> bool:
        return self.kind in ("circle", "torus", "r_x_circle")


def circle_group() -> GroupModel:
    return GroupModel("circle")


def torus_group(n: int) -> GroupModel:
    return GroupModel("torus", n=n)


def o2_group() -> GroupModel:
    return GroupModel("o2")


def so3_group() -> GroupModel:
    # K = S^1 of rotations about e3; its algebra is R*e3.
    return GroupModel("so3", subgroup_basis=((0.0, 0.0, 1.0),))


def rxs1_group() -> GroupModel:
    # K = {0} x S^1; its algebra is the second coordinate axis.
    return GroupModel("r_x_circle", subgroup_basis=((0.0, 1.0),))


# ---------------------------------------------------------------------------
# element-level operations


def _wrap(theta):
    return np.mod(theta, TWO_PI)


def hat(xi: np.ndarray) -> np.ndarray:
    """so(3) hat map: axis vector to skew matrix."""
    x, y, z = xi
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def rodrigues(xi: np.ndarray) -> np.ndarray:
    """Rotation matrix exp(hat(xi)); series branch near the identity."""
    theta = float(np.linalg.norm(xi))
    K = hat(xi)
    if theta < 1e-8:
        return np.eye(3) + K + 0.5 * (K @ K)
    a = np.sin(theta) / theta
    b = (1.0 - np.cos(theta)) / theta**2
    return np.eye(3) + a * K + b * (K @ K)


def identity(model: GroupModel) -> np.ndarray:
    if model.kind == "circle":
        return np.zeros(1)
    if model.kind == "torus":
        return np.zeros(model.n)
    if model.kind == "o2":
        return np.zeros(2)
    if model.kind == "so3":
        return np.eye(3)
    if model.kind == "r_x_circle":
        return np.zeros(2)
    raise ValueError(f"unknown group kind {model.kind!r}")


def exp_group(model: GroupModel, xi: np.ndarray) -> np.ndarray:
    """Exponential map in the model's fixed algebra basis."""
    xi = np.asarray(xi, dtype=float)
    if model.kind == "circle":
        return _wrap(xi[:1])
    if model.kind == "torus":
        return _wrap(xi)
    if model.kind == "o2":
        return np.array([_wrap(xi[0]), 0.0])
    if model.kind == "so3":
        return rodrigues(xi)
    if model.kind == "r_x_circle":
        return np.array([xi[0], _wrap(xi[1])])
    raise ValueError(f"unknown group kind {model.kind!r}")


def multiply(model: GroupModel, g1: np.ndarray, g2: np.ndarray) -> np.ndarray:
    if model.kind in ("circle", "torus"):
        return _wrap(g1 + g2)
    if model.kind == "o2":
        # (R_a k^s)(R_b k^t) = R_{a + (-1)^s b} k^{s xor t}
        sign = -1.0 if g1[1] else 1.0
        return np.array([_wrap(g1[0] + sign * g2[0]), float(int(g1[1]) ^ int(g2[1]))])
    if model.kind == "so3":
        return g1 @ g2
    if model.kind == "r_x_circle":
        return np.array([g1[0] + g2[0], _wrap(g1[1] + g2[1])])
    raise ValueError(f"unknown group kind {model.kind!r}")


def inverse(model: GroupModel, g: np.ndarray) -> np.ndarray:
    if model.kind in ("circle", "torus"):
        return _wrap(-g)
    if model.kind == "o2":
        # reflections are involutions; rotations invert the angle
        return np.array([_wrap(g[0] if g[1] else -g[0]), g[1]])
    if model.kind == "so3":
        return g.T.copy()
    if model.kind == "r_x_circle":
        return np.array([-g[0], _wrap(-g[1])])
    raise ValueError(f"unknown group kind {model.kind!r}")


def adjoint(model: GroupModel, g: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """Ad(g) xi in the fixed algebra basis."""
    xi = np.asarray(xi, dtype=float)
    if model.abelian:
        return xi.copy()
    if model.kind == "o2":
        return -xi if g[1] else xi.copy()
    if model.kind == "so3":
        return g @ xi
    raise ValueError(f"unknown group kind {model.kind!r}")


def group_distance(model: GroupModel, g1: np.ndarray, g2: np.ndarray) -> float:
    """A bi-invariant-enough metric used for tests and orbit comparisons."""
    if model.kind in ("circle", "torus"):
        return float(np.linalg.norm(np.abs(np.exp(1j * g1) - np.exp(1j * g2))))
    if model.kind == "o2":
        chord = abs(np.exp(1j * g1[0]) - np.exp(1j * g2[0]))
        return float(np.hypot(chord, 2.0 * (g1[1] != g2[1])))
    if model.kind == "so3":
        return float(np.linalg.norm(g1 - g2))
    if model.kind == "r_x_circle":
        chord = abs(np.exp(1j * g1[1]) - np.exp(1j * g2[1]))
        return float(np.hypot(g1[0] - g2[0], chord))
    raise ValueError(f"unknown group kind {model.kind!r}")


def sample_element(model: GroupModel, rng: np.random.Generator) -> np.ndarray:
    if model.kind == "circle":
        return rng.uniform(0.0, TWO_PI, size=1)
    if model.kind == "torus":
        return rng.uniform(0.0, TWO_PI, size=model.n)
    if model.kind == "o2":
        return np.array([rng.uniform(0.0, TWO_PI), float(rng.integers(0, 2))])
    if model.kind == "so3":
        return rodrigues(rng.normal(size=3))
    if model.kind == "r_x_circle":
        return np.array([rng.normal(), rng.uniform(0.0, TWO_PI)])
    raise ValueError(f"unknown group kind {model.kind!r}")


# ---------------------------------------------------------------------------
# lattice bases


@dataclass(frozen=True)
class LatticeBasis:
    """R-linearly independent algebra vectors spanning ker(exp) over Z.

    Rows of ``vectors`` are the basis elements in the model's algebra basis.
    """

    vectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vectors", np.atleast_2d(np.asarray(self.vectors, float)))

    @property
    def rank(self) -> int:
        return self.vectors.shape[0]

    def coords(self, xi: np.ndarray) -> np.ndarray:
        """Coordinates of the lattice-span component of xi in this basis."""
        sol, *_ = np.linalg.lstsq(self.vectors.T, np.asarray(xi, float), rcond=None)
        return sol


def lattice_basis(model: GroupModel) -> LatticeBasis | None:
    """Standard lattice basis of ker(exp) for the abelian models."""
    if model.kind == "circle":
        return LatticeBasis(np.array([[TWO_PI]]))
    if model.kind == "torus":
        return LatticeBasis(TWO_PI * np.eye(model.n))
    if model.kind == "o2":
        return LatticeBasis(np.array([[TWO_PI]]))
    if model.kind == "r_x_circle":
        return LatticeBasis(np.array([[0.0, TWO_PI]]))
    return None


# ---------------------------------------------------------------------------
# invariant splittings


@dataclass(frozen=True)
class AlgebraSplitting:
    """A K-invariant splitting g = k (+) q with projector p onto k along q."""

    subalgebra_basis: np.ndarray  # rows span k
    complement_basis: np.ndarray  # rows span q
    projector: np.ndarray  # image k, kernel q

    @property
    def dim_sub(self) -> int:
        return self.subalgebra_basis.shape[0]

    @property
    def dim_comp(self) -> int:
        return self.complement_basis.shape[0]

    def sub_coords(self, xi: np.ndarray) -> np.ndarray:
        """Coordinates of p(xi) in the subalgebra basis."""
        sol, *_ = np.linalg.lstsq(self.subalgebra_basis.T, self.projector @ xi, rcond=None)
        return sol

    def comp_part(self, xi: np.ndarray) -> np.ndarray:
        return xi - self.projector @ xi

    def comp_coords(self, xi: np.ndarray) -> np.ndarray:
        """Coordinates of (1-p)(xi) in the complement basis."""
        sol, *_ = np.linalg.lstsq(self.complement_basis.T, self.comp_part(xi), rcond=None)
        return sol

    def comp_from_coords(self, a: np.ndarray) -> np.ndarray:
        return np.asarray(a, float) @ self.complement_basis

    def sub_from_coords(self, b: np.ndarray) -> np.ndarray:
        return np.asarray(b, float) @ self.subalgebra_basis


def make_splitting(
    model: GroupModel,
    subgroup_basis,
    complement_basis=None,
    *,
    samples: int = 16,
    tol: float = 1e-9,
    seed: int = 0,
) -> AlgebraSplitting:
    """Build a K-invariant splitting of the model's algebra.

    Without an explicit complement the Euclidean orthogonal complement of k
    is used (Ad(K)-invariant for every catalog model). A supplied complement
    is checked for Ad(K)-invariance at ``tol`` and rejected otherwise.
    """
    K = np.atleast_2d(np.asarray(subgroup_basis, float))
    n = model.dim_algebra
    if complement_basis is None:
        # orthogonal complement via SVD null space of K
        _, _, vt = np.linalg.svd(K)
        Q = vt[K.shape[0]:]
    else:
        Q = np.atleast_2d(np.asarray(complement_basis, float))
    S = np.vstack([Q, K])
    if S.shape[0] != n or abs(np.linalg.det(S)) < 1e-12:
        raise SupplementNotInvariant("complement does not complete the subalgebra to a basis")
    # projector onto k along q: coordinates w.r.t. rows of S, keep the k block
    Sinv = np.linalg.inv(S.T)
    proj = K.T @ Sinv[Q.shape[0]:, :]

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        k_elt = _sample_subgroup_element(model, rng)
        for q in Q:
            adq = adjoint(model, k_elt, q)
            worst = max(worst, float(np.linalg.norm(proj @ adq)))
    if worst > tol:
        raise SupplementNotInvariant(
            f"complement fails Ad(K)-invariance: defect {worst:.3e} > {tol:.1e}"
        )
    return AlgebraSplitting(K, Q, proj)


def _sample_subgroup_element(model: GroupModel, rng: np.random.Generator) -> np.ndarray:
    if model.subgroup_basis is None:
        return identity(model)
    basis = np.asarray(model.subgroup_basis, float)
    coeff = rng.uniform(0.0, TWO_PI, size=basis.shape[0])
    return exp_group(model, coeff @ basis)


_CANONICAL_COMPLEMENTS = {
    "so3": ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0)),
    "r_x_circle": ((1.0, 0.0),),
}


def default_splitting(model: GroupModel) -> AlgebraSplitting:
    """Canonical splitting for a model with a distinguished subgroup.

    Uses a fixed complement basis (not an SVD null space) so coordinate
    conventions are deterministic across runs.
    """
    if model.subgroup_basis is None:
        raise ValueError("model declares no distinguished subgroup")
    comp = _CANONICAL_COMPLEMENTS.get(model.kind)
    return make_splitting(model, np.asarray(model.subgroup_basis, float), complement_basis=comp)


# ---------------------------------------------------------------------------
# rational ranks and integer lattices


def integer_relations(coords, height_bound: int, tol: float) -> np.ndarray:
    """Integer vectors n (|n_i| <= height) with |n . x| <= tol * ||x||.

    Exhaustive over the full height box, vectorized in slabs of the first
    coordinate. Raises :class:`AmbiguousRank` when some candidate's residual
    lies in the unsafe band ``(tol, 10 tol) * ||x||``.
    """
    x = np.asarray(coords, dtype=float)
    d = x.size
    norm = float(np.linalg.norm(x))
    if norm == 0.0:
        return np.eye(d)
    if height_bound < 1:
        raise ValueError("height_bound must be >= 1")
    rng = np.arange(-height_bound, height_bound + 1)
    if d == 1:
        tail = np.zeros((1, 0))
    else:
        grids = np.meshgrid(*([rng] * (d - 1)), indexing="ij")
        tail = np.stack([g.ravel() for g in grids], axis=1).astype(float)
    found = []
    for lead in rng:
        cands = np.hstack([np.full((tail.shape[0], 1), float(lead)), tail])
        cands = cands[np.any(cands, axis=1)]
        if cands.size:
            found.extend(_scan_block(cands, x, norm, tol))
    if not found:
        return np.zeros((0, d))
    return np.array(found)


def _scan_block(cands: np.ndarray, x: np.ndarray, norm: float, tol: float):
    res = np.abs(cands @ x)
    band = (res > tol * norm) & (res < 10.0 * tol * norm)
    if np.any(band):
        witness = cands[np.argmax(band)]
        raise AmbiguousRank(
            f"relation residual for n={witness.astype(int).tolist()} lies in the "
            f"unsafe band (tol, 10 tol)"
        )
    hits = res <= tol * norm
    return [cands[i] for i in np.nonzero(hits)[0]]


def rational_rank(coords, height_bound: int = 100, tol: float = 1e-9) -> int:
    """Dimension of the Q-span of the entries, via bounded-height relation search."""
    x = np.asarray(coords, dtype=float)
    if x.size == 0 or not np.any(x):
        return 0
    rels = integer_relations(x, height_bound, tol)
    if rels.shape[0] == 0:
        return x.size
    return x.size - int(np.linalg.matrix_rank(rels, tol=1e-10))


def integer_kernel_basis(mat) -> np.ndarray:
    """Z-basis of {x in Z^n : A x = 0} for an integer matrix A.

    Column-style Hermite reduction of the stacked matrix [A; I]: columns whose
    A-part is reduced to zero carry a basis of the (saturated) integer kernel.
    """
    A = np.asarray(mat, dtype=object)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    m, n = A.shape
    work = np.vstack([A, np.eye(n, dtype=object)])
    col = 0
    for row in range(m):
        piv = None
        for j in range(col, n):
            if work[row, j] != 0:
                piv = j
                break
        if piv is None:
            continue
        work[:, [col, piv]] = work[:, [piv, col]]
        # clear the row to the right of the pivot with integer column ops
        changed = True
        while changed:
            changed = False
            for j in range(col + 1, n):
                if work[row, j] != 0:
                    if abs(work[row, j]) < abs(work[row, col]):
                        work[:, [col, j]] = work[:, [j, col]]
                    q = work[row, j] // work[row, col]
                    work[:, j] = work[:, j] - q * work[:, col]
                    if work[row, j] != 0:
                        changed = True
        col += 1
    kernel = work[m:, col:]
    return np.array(kernel.T, dtype=float) if kernel.size else np.zeros((0, n))


def sublattice_basis_for_span(relations: np.ndarray, n: int) -> np.ndarray:
    """Z-basis (rows) of Z^n intersected with the common kernel of the relations."""
    if relations.shape[0] == 0:
        return np.eye(n)
    ints = np.rint(relations).astype(int)
    return integer_kernel_basis(ints)


def rational_reconstruct(value: float, max_den: int = 10**6) -> Fraction:
    """Nearest fraction with bounded denominator (continued-fraction recovery)."""
    return Fraction(value).limit_denominator(max_den)
