"""Lie algebra models, the coadjoint field, and matrix-group stepping.

Structure constants c[i, j, k] satisfy [e_i, e_j] = c[i, j, k] e_k in a
fixed basis that the inner product declares orthonormal.  Each named
algebra carries a faithful matrix realization whose generator commutators
reproduce the structure constants exactly, so that coadjoint dynamics and
group reconstruction stay consistent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import GroupInvariantError, ParameterError

ALGEBRA_NAMES = ("abelian2", "abelian3", "aff_r", "heisenberg3", "so3")

JACOBI_TOL = 1e-12


def _structure_constants(name: str) -> np.ndarray:
    if name == "abelian2":
        return np.zeros((2, 2, 2))
    if name == "abelian3":
        return np.zeros((3, 3, 3))
    if name == "aff_r":
        c = np.zeros((2, 2, 2))
        c[0, 1, 0] = 1.0   # [e1, e2] = e1
        c[1, 0, 0] = -1.0
        return c
    if name == "heisenberg3":
        c = np.zeros((3, 3, 3))
        c[0, 1, 2] = 1.0   # [e1, e2] = e3
        c[1, 0, 2] = -1.0
        return c
    if name == "so3":
        c = np.zeros((3, 3, 3))
        for i in range(3):
            for j in range(3):
                for k in range(3):
                    c[i, j, k] = 0.5 * (i - j) * (j - k) * (k - i)  # epsilon_ijk
        return c
    raise ParameterError(f"unknown algebra {name!r}")


def _generators(name: str):
    """Matrix generators with [E_i, E_j] = c_ij^k E_k."""
    if name == "aff_r":
        # lower-triangular realization [[1, 0], [x1, x2]], x2 > 0;
        # E2 = -diag scaling so that [E1, E2] = +E1 matches c
        E1 = np.array([[0.0, 0.0], [1.0, 0.0]])
        E2 = np.array([[0.0, 0.0], [0.0, -1.0]])
        return [E1, E2]
    if name == "heisenberg3":
        E1 = np.zeros((3, 3)); E1[0, 1] = 1.0
        E2 = np.zeros((3, 3)); E2[1, 2] = 1.0
        E3 = np.zeros((3, 3)); E3[0, 2] = 1.0
        return [E1, E2, E3]
    if name == "so3":
        L1 = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])
        L2 = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])
        L3 = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        return [L1, L2, L3]
    return None


@dataclass(frozen=True)
class LieAlgebraModel:
    name: str
    dim: int
    c: np.ndarray
    generators: Optional[list] = field(default=None, repr=False)

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        n = self.dim
        if c.shape != (n, n, n):
            raise ParameterError("structure constants must be an n^3 array")
        if np.max(np.abs(c + np.swapaxes(c, 0, 1))) > 1e-12:
            raise ParameterError("structure constants must be antisymmetric")
        jac = (np.einsum("ijm,mkl->ijkl", c, c)
               + np.einsum("jkm,mil->jkil", c, c).transpose(2, 0, 1, 3)
               + np.einsum("kim,mjl->kijl", c, c).transpose(1, 2, 0, 3))
        if np.max(np.abs(jac)) > JACOBI_TOL:
            raise ParameterError("structure constants violate the Jacobi identity")
        object.__setattr__(self, "c", c)
        if self.generators is not None:
            for i in range(n):
                for j in range(n):
                    comm = self.generators[i] @ self.generators[j] \
                        - self.generators[j] @ self.generators[i]
                    want = sum(c[i, j, k] * self.generators[k] for k in range(n))
                    assert np.max(np.abs(comm - want)) < 1e-12

    @property
    def c_hat(self) -> float:
        """Largest |c_ij^k|."""
        return float(np.max(np.abs(self.c)))

    @property
    def has_group(self) -> bool:
        return self.name in ("abelian2", "abelian3") or self.generators is not None


def algebra(name: str) -> LieAlgebraModel:
    c = _structure_constants(name)
    return LieAlgebraModel(name=name, dim=c.shape[0], c=c,
                           generators=_generators(name))


def custom_algebra(c) -> LieAlgebraModel:
    """Algebra from inline structure constants; coadjoint dynamics only."""
    c = np.asarray(c, dtype=float)
    return LieAlgebraModel(name="custom", dim=c.shape[0], c=c, generators=None)


# ---------------------------------------------------------------------------
# algebra operations

def bracket(alg: LieAlgebraModel, y, z) -> np.ndarray:
    """[y, z]^k = y^i z^j c_ij^k."""
    return np.einsum("i,j,ijk->k", np.asarray(y, float), np.asarray(z, float), alg.c)


def coadjoint_field(alg: LieAlgebraModel, a, u) -> np.ndarray:
    """The covector v -> a([u, v]); components a_m u^i c_ik^m.

    Equals -ad*(u)(a); this is the right-hand side of the vertical
    extremal equation da/dt = a([u(a), .]).
    """
    return np.einsum("i,ikm,m->k", np.asarray(u, float), alg.c, np.asarray(a, float))


# ---------------------------------------------------------------------------
# closed-form matrix exponentials

def _expm_aff(xi: np.ndarray) -> np.ndarray:
    # xi = [[0,0],[c,d]]: exp = [[1,0],[c phi(d), e^d]], phi(d)=(e^d-1)/d
    c, d = xi[1, 0], xi[1, 1]
    ed = math.exp(d)
    phi = (ed - 1.0) / d if abs(d) > 1e-12 else 1.0 + 0.5 * d + d * d / 6.0
    return np.array([[1.0, 0.0], [c * phi, ed]])


def _expm_nilpotent3(xi: np.ndarray) -> np.ndarray:
    # strictly upper triangular 3x3: xi^3 = 0
    return np.eye(3) + xi + 0.5 * (xi @ xi)


def _expm_so3(xi: np.ndarray) -> np.ndarray:
    w = np.array([xi[2, 1], xi[0, 2], xi[1, 0]])
    th = float(np.linalg.norm(w))
    if th < 1e-12:
        return np.eye(3) + xi + 0.5 * (xi @ xi)
    A = math.sin(th) / th
    B = (1.0 - math.cos(th)) / (th * th)
    return np.eye(3) + A * xi + B * (xi @ xi)


_EXPM = {"aff_r": _expm_aff, "heisenberg3": _expm_nilpotent3, "so3": _expm_so3}


def algebra_matrix(alg: LieAlgebraModel, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    return sum(u[i] * alg.generators[i] for i in range(alg.dim))


def group_exp(alg: LieAlgebraModel, u) -> np.ndarray:
    """exp of the algebra element with coordinates u, in the matrix realization."""
    if alg.name in ("abelian2", "abelian3"):
        return np.asarray(u, dtype=float)
    if alg.generators is None:
        raise ParameterError(f"algebra {alg.name!r} has no matrix realization")
    return _EXPM[alg.name](algebra_matrix(alg, u))


# ---------------------------------------------------------------------------
# group elements

@dataclass(frozen=True)
class GroupElement:
    algebra: str
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=float))
        check_group_invariants(self)


def check_group_invariants(g: GroupElement, tol: float = 1e-9):
    m = g.matrix
    name = g.algebra
    if name in ("abelian2", "abelian3"):
        if not np.all(np.isfinite(m)):
            raise GroupInvariantError("abelian element must be finite")
        return
    if name == "aff_r":
        if m[1, 1] <= 0.0:
            raise GroupInvariantError("aff_r scaling entry must stay positive")
        if abs(m[0, 0] - 1.0) > tol or abs(m[0, 1]) > tol:
            raise GroupInvariantError("aff_r element must be lower unitriangular in row 0")
        return
    if name == "heisenberg3":
        if np.max(np.abs(np.tril(m, -1))) > tol or np.max(np.abs(np.diag(m) - 1.0)) > tol:
            raise GroupInvariantError("heisenberg element must be upper unitriangular")
        return
    if name == "so3":
        if np.max(np.abs(m.T @ m - np.eye(3))) > tol:
            raise GroupInvariantError("so3 element lost orthogonality")
        if abs(np.linalg.det(m) - 1.0) > 1e-8:
            raise GroupInvariantError("so3 element lost det = 1")
        return
    raise ParameterError(f"no representation registered for {name!r}")


def identity_element(alg: LieAlgebraModel) -> GroupElement:
    if alg.name in ("abelian2", "abelian3"):
        return GroupElement(alg.name, np.zeros(alg.dim))
    if alg.name == "aff_r":
        return GroupElement(alg.name, np.eye(2))
    return GroupElement(alg.name, np.eye(3))


def aff_element(x1: float, x2: float) -> GroupElement:
    """Affine-line element (x1, x2), group law (x.z) = (x2 z1 + x1, x2 z2)."""
    return GroupElement("aff_r", np.array([[1.0, 0.0], [x1, x2]]))


def aff_coords(g: GroupElement):
    return float(g.matrix[1, 0]), float(g.matrix[1, 1])


def group_mul(a: GroupElement, b: GroupElement) -> GroupElement:
    if a.algebra in ("abelian2", "abelian3"):
        return GroupElement(a.algebra, a.matrix + b.matrix)
    return GroupElement(a.algebra, a.matrix @ b.matrix)


def group_step(g: GroupElement, alg: LieAlgebraModel, u, h: float) -> GroupElement:
    """One left-invariant Euler step g -> g exp(h u)."""
    if h == 0.0:
        raise ParameterError("step size must be nonzero")
    u = np.asarray(u, dtype=float)
    if alg.name in ("abelian2", "abelian3"):
        return GroupElement(alg.name, g.matrix + h * u)
    return GroupElement(alg.name, g.matrix @ group_exp(alg, h * u))


# ---------------------------------------------------------------------------
# left-invariant frame distance

def group_log(alg: LieAlgebraModel, g: GroupElement) -> np.ndarray:
    """Coordinates of log(g) in the generator basis."""
    m = g.matrix
    if alg.name in ("abelian2", "abelian3"):
        return m.copy()
    if alg.name == "aff_r":
        c, ed = m[1, 0], m[1, 1]
        d = math.log(ed)
        phi = (ed - 1.0) / d if abs(d) > 1e-12 else 1.0 + 0.5 * d + d * d / 6.0
        return np.array([c / phi, -d])
    if alg.name == "heisenberg3":
        N = m - np.eye(3)
        X = N - 0.5 * (N @ N)
        return np.array([X[0, 1], X[1, 2], X[0, 2]])
    if alg.name == "so3":
        tr = float(np.trace(m))
        cth = max(-1.0, min(1.0, 0.5 * (tr - 1.0)))
        th = math.acos(cth)
        if th < 1e-9:
            S = 0.5 * (m - m.T)
        else:
            S = th / (2.0 * math.sin(th)) * (m - m.T)
        return np.array([S[2, 1], S[0, 2], S[1, 0]])
    raise ParameterError(f"no log for {alg.name!r}")


def group_distance(alg: LieAlgebraModel, a: GroupElement, b: GroupElement) -> float:
    """Distance in the left-invariant metric with orthonormal frame.

    Closed forms where they exist: Euclidean for abelian, hyperbolic
    half-plane for aff_r, rotation angle for so3.  For heisenberg3 the
    length of the one-parameter connecting arc ||log(a^-1 b)|| is used; it
    upper-bounds the distance and is exact to third order in separation.
    """
    if alg.name in ("abelian2", "abelian3"):
        return float(np.linalg.norm(a.matrix - b.matrix))
    if alg.name == "aff_r":
        p1, p2 = aff_coords(a)
        q1, q2 = aff_coords(b)
        arg = 1.0 + ((p1 - q1) ** 2 + (p2 - q2) ** 2) / (2.0 * p2 * q2)
        return math.acosh(max(1.0, arg))
    if alg.name == "so3":
        rel = a.matrix.T @ b.matrix
        cth = max(-1.0, min(1.0, 0.5 * (float(np.trace(rel)) - 1.0)))
        return math.acos(cth)
    rel = GroupElement(alg.name, np.linalg.inv(a.matrix) @ b.matrix)
    return float(np.linalg.norm(group_log(alg, rel)))
