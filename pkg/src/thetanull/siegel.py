"""Points of the Siegel upper-half space and the action of Sp(2g, Z).

Period matrices are stored as read-only complex arrays; symplectic matrices
are exact integer data and every group-theoretic check on them is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    DimensionMismatch,
    NotPositiveDefinite,
    NotSymmetric,
    NotSymplectic,
    SingularDenominator,
)

DEFAULT_SYM_TOL = 1e-9
# condition number of C tau + D beyond which the action is reported as breakdown
MAX_DENOMINATOR_COND = 1e12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PeriodMatrix:
    """A validated point tau of H_g.

    Build instances with :func:`validate_period_matrix`; the constructor
    itself does not check anything.
    """

    entries: np.ndarray

    @property
    def g(self) -> int:
        return self.entries.shape[0]

    @property
    def real(self) -> np.ndarray:
        return self.entries.real

    @property
    def imag(self) -> np.ndarray:
        return self.entries.imag

    @cached_property
    def imag_inv(self) -> np.ndarray:
        return _frozen(np.linalg.inv(self.imag))

    @cached_property
    def imag_cholesky(self) -> np.ndarray:
        """Upper-triangular U with U^T U = Im(tau)."""
        return _frozen(np.linalg.cholesky(self.imag).T)

    def __eq__(self, other):
        if not isinstance(other, PeriodMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash(self.entries.tobytes())


def validate_period_matrix(raw, sym_tol: float = DEFAULT_SYM_TOL) -> PeriodMatrix:
    """Symmetrize ``raw`` and check that its imaginary part is positive definite.

    Raises NotSymmetric if the input departs from symmetry by more than
    ``sym_tol`` and NotPositiveDefinite if Im is not positive definite.
    """
    a = np.asarray(raw, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DimensionMismatch(f"period matrix must be square and nonempty, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NotPositiveDefinite("period matrix has non-finite entries")
    asym = float(np.max(np.abs(a - a.T)))
    if asym > sym_tol:
        raise NotSymmetric(f"max |tau_ij - tau_ji| = {asym:.3e} exceeds sym_tol = {sym_tol:.3e}")
    sym = (a + a.T) / 2
    min_eig = float(np.linalg.eigvalsh(sym.imag).min())
    if min_eig <= 0:
        raise NotPositiveDefinite(f"smallest eigenvalue of Im(tau) is {min_eig:.3e}")
    return PeriodMatrix(_frozen(sym))


def random_siegel(g: int, seed: int, spread: float = 0.5) -> PeriodMatrix:
    """Deterministic test point tau = X + iY with Y = I + M M^T."""
    if g < 1:
        raise ValueError("g must be positive")
    rng = np.random.default_rng(seed)
    x = rng.uniform(-spread, spread, size=(g, g))
    x = np.triu(x) + np.triu(x, 1).T
    m = rng.uniform(-spread, spread, size=(g, g))
    y = np.eye(g) + m @ m.T
    y = (y + y.T) / 2
    return validate_period_matrix(x + 1j * y, sym_tol=0.0)


@dataclass(frozen=True, eq=False)
class SymplecticMatrix:
    """An element (A B; C D) of Sp(2g, Z)."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        blocks = [np.asarray(b) for b in (self.A, self.B, self.C, self.D)]
        g = blocks[0].shape[0] if blocks[0].ndim == 2 else -1
        for name, b in zip("ABCD", blocks):
            if b.shape != (g, g):
                raise DimensionMismatch(f"block {name} has shape {b.shape}, expected {(g, g)}")
            if not np.issubdtype(b.dtype, np.integer):
                if not np.all(b == np.round(b)):
                    raise NotSymplectic(f"block {name} is not integral")
            object.__setattr__(self, name, _frozen(b.astype(np.int64)))
        m = self.matrix
        j = _j_matrix(g)
        if not np.array_equal(m.T @ j @ m, j):
            raise NotSymplectic("gamma^T J gamma != J")

    @classmethod
    def from_matrix(cls, m) -> SymplecticMatrix:
        m = np.asarray(m)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise DimensionMismatch(f"expected a 2g x 2g matrix, got shape {m.shape}")
        g = m.shape[0] // 2
        return cls(m[:g, :g], m[:g, g:], m[g:, :g], m[g:, g:])

    @property
    def g(self) -> int:
        return self.A.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return np.block([[self.A, self.B], [self.C, self.D]])

    def __matmul__(self, other: SymplecticMatrix) -> SymplecticMatrix:
        return SymplecticMatrix.from_matrix(self.matrix @ other.matrix)

    def __eq__(self, other):
        if not isinstance(other, SymplecticMatrix):
            return NotImplemented
        return np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash(self.matrix.tobytes())


def _j_matrix(g: int) -> np.ndarray:
    i = np.eye(g, dtype=np.int64)
    z = np.zeros((g, g), dtype=np.int64)
    return np.block([[z, i], [-i, z]])


def standard_j(g: int) -> SymplecticMatrix:
    return SymplecticMatrix.from_matrix(_j_matrix(g))


def identity(g: int) -> SymplecticMatrix:
    i = np.eye(g, dtype=np.int64)
    z = np.zeros((g, g), dtype=np.int64)
    return SymplecticMatrix(i, z, z, i)


def translation(b) -> SymplecticMatrix:
    """(I B; 0 I) for an integer symmetric B."""
    b = np.asarray(b, dtype=np.int64)
    g = b.shape[0]
    i = np.eye(g, dtype=np.int64)
    return SymplecticMatrix(i, b, np.zeros_like(b), i)


def block_diagonal(u) -> SymplecticMatrix:
    """(U^T 0; 0 U^{-1}) for U in GL(g, Z)."""
    u = np.asarray(u, dtype=np.int64)
    det = round(np.linalg.det(u))
    if abs(det) != 1:
        raise NotSymplectic("U must be unimodular")
    u_inv = np.round(np.linalg.inv(u)).astype(np.int64)
    z = np.zeros_like(u)
    return SymplecticMatrix(u.T, z, z, u_inv)


def random_generator(g: int, rng: np.random.Generator) -> SymplecticMatrix:
    """One of J, an elementary translation, or an elementary GL(g, Z) block."""
    kind = rng.integers(3)
    if kind == 0:
        return standard_j(g)
    i, j = rng.integers(g, size=2)
    sign = 1 if rng.integers(2) else -1
    if kind == 1:
        b = np.zeros((g, g), dtype=np.int64)
        b[i, j] += sign
        b[j, i] += sign if i != j else 0
        return translation(b)
    u = np.eye(g, dtype=np.int64)
    if i == j:
        u[i, i] = -1
    else:
        u[i, j] = sign
    return block_diagonal(u)


def random_symplectic(g: int, rng: np.random.Generator, length: int = 4) -> SymplecticMatrix:
    """Product of ``length`` random generators."""
    out = identity(g)
    for _ in range(length):
        out = out @ random_generator(g, rng)
    return out


def _check_genus(gamma: SymplecticMatrix, g: int) -> None:
    if gamma.g != g:
        raise DimensionMismatch(f"gamma has genus {gamma.g}, argument has genus {g}")


def _denominator(gamma: SymplecticMatrix, tau: PeriodMatrix) -> np.ndarray:
    den = gamma.C @ tau.entries + gamma.D
    cond = np.linalg.cond(den)
    if not np.isfinite(cond) or cond > MAX_DENOMINATOR_COND:
        raise SingularDenominator(f"C tau + D has condition number {cond:.3e}")
    return den


def symplectic_action(gamma: SymplecticMatrix, tau: PeriodMatrix) -> PeriodMatrix:
    """gamma . tau = (A tau + B)(C tau + D)^{-1}."""
    _check_genus(gamma, tau.g)
    den = _denominator(gamma, tau)
    num = gamma.A @ tau.entries + gamma.B
    out = np.linalg.solve(den.T, num.T).T
    # symmetric in exact arithmetic; allow rounding proportional to the size
    tol = 1e-9 * max(1.0, float(np.abs(out).max()))
    return validate_period_matrix(out, sym_tol=tol)


@dataclass(frozen=True, eq=False)
class SiegelPoint:
    z: np.ndarray
    tau: PeriodMatrix

    def __post_init__(self):
        z = np.asarray(self.z, dtype=complex).reshape(-1)
        if z.shape[0] != self.tau.g:
            raise DimensionMismatch(f"z has length {z.shape[0]}, tau has genus {self.tau.g}")
        object.__setattr__(self, "z", _frozen(z))


def act_on_point(gamma: SymplecticMatrix, pt: SiegelPoint) -> SiegelPoint:
    """gamma . (z, tau) = ((C tau + D)^{-T} z, gamma . tau)."""
    _check_genus(gamma, pt.tau.g)
    den = _denominator(gamma, pt.tau)
    z_new = np.linalg.solve(den.T, pt.z)
    return SiegelPoint(z_new, symplectic_action(gamma, pt.tau))


def act_on_characteristic(gamma: SymplecticMatrix, m):
    """Affine mod-2 action of gamma on a characteristic [eps; delta]."""
    from .characteristics import Characteristic

    _check_genus(gamma, m.g)
    eps = np.array(m.epsilon, dtype=np.int64)
    delta = np.array(m.delta, dtype=np.int64)
    A, B, C, D = gamma.A, gamma.B, gamma.C, gamma.D
    new_eps = D @ eps - C @ delta + np.diag(C @ D.T)
    new_delta = -B @ eps + A @ delta + np.diag(A @ B.T)
    return Characteristic(tuple(int(x) for x in new_eps % 2), tuple(int(x) for x in new_delta % 2))


def is_in_gamma4(gamma: SymplecticMatrix) -> bool:
    """gamma = Id mod 4."""
    return bool(np.all((gamma.matrix - np.eye(2 * gamma.g, dtype=np.int64)) % 4 == 0))


def is_in_gamma48(gamma: SymplecticMatrix) -> bool:
    """gamma in Gamma_g(4) with diag(A^T B) = diag(C^T D) = 0 mod 8."""
    if not is_in_gamma4(gamma):
        return False
    return bool(
        np.all(np.diag(gamma.A.T @ gamma.B) % 8 == 0)
        and np.all(np.diag(gamma.C.T @ gamma.D) % 8 == 0)
    )
