"""Boundary test for theta^h_null through the Gauss map of a theta divisor.

A boundary point of the partial compactification over (B, Xi) in A_{g-1} is
described by (2 z', tau') with theta'(z', tau') = 0. It lies in the closure of
theta^h_null exactly when the bordered matrix

    D = ( Hess theta'(z')   grad theta'(z') )
        ( grad theta'(z')^T        0        )

has rank <= h. At smooth divisor points this is the same as the Gauss map
z' -> [grad theta'(z')] having differential of rank <= h - 2, which
:func:`gauss_diff_rank` measures independently by finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .characteristics import Characteristic, enumerate_characteristics, two_torsion_point
from .errors import BasePoint, DimensionMismatch, NotOnDivisor, StepTooLarge
from .schottky import DEFAULT_TOLERANCES, Tolerances, numerical_rank
from .siegel import PeriodMatrix
from .theta import eval_theta, eval_theta_jet, reduce_argument

PROBE_STEP = 0.1
# derivative targets for the Gauss map; tighter than the defaults because
# finite differences divide by the step
GAUSS_TARGET = 1e-12
NEWTON_ITERATIONS = 20


@dataclass(frozen=True, eq=False)
class BorderedGaussMatrix:
    genus: int
    matrix: np.ndarray
    gradient: np.ndarray
    theta_value: complex
    local_scale: float
    singular_values: np.ndarray
    numerical_rank: int


def _vector(z, g):
    z = np.asarray(z, dtype=complex).reshape(-1)
    if z.shape[0] != g:
        raise DimensionMismatch(f"z has length {z.shape[0]}, tau has genus {g}")
    return z


def _reduced(tau_p: PeriodMatrix, z_p) -> np.ndarray:
    return reduce_argument(Characteristic.zero(tau_p.g), z_p, tau_p)[0]


def local_scale(tau_p: PeriodMatrix, z_p) -> float:
    """max |theta| over z_p and the points z_p +- 0.1 d, z_p +- 0.1 i d.

    The directions d are the coordinate vectors and their normalized sum; the
    diagonal keeps the scale honest on decomposable tau, where a coordinate
    line through a divisor point can lie inside the divisor.
    """
    g = tau_p.g
    zero = Characteristic.zero(g)
    z_p = _vector(z_p, g)
    directions = list(np.eye(g))
    if g > 1:
        directions.append(np.ones(g) / np.sqrt(g))
    vals = [abs(eval_theta(zero, z_p, tau_p).value)]
    for d in directions:
        for step in (PROBE_STEP, -PROBE_STEP, 1j * PROBE_STEP, -1j * PROBE_STEP):
            vals.append(abs(eval_theta(zero, z_p + step * d, tau_p).value))
    return max(vals)


def _on_divisor(tau_p, z_p, tolerances, target=None):
    g = tau_p.g
    jet = eval_theta_jet(Characteristic.zero(g), z_p, tau_p, target)
    scale = local_scale(tau_p, z_p)
    if abs(jet.value) > tolerances.tol_vanish * scale:
        raise NotOnDivisor(
            f"|theta'(z')| = {abs(jet.value):.3e} exceeds tol_vanish * local scale "
            f"= {tolerances.tol_vanish * scale:.3e}",
            residual=abs(jet.value),
        )
    return jet, scale


def bordered_gauss(tau_p: PeriodMatrix, z_p, tolerances: Tolerances = DEFAULT_TOLERANCES
                   ) -> BorderedGaussMatrix:
    """Hessian of the Riemann theta function bordered by its gradient, with rank.

    The matrix is assembled at the representative of z' in the fundamental
    box. Shifting z' by a lattice vector a + tau b turns D into
    c P^T D P with P unipotent, so the rank is unchanged while the
    conditioning of the unreduced matrix can be much worse.
    """
    g = tau_p.g
    z_p = _reduced(tau_p, _vector(z_p, g))
    jet, scale = _on_divisor(tau_p, z_p, tolerances)
    d = np.zeros((g + 1, g + 1), dtype=complex)
    d[:g, :g] = jet.hessian
    d[:g, g] = jet.gradient
    d[g, :g] = jet.gradient
    sigma = np.linalg.svd(d, compute_uv=False)
    noise = (g + 1) * max(jet.hessian_error, jet.gradient_error)
    return BorderedGaussMatrix(
        genus=g,
        matrix=d,
        gradient=jet.gradient,
        theta_value=jet.value,
        local_scale=scale,
        singular_values=sigma,
        numerical_rank=numerical_rank(sigma, tolerances.tol_rank, noise),
    )


def boundary_stratum_check(tau_p: PeriodMatrix, z_p, h: int,
                           tolerances: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """Whether the boundary point (2 z', tau') lies in the closure of theta^h_null."""
    return bordered_gauss(tau_p, z_p, tolerances).numerical_rank <= h


def _normalize(grad: np.ndarray) -> np.ndarray:
    v = grad / np.linalg.norm(grad)
    lead = np.flatnonzero(np.abs(v) > 1e-10)[0]
    v = v * (abs(v[lead]) / v[lead])
    rest = np.delete(v, lead)
    v[lead] = np.sqrt(max(0.0, 1.0 - float(np.vdot(rest, rest).real)))
    return v


def _smooth_gradient(tau_p, z_p, tolerances):
    jet, scale = _on_divisor(tau_p, z_p, tolerances, (GAUSS_TARGET,) * 3)
    floor = max(tolerances.tol_vanish * scale, tau_p.g * jet.gradient_error)
    if np.linalg.norm(jet.gradient) <= floor:
        raise BasePoint(
            f"gradient norm {np.linalg.norm(jet.gradient):.3e} is below "
            f"{floor:.3e}; z' is (numerically) a singular point of the divisor"
        )
    return jet, scale


def gauss_map(tau_p: PeriodMatrix, z_p, tolerances: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """The unit gradient at a smooth divisor point, first nonzero entry real positive."""
    z_p = _vector(z_p, tau_p.g)
    jet, _ = _smooth_gradient(tau_p, z_p, tolerances)
    return _normalize(jet.gradient)


def project_to_divisor(tau_p: PeriodMatrix, z, direction, tol: float = 1e-14) -> np.ndarray:
    """Newton iteration for theta'(z + t d) = 0 along a fixed direction d."""
    zero = Characteristic.zero(tau_p.g)
    z = np.array(z, dtype=complex)
    direction = np.asarray(direction, dtype=complex)
    for _ in range(NEWTON_ITERATIONS):
        jet = eval_theta_jet(zero, z, tau_p, (GAUSS_TARGET,) * 3)
        slope = jet.gradient @ direction
        if slope == 0:
            break
        step = jet.value / slope
        z = z - step * direction
        if abs(step) <= tol * max(1.0, np.linalg.norm(z)):
            break
    return z


def _chart(grad: np.ndarray, j: int) -> np.ndarray:
    return np.delete(grad / grad[j], j)


def gauss_jacobian(tau_p: PeriodMatrix, z_p, fd_step: float = 1e-4,
                   tolerances: Tolerances = DEFAULT_TOLERANCES) -> tuple[np.ndarray, float]:
    """Finite-difference differential of the Gauss map on the tangent space.

    Returns the (g-1) x (g-1) Jacobian in an affine chart of the target and a
    reference magnitude ||Hess|| / ||grad|| for rank decisions.
    """
    g = tau_p.g
    z_p = _vector(z_p, g)
    jet, scale = _smooth_gradient(tau_p, z_p, tolerances)
    grad = jet.gradient
    j = int(np.argmax(np.abs(grad)))
    normal = grad.conj() / np.linalg.norm(grad)
    # tangent space {w : grad . w = 0}, orthonormal basis
    _, _, vh = np.linalg.svd(grad[None, :])
    tangent = vh[1:].conj()
    zero = Characteristic.zero(g)

    def chart_at(z):
        p = project_to_divisor(tau_p, z, normal)
        ev = eval_theta_jet(zero, p, tau_p, (GAUSS_TARGET,) * 3)
        if abs(ev.value) > tolerances.tol_vanish * scale:
            raise StepTooLarge(
                f"probe residual {abs(ev.value):.3e} after projection; reduce fd_step"
            )
        return _chart(ev.gradient, j)

    cols = []
    for w in tangent:
        d1 = (chart_at(z_p + fd_step * w) - chart_at(z_p - fd_step * w)) / (2 * fd_step)
        d2 = (chart_at(z_p + 2 * fd_step * w) - chart_at(z_p - 2 * fd_step * w)) / (4 * fd_step)
        cols.append((4 * d1 - d2) / 3)
    jac = np.array(cols).T if cols else np.zeros((0, 0), dtype=complex)
    reference = float(np.linalg.norm(jet.hessian, 2) / abs(grad[j]))
    return jac, reference


def gauss_diff_rank(tau_p: PeriodMatrix, z_p, fd_step: float = 1e-4,
                    tolerances: Tolerances = DEFAULT_TOLERANCES) -> int:
    """Numerical rank of the Gauss map differential at a smooth divisor point."""
    jac, reference = gauss_jacobian(tau_p, z_p, fd_step, tolerances)
    if jac.size == 0:
        return 0
    sigma = np.linalg.svd(jac, compute_uv=False)
    return numerical_rank(sigma, tolerances.tol_rank, tolerances.tol_rank * reference)


def odd_two_torsion_points(tau_p: PeriodMatrix) -> list[tuple[Characteristic, np.ndarray]]:
    """The half periods (tau eps + delta)/2 of the odd characteristics."""
    return [(m, two_torsion_point(m, tau_p)) for m in enumerate_characteristics(tau_p.g, "odd")]


def find_divisor_point(tau_p: PeriodMatrix, rng: np.random.Generator,
                       tol: float = 1e-13, attempts: int = 20) -> np.ndarray:
    """A point of {theta' = 0} on a random complex line through a random point.

    The line z0 + t w is scanned on a grid of complex t for the smallest
    |theta'|, and the minimiser is refined by Newton's method in t. The root
    is returned in the fundamental box.
    """
    g = tau_p.g
    zero = Characteristic.zero(g)
    grid = np.linspace(-1, 1, 9)
    ts = (grid[:, None] + 1j * grid[None, :]).ravel()
    for _ in range(attempts):
        z0 = rng.uniform(0, 1, g) + tau_p.entries @ rng.uniform(0, 1, g)
        w = rng.normal(size=g) + 1j * rng.normal(size=g)
        w /= np.linalg.norm(w)
        vals = [abs(eval_theta(zero, z0 + t * w, tau_p).value) for t in ts]
        t = ts[int(np.argmin(vals))]
        for _ in range(NEWTON_ITERATIONS):
            jet = eval_theta_jet(zero, z0 + t * w, tau_p, (GAUSS_TARGET,) * 3)
            slope = jet.gradient @ w
            if slope == 0:
                break
            step = jet.value / slope
            t -= step
            if abs(step) < tol:
                break
        z = _reduced(tau_p, z0 + t * w)
        if abs(eval_theta(zero, z, tau_p, 1e-14).value) <= tol * local_scale(tau_p, z) * 1e3:
            return z
    raise NotOnDivisor("root search along random lines did not converge")
