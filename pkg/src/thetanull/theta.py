"""Theta functions with characteristics by ellipsoid-truncated lattice sums.

    theta[m](z, tau) = sum_n exp(pi i v^T tau v + 2 pi i v^T (z + delta/2)),
    v = n + eps/2.

Writing Y = Im(tau), y = Im(z) and w = v + Y^{-1} y, the modulus of a term is
exp(-pi w^T Y w + pi y^T Y^{-1} y), a Gaussian in the lattice point centred at
-(eps/2 + Y^{-1} y). We sum over the points with ||U w|| <= R, where U is the
upper Cholesky factor of Y. The discarded tail is certified in two parts: the
exact term sizes of the points in a surrounding shell, and beyond the shell a
sphere-packing comparison against a radial integral (an incomplete gamma
function).

Radii are expressed in the metric of Im(tau) itself, so a term at radius r has
size exp(-pi r^2) relative to the centre.

Error bounds certify the truncation of the series only; floating-point
rounding is not included.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaincc, gammaln

from .characteristics import Characteristic
from .errors import DimensionMismatch, NonConvergent
from .siegel import PeriodMatrix

DEFAULT_TARGET_VALUE = 1e-10
DEFAULT_TARGET_DERIV = 1e-8
MAX_RADIUS = 40.0
_SEARCH_LIMIT = 1e3
# the analytic bound beyond the enumerated region is this fraction of the target
_OUTER_FRACTION = 1e-3

_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class ThetaEval:
    value: complex
    error_bound: float
    terms_used: int
    radius: float


@dataclass(frozen=True, eq=False)
class ThetaJet:
    """Value, z-gradient and z-Hessian of theta[m] at one point.

    Each error bound applies entrywise to its order.
    """

    value: complex
    gradient: np.ndarray
    hessian: np.ndarray
    value_error: float
    gradient_error: float
    hessian_error: float
    terms_used: int
    radius: float


# ---------------------------------------------------------------------------
# lattice geometry


def lattice_points(u: np.ndarray, center: np.ndarray, radius: float) -> np.ndarray:
    """All integer n with ||u (n - center)|| <= radius, u upper triangular.

    Rows are returned in a deterministic order (last coordinate slowest).
    """
    g = u.shape[0]
    center = np.asarray(center, dtype=float)
    r2 = radius * radius
    # partial points on coordinates i+1..g-1, with their accumulated squared norm
    pts = np.zeros((1, 0), dtype=np.int64)
    acc = np.zeros(1)
    for i in range(g - 1, -1, -1):
        diag = u[i, i]
        if pts.shape[1]:
            shift = (pts - center[i + 1 :]) @ u[i, i + 1 :]
        else:
            shift = np.zeros(pts.shape[0])
        mid = center[i] - shift / diag
        half = np.sqrt(np.maximum(r2 - acc, 0.0)) / diag
        lo = np.ceil(mid - half).astype(np.int64)
        hi = np.floor(mid + half).astype(np.int64)
        counts = np.maximum(hi - lo + 1, 0)
        total = int(counts.sum())
        parent = np.repeat(np.arange(pts.shape[0]), counts)
        starts = np.repeat(np.cumsum(counts) - counts, counts)
        new = lo[parent] + (np.arange(total) - starts)
        contrib = diag * (new - center[i]) + shift[parent]
        acc = acc[parent] + contrib * contrib
        pts = np.column_stack([new, pts[parent]])
        keep = acc <= r2 * (1 + 1e-12)
        pts, acc = pts[keep], acc[keep]
    return pts


def shortest_vector_length(u: np.ndarray) -> float:
    """min ||u n|| over nonzero integer n."""
    upper = float(np.min(np.linalg.norm(u, axis=0)))
    pts = lattice_points(u, np.zeros(u.shape[0]), upper)
    norms = np.linalg.norm(pts @ u.T, axis=1)
    norms = norms[np.any(pts != 0, axis=1)]
    return float(norms.min()) if norms.size else upper


def _lattice_data(tau: PeriodMatrix) -> tuple[float, float]:
    """(shortest vector, ||U^{-1}||_2) in the Im(tau) metric, cached on tau."""
    cached = tau.__dict__.get("_theta_lattice_data")
    if cached is None:
        u = tau.imag_cholesky
        rho = shortest_vector_length(u)
        uinv_norm = float(np.linalg.norm(np.linalg.inv(u), 2))
        cached = (rho, uinv_norm)
        tau.__dict__["_theta_lattice_data"] = cached
    return cached


# ---------------------------------------------------------------------------
# truncation bounds


def _log_tail(radius: float, rho: float, a: float, g: int, k: int) -> float:
    """log of a bound on sum_{||x|| > radius} (||x|| + a)^k exp(-||x||^2).

    x ranges over a translate of a lattice with minimum distance >= rho
    (everything in the pi-scaled metric). Balls of radius rho'/2 <= rho/2
    around the points are disjoint, and the summand is radially decreasing
    beyond radius - rho', so each term is dominated by its ball average.
    """
    best = -math.inf
    found = False
    for rho_p in (rho, radius / 2, radius / 4, radius / 8):
        if rho_p <= 0 or rho_p > rho:
            continue
        r0 = radius - rho_p
        if r0 <= 0 or 2 * r0 * (r0 + a) < k:
            continue
        s = (k + g) / 2
        q = gammaincc(s, r0 * r0)
        if q <= 0:
            return -math.inf
        val = (
            math.log(g)
            + g * math.log(2 / rho_p)
            + k * math.log1p(a / r0)
            + (g - 1) * math.log1p(rho_p / (2 * r0))
            + math.log(0.5)
            + gammaln(s)
            + math.log(q)
        )
        if not found or val < best:
            best, found = val, True
    return best if found else math.inf


def _log_error(radius: float, rho: float, uinv_norm: float, a: float, g: int, k: int) -> float:
    """log of the truncation error of the order-k derivative (metric of Im tau)."""
    # convert to the pi-scaled metric where terms are exp(-|x|^2)
    r_t, rho_t, tinv = radius * _SQRT_PI, rho * _SQRT_PI, uinv_norm / _SQRT_PI
    a_t = a * _SQRT_PI
    tail = _log_tail(r_t, rho_t, a_t, g, k)
    if k:
        tail += k * math.log(2 * math.pi * tinv)
    return tail + a_t * a_t


@lru_cache(maxsize=4096)
def _radius_for(log_target: float, rho: float, uinv_norm: float, a: float, g: int, k: int) -> float:
    def ok(r):
        return _log_error(r, rho, uinv_norm, a, g, k) <= log_target

    hi = 0.5
    while not ok(hi):
        hi *= 1.5
        if hi > _SEARCH_LIMIT:
            return math.inf
    lo = hi / 1.5 if hi > 0.5 else 0.0
    for _ in range(40):
        mid = (lo + hi) / 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _offset_norm(tau: PeriodMatrix, z: np.ndarray) -> float:
    """sqrt(y^T Y^{-1} y) for y = Im z."""
    y = z.imag
    return float(math.sqrt(max(y @ tau.imag_inv @ y, 0.0)))


@lru_cache(maxsize=256)
def _sorted_points(u_bytes: bytes, g: int, center: tuple, radius: float):
    u = np.frombuffer(u_bytes, dtype=float).reshape(g, g)
    c = np.array(center)
    pts = lattice_points(u, c, radius)
    norms = np.linalg.norm((pts - c) @ u.T, axis=1)
    order = np.argsort(norms, kind="stable")
    pts, norms = pts[order], norms[order]
    pts.setflags(write=False)
    norms.setflags(write=False)
    return pts, norms


@dataclass(frozen=True, eq=False)
class _Truncation:
    points: np.ndarray
    radius: float
    errors: dict


def _truncate(m: Characteristic, z: np.ndarray, tau: PeriodMatrix, targets: dict | None = None,
              radius: float | None = None, cap: float = MAX_RADIUS) -> _Truncation:
    """Choose the summation ellipsoid and certify its tail.

    Points out to an outer radius, where the analytic bound is negligible, are
    enumerated and their exact term majorants |term| * (2 pi |v|_inf)^k are
    summed from the outside in; the analytic bound covers everything beyond.
    Either ``targets`` (order -> error) or a fixed ``radius`` is given.
    """
    g = tau.g
    rho, uinv_norm = _lattice_data(tau)
    a = _offset_norm(tau, z)
    orders = sorted(targets) if targets is not None else [0, 1, 2]
    if targets is not None:
        outer = max(
            _radius_for(math.log(targets[k] * _OUTER_FRACTION), rho, uinv_norm, a, g, k)
            for k in orders
        )
    else:
        outer = radius + 2.0
    if not outer * uinv_norm <= cap:
        raise NonConvergent(
            f"truncation ellipsoid extends to |n| = {outer * uinv_norm:.3g} > {cap}; "
            "tau is too close to the boundary of the Siegel space"
        )
    eps = m.eps_array
    center = -(eps / 2 + tau.imag_inv @ z.imag)
    u = np.ascontiguousarray(tau.imag_cholesky)
    key = tuple(np.round(center, 14).tolist())
    pts, norms = _sorted_points(u.tobytes(), g, key, outer)
    vmax = np.abs(pts + eps / 2).max(axis=1) if len(pts) else np.zeros(0)
    modulus = np.exp(-math.pi * norms**2 + math.pi * a * a)

    suffix, beyond = {}, {}
    for k in orders:
        w = modulus * (2 * math.pi * vmax) ** k
        # suffix[k][i] = sum of the weights of the points i, i+1, ...
        suffix[k] = np.append(np.cumsum(w[::-1])[::-1], 0.0)
        beyond[k] = math.exp(_log_error(outer, rho, uinv_norm, a, g, k))

    if targets is not None:
        keep = 0
        for k in orders:
            ok = suffix[k] + beyond[k] <= targets[k]
            keep = max(keep, int(np.argmax(ok)) if ok.any() else len(pts))
        keep = max(keep, 1)
        # never split points at equal distance
        keep = int(np.searchsorted(norms, norms[keep - 1], side="right"))
        chosen = float(norms[keep - 1])
    else:
        keep = int(np.searchsorted(norms, radius, side="right"))
        chosen = radius
    errors = {k: float(suffix[k][keep] + beyond[k]) for k in orders}
    return _Truncation(pts[:keep], chosen, errors)


def truncation_radius(tau: PeriodMatrix, z, target_error: float, order: int = 0,
                      m: Characteristic | None = None, cap: float = MAX_RADIUS) -> float:
    """Radius R (metric of Im tau) whose order-``order`` truncation error is below target.

    The error covers the full term size, including the exp(pi y^T Y^{-1} y)
    growth coming from Im z, and the entrywise factor (2 pi |v|)^order of
    the differentiated series. ``m`` fixes the lattice shift eps/2 (zero
    characteristic by default).

    Raises NonConvergent when the enumerated ellipsoid reaches beyond ``cap``
    in integer coordinates.
    """
    if target_error <= 0:
        raise ValueError("target_error must be positive")
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    z = _as_vector(z, tau.g)
    m = Characteristic.zero(tau.g) if m is None else m
    return _truncate(m, z, tau, {order: target_error}, cap=cap).radius


def truncation_error(tau: PeriodMatrix, z, radius: float, order: int = 0,
                     m: Characteristic | None = None) -> float:
    """Certified tail bound when summing over ||U(n + eps/2 + Y^{-1} Im z)|| <= radius."""
    z = _as_vector(z, tau.g)
    m = Characteristic.zero(tau.g) if m is None else m
    return _truncate(m, z, tau, radius=radius).errors[order]


# ---------------------------------------------------------------------------
# argument reduction


def _as_vector(z, g: int) -> np.ndarray:
    z = np.asarray(z, dtype=complex).reshape(-1)
    if z.shape[0] != g:
        raise DimensionMismatch(f"z has length {z.shape[0]}, expected {g}")
    return z


def _reduction_shift(z: np.ndarray, tau: PeriodMatrix) -> tuple[np.ndarray, np.ndarray]:
    b = np.round(tau.imag_inv @ z.imag).astype(np.int64)
    z1 = z - tau.entries @ b
    a = np.round(z1.real).astype(np.int64)
    return a, b


def _cocycle(m: Characteristic, tau: PeriodMatrix, z_red: np.ndarray,
             a: np.ndarray, b: np.ndarray) -> complex:
    eps, delta = m.eps_array, m.delta_array
    expo = (
        1j * math.pi * (eps @ a)
        - 1j * math.pi * (b @ tau.entries @ b)
        - 2j * math.pi * (b @ z_red)
        - 1j * math.pi * (delta @ b)
    )
    return complex(np.exp(expo))


def reduce_argument(m: Characteristic, z, tau: PeriodMatrix) -> tuple[np.ndarray, complex]:
    """Write z = z_red + a + tau b with z_red in the fundamental box.

    Returns ``(z_red, c)`` with theta[m](z, tau) = c * theta[m](z_red, tau).
    Re z_red and Y^{-1} Im z_red lie in [-1/2, 1/2]^g.
    """
    z = _as_vector(z, tau.g)
    a, b = _reduction_shift(z, tau)
    z_red = z - a - tau.entries @ b
    return z_red, _cocycle(m, tau, z_red, a, b)


# ---------------------------------------------------------------------------
# summation


def _lattice_sum(m: Characteristic, z: np.ndarray, tau: PeriodMatrix, pts: np.ndarray, order: int):
    v = pts + m.eps_array / 2
    expo = 1j * math.pi * np.einsum("ni,ij,nj->n", v, tau.entries, v)
    expo += 2j * math.pi * (v @ (z + m.delta_array / 2))
    terms = np.exp(expo)
    value = complex(terms.sum())
    if order == 0:
        return value, None, None
    two_pi_i = 2j * math.pi
    weighted = v * terms[:, None]
    grad = two_pi_i * weighted.sum(axis=0)
    if order == 1:
        return value, grad, None
    h = two_pi_i**2 * (v.T @ weighted)
    hess = np.triu(h) + np.triu(h, 1).T
    return value, grad, hess


def _check(m: Characteristic, tau: PeriodMatrix) -> None:
    if m.g != tau.g:
        raise DimensionMismatch(f"characteristic has genus {m.g}, tau has genus {tau.g}")


def eval_theta(m: Characteristic, z, tau: PeriodMatrix,
               target_error: float = DEFAULT_TARGET_VALUE) -> ThetaEval:
    """theta[m](z, tau) with a certified truncation bound <= target_error."""
    _check(m, tau)
    if not target_error > 0:
        raise ValueError("target_error must be positive")
    z_red, c = reduce_argument(m, z, tau)
    scale = abs(c)
    trunc = _truncate(m, z_red, tau, {0: target_error / scale})
    value, _, _ = _lattice_sum(m, z_red, tau, trunc.points, 0)
    return ThetaEval(c * value, scale * trunc.errors[0], len(trunc.points), trunc.radius)


def _jet_targets(target_error) -> tuple[float, float, float]:
    if target_error is None:
        return DEFAULT_TARGET_VALUE, DEFAULT_TARGET_DERIV, DEFAULT_TARGET_DERIV
    if np.ndim(target_error) == 0:
        t = float(target_error)
        return t, t, t
    t0, t1, t2 = (float(t) for t in target_error)
    return t0, t1, t2


def eval_theta_jet(m: Characteristic, z, tau: PeriodMatrix, target_error=None) -> ThetaJet:
    """Value, gradient and Hessian of theta[m] in z from a single lattice pass.

    ``target_error`` is a scalar applied to every order, a triple
    (value, gradient, hessian), or None for 1e-10 / 1e-8 / 1e-8.
    """
    _check(m, tau)
    targets = _jet_targets(target_error)
    z = _as_vector(z, tau.g)
    a, b = _reduction_shift(z, tau)
    z_red = z - a - tau.entries @ b
    c = _cocycle(m, tau, z_red, a, b)
    bmax = float(np.abs(b).max()) if b.size else 0.0
    # derivatives of c(z) pull in lower orders; shrink the targets to absorb it
    amplification = abs(c) * (1 + 2 * math.pi * bmax) ** 2
    trunc = _truncate(m, z_red, tau, {k: t / amplification for k, t in enumerate(targets)})
    val, grad, hess = _lattice_sum(m, z_red, tau, trunc.points, 2)
    e0, e1, e2 = (trunc.errors[k] for k in range(3))

    if np.any(b):
        bb = b.astype(float)
        tpi = 2j * math.pi
        hess = hess - tpi * (np.outer(bb, grad) + np.outer(grad, bb)) + tpi**2 * np.outer(bb, bb) * val
        grad = grad - tpi * bb * val
        e2 = e2 + 4 * math.pi * bmax * e1 + 4 * math.pi**2 * bmax**2 * e0
        e1 = e1 + 2 * math.pi * bmax * e0
        hess = np.triu(hess) + np.triu(hess, 1).T
    s = abs(c)
    return ThetaJet(
        value=c * val,
        gradient=c * grad,
        hessian=c * hess,
        value_error=s * e0,
        gradient_error=s * e1,
        hessian_error=s * e2,
        terms_used=len(trunc.points),
        radius=trunc.radius,
    )
