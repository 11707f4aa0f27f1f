"""Vanishing theta nulls and the rank strata theta^h_null.

A period matrix tau lies in theta^h_null when some even theta constant
theta[m](0, tau) vanishes and the Hessian of theta[m] in z at 0 (the quadric
tangent cone of the theta divisor at the corresponding two-torsion point) has
rank at most h. By the heat equation the Hessian equals the matrix
(1 + delta_ij) 2 pi i d theta[m] / d tau_ij, so only z-derivatives are used.

In genus 5, membership in theta^3_null is the weak Schottky test for
Jacobians with a vanishing theta null: an IN_THETA_NULL_RANK_LE_3 verdict is
consistent with tau being the Jacobian of a curve with a vanishing theta
null, up to the extra components allowed by a weak Schottky solution. An
IN_THETA_NULL_RANK_GT_3 verdict certifies that tau is not such a Jacobian.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .characteristics import Characteristic, enumerate_characteristics
from .errors import AllConstantsTiny, InputError, NonConvergent, WrongGenus
from .siegel import PeriodMatrix
from .theta import (
    DEFAULT_TARGET_DERIV,
    DEFAULT_TARGET_VALUE,
    ThetaEval,
    eval_theta,
    eval_theta_jet,
)

RANK_FLOOR = 1e-300
CONSTANTS_FLOOR = 1e-12


class Verdict(str, enum.Enum):
    NOT_IN_THETA_NULL = "NOT_IN_THETA_NULL"
    IN_THETA_NULL_RANK_LE_3 = "IN_THETA_NULL_RANK_LE_3"
    IN_THETA_NULL_RANK_GT_3 = "IN_THETA_NULL_RANK_GT_3"


@dataclass(frozen=True)
class Tolerances:
    tol_vanish: float = 1e-4
    tol_rank: float = 1e-3
    target_value: float = DEFAULT_TARGET_VALUE
    target_deriv: float = DEFAULT_TARGET_DERIV

    def __post_init__(self):
        for name in ("tol_vanish", "tol_rank", "target_value", "target_deriv"):
            if not getattr(self, name) > 0:
                raise InputError(f"{name} must be positive")


DEFAULT_TOLERANCES = Tolerances()


@dataclass(frozen=True, eq=False)
class NullCandidate:
    m: Characteristic
    theta_value: complex
    theta_error: float
    theta_scale: float
    hessian: np.ndarray
    hessian_error: float
    singular_values: np.ndarray
    eigenvalues: np.ndarray
    numerical_rank: int


@dataclass(frozen=True, eq=False)
class SchottkyReport:
    g: int
    tolerances: Tolerances
    constants: dict = field(repr=False)
    theta_scale: float
    candidates: list
    min_stratum: int | None
    verdict: Verdict


def default_workers() -> int:
    raw = os.environ.get("THETA_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"THETA_THREADS must be an integer, got {raw!r}") from None
    return max(n, 1)


def theta_constants_all(tau: PeriodMatrix, target_error: float = DEFAULT_TARGET_VALUE,
                        workers: int | None = None) -> dict[Characteristic, ThetaEval]:
    """theta[m](0, tau) for every even m, in enumeration order."""
    chars = enumerate_characteristics(tau.g, "even")
    zero = np.zeros(tau.g)
    workers = default_workers() if workers is None else workers

    def one(m):
        try:
            return eval_theta(m, zero, tau, target_error)
        except NonConvergent as exc:
            raise NonConvergent(f"{exc} (characteristic {m})", characteristic=m) from exc

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, chars))
    else:
        results = [one(m) for m in chars]
    return dict(zip(chars, results))


def _scale(constants: dict[Characteristic, ThetaEval]) -> float:
    scale = max(abs(ev.value) for ev in constants.values())
    if scale < CONSTANTS_FLOOR:
        raise AllConstantsTiny(f"largest even theta constant is {scale:.3e}")
    return scale


def _vanishing(constants, scale, tol_vanish, target_error) -> list[Characteristic]:
    if not tol_vanish > 2 * target_error / scale:
        raise InputError(
            f"tol_vanish = {tol_vanish:.1e} is not above 2 * target_error / scale = "
            f"{2 * target_error / scale:.1e}"
        )
    return [m for m, ev in constants.items() if abs(ev.value) < tol_vanish * scale]


def vanishing_nulls(tau: PeriodMatrix, tol_vanish: float = DEFAULT_TOLERANCES.tol_vanish,
                    target_error: float = DEFAULT_TARGET_VALUE) -> list[Characteristic]:
    """Even m with |theta[m](0, tau)| < tol_vanish * max_m' |theta[m'](0, tau)|."""
    constants = theta_constants_all(tau, target_error)
    return _vanishing(constants, _scale(constants), tol_vanish, target_error)


def scan_nulls(tau: PeriodMatrix, tolerances: Tolerances = DEFAULT_TOLERANCES,
               workers: int | None = None):
    """All even theta constants, their largest modulus, and the vanishing ones."""
    constants = theta_constants_all(tau, tolerances.target_value, workers)
    scale = _scale(constants)
    return constants, scale, _vanishing(constants, scale, tolerances.tol_vanish, tolerances.target_value)


def numerical_rank(sigma, tol_rank: float, noise: float = 0.0) -> int:
    """Count singular values at or above tol_rank * sigma_1.

    Values below ``noise`` (an absolute error level) never count, and a
    vector whose leading value is under the floor has rank 0.
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.size == 0:
        return 0
    s1 = float(sigma[0])
    if s1 < max(RANK_FLOOR, noise):
        return 0
    return int(np.count_nonzero(sigma >= max(tol_rank * s1, noise)))


def _sorted_eigenvalues(h: np.ndarray) -> np.ndarray:
    ev = np.linalg.eigvals(h)
    order = np.lexsort((ev.imag, ev.real, -np.abs(ev)))
    return ev[order]


def null_candidate(tau: PeriodMatrix, m: Characteristic,
                   tolerances: Tolerances = DEFAULT_TOLERANCES,
                   theta_scale: float | None = None) -> NullCandidate:
    """Hessian data of theta[m] at z = 0 for a (near-)vanishing even m."""
    if not m.is_even:
        raise InputError(f"characteristic {m} is odd")
    if theta_scale is None:
        theta_scale = _scale(theta_constants_all(tau, tolerances.target_value))
    jet = eval_theta_jet(
        m, np.zeros(tau.g), tau,
        (tolerances.target_value, tolerances.target_deriv, tolerances.target_deriv),
    )
    sigma = np.linalg.svd(jet.hessian, compute_uv=False)
    # the certified entrywise bound gives a bound on the spectral norm of the error
    noise = tau.g * jet.hessian_error
    return NullCandidate(
        m=m,
        theta_value=jet.value,
        theta_error=jet.value_error,
        theta_scale=theta_scale,
        hessian=jet.hessian,
        hessian_error=jet.hessian_error,
        singular_values=sigma,
        eigenvalues=_sorted_eigenvalues(jet.hessian),
        numerical_rank=numerical_rank(sigma, tolerances.tol_rank, noise),
    )


def _verdict(min_stratum: int | None) -> Verdict:
    if min_stratum is None:
        return Verdict.NOT_IN_THETA_NULL
    if min_stratum <= 3:
        return Verdict.IN_THETA_NULL_RANK_LE_3
    return Verdict.IN_THETA_NULL_RANK_GT_3


def stratum(tau: PeriodMatrix, tolerances: Tolerances = DEFAULT_TOLERANCES,
            workers: int | None = None) -> tuple[int | None, SchottkyReport]:
    """Smallest h with tau in theta^h_null (None if no theta constant vanishes)."""
    constants, scale, vanishing = scan_nulls(tau, tolerances, workers)
    candidates = [null_candidate(tau, m, tolerances, scale) for m in vanishing]
    h = min((c.numerical_rank for c in candidates), default=None)
    report = SchottkyReport(
        g=tau.g,
        tolerances=tolerances,
        constants=constants,
        theta_scale=scale,
        candidates=candidates,
        min_stratum=h,
        verdict=_verdict(h),
    )
    return h, report


def genus5_verdict(tau: PeriodMatrix, tolerances: Tolerances = DEFAULT_TOLERANCES,
                   workers: int | None = None) -> SchottkyReport:
    """Weak Schottky test for genus 5 Jacobians with a vanishing theta null.

    IN_THETA_NULL_RANK_LE_3 means tau is consistent with a Jacobian with a
    vanishing theta null, up to the extra components permitted by the weak
    Schottky solution (decomposable tau such as i * I_5 also land here).
    IN_THETA_NULL_RANK_GT_3 certifies that tau is not a Jacobian with a
    vanishing theta null; NOT_IN_THETA_NULL means no theta constant vanishes.
    """
    if tau.g != 5:
        raise WrongGenus(f"the genus 5 verdict needs g = 5, got g = {tau.g}")
    return stratum(tau, tolerances, workers)[1]
