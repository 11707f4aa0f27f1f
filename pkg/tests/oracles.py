"""Reference computations that share no code with the package."""

import cmath
import itertools
import json
import math
from pathlib import Path

import numpy as np

FIXTURES = Path(__file__).parent / "fixtures"


def box_theta(eps, delta, z, tau, n_max=25):
    """Naive sum over the box |n_i| <= n_max, no truncation logic."""
    tau = np.asarray(tau, dtype=complex)
    g = tau.shape[0]
    eps = np.asarray(eps, dtype=float)
    delta = np.asarray(delta, dtype=float)
    z = np.asarray(z, dtype=complex)
    rng = np.arange(-n_max, n_max + 1)
    grids = np.meshgrid(*([rng] * g), indexing="ij")
    n = np.stack([x.ravel() for x in grids], axis=1).astype(float)
    v = n + eps / 2
    expo = 1j * np.pi * np.einsum("ni,ij,nj->n", v, tau, v) + 2j * np.pi * v @ (z + delta / 2)
    return complex(np.exp(expo).sum())


def theta_genus1(eps, delta, z, tau, n_max=30):
    """Scalar loop for g = 1."""
    total = 0j
    for n in range(-n_max, n_max + 1):
        v = n + eps / 2
        total += cmath.exp(1j * math.pi * v * v * tau + 2j * math.pi * v * (z + delta / 2))
    return total


def load_fixture(name):
    data = json.loads((FIXTURES / name).read_text())
    return np.array(data["re"]) + 1j * np.array(data["im"])


def symmetric_step(tau, i, j, h):
    out = np.array(tau, dtype=complex)
    out[i, j] += h
    if i != j:
        out[j, i] += h
    return out


# Hessian of the plane octic example, upper triangle as printed (row-major).
PAPER_HESSIAN_UPPER = [
    -2.79665 + 5.29764j, -9.57825 - 9.04671j, 7.36305 + 2.28697j, 7.58338 + 5.34729j, 6.15667 - 1.90199j,
    18.9738 + 8.34582j, -23.1027 - 3.10545j, -9.31944 - 0.822821j, 0.524289 - 3.64991j,
    16.8441 - 1.15986j, 13.9363 - 4.56541j, -3.32248 + 4.10698j,
    2.89309 + 1.21773j, 3.86617 - 0.546202j,
    -12.9726 - 1.928j,
]

PAPER_EIGENVALUES_TOP3 = [
    47.946229109152995 + 9.491932144035298j,
    -15.491689246713147 + 3.3401255907497958j,
    -9.512858919129267 - 1.0587349322052013j,
]

PAPER_CHARACTERISTIC = "10010/10110"


def upper_triangle(a):
    g = a.shape[0]
    return [a[i, j] for i, j in itertools.combinations_with_replacement(range(g), 2)]
