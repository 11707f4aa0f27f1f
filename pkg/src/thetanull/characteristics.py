"""Theta characteristics m = [eps, delta] in (Z/2Z)^{2g}."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, GenusTooLarge, ParseError

MAX_ENUM_GENUS = 8


@dataclass(frozen=True, order=True)
class Characteristic:
    """Bit vectors eps and delta, both of length g.

    The textual form is ``"eps/delta"`` with bit i of each row at position i,
    e.g. ``"10010/10110"``.
    """

    epsilon: tuple[int, ...]
    delta: tuple[int, ...]

    def __post_init__(self):
        eps = tuple(int(b) for b in self.epsilon)
        delta = tuple(int(b) for b in self.delta)
        if len(eps) != len(delta) or not eps:
            raise DimensionMismatch(
                f"epsilon and delta must have the same positive length, got {len(eps)} and {len(delta)}"
            )
        if any(b not in (0, 1) for b in eps + delta):
            raise ParseError("characteristic entries must be 0 or 1")
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "delta", delta)

    @classmethod
    def parse(cls, text: str) -> Characteristic:
        parts = text.strip().split("/")
        if len(parts) != 2 or not all(p and set(p) <= {"0", "1"} for p in parts):
            raise ParseError(f"malformed characteristic {text!r}; expected e.g. '10010/10110'")
        if len(parts[0]) != len(parts[1]):
            raise ParseError(f"characteristic rows differ in length: {text!r}")
        return cls(tuple(map(int, parts[0])), tuple(map(int, parts[1])))

    @classmethod
    def zero(cls, g: int) -> Characteristic:
        return cls((0,) * g, (0,) * g)

    @property
    def g(self) -> int:
        return len(self.epsilon)

    @property
    def eps_array(self) -> np.ndarray:
        return np.array(self.epsilon, dtype=float)

    @property
    def delta_array(self) -> np.ndarray:
        return np.array(self.delta, dtype=float)

    @property
    def sign(self) -> int:
        return -1 if sum(e * d for e, d in zip(self.epsilon, self.delta)) % 2 else 1

    @property
    def is_even(self) -> bool:
        return self.sign == 1

    def split(self, k: int) -> tuple[Characteristic, Characteristic]:
        """Characteristics of the first k and the remaining g - k coordinates."""
        return (
            Characteristic(self.epsilon[:k], self.delta[:k]),
            Characteristic(self.epsilon[k:], self.delta[k:]),
        )

    def __str__(self) -> str:
        return "".join(map(str, self.epsilon)) + "/" + "".join(map(str, self.delta))


def sign(m: Characteristic) -> int:
    """e(m) = (-1)^(eps . delta)."""
    return m.sign


def enumerate_characteristics(g: int, which: str = "all") -> list[Characteristic]:
    """All characteristics of genus g, eps-major lexicographic order.

    ``which`` is one of ``"all"``, ``"even"``, ``"odd"``.
    """
    if g < 1:
        raise ValueError("g must be positive")
    if g > MAX_ENUM_GENUS:
        raise GenusTooLarge(f"enumeration is capped at g = {MAX_ENUM_GENUS}, got {g}")
    if which not in ("all", "even", "odd"):
        raise ValueError(f"unknown filter {which!r}")
    rows = list(itertools.product((0, 1), repeat=g))
    out = []
    for eps in rows:
        for delta in rows:
            m = Characteristic(eps, delta)
            if which == "all" or (which == "even") == m.is_even:
                out.append(m)
    return out


def two_torsion_point(m: Characteristic, tau) -> np.ndarray:
    """Half period (tau eps + delta) / 2."""
    if m.g != tau.g:
        raise DimensionMismatch(f"characteristic has genus {m.g}, tau has genus {tau.g}")
    return (tau.entries @ m.eps_array + m.delta_array) / 2
