"""Closed-form iterate formulas used as ground truth for the iteration engines.

Each oracle kind is a literal transcription of an explicit formula for the
iterates of one of the built-in operators:

``picard_example_2_1``
    x_n = ((x0 - y0) + (-1/3)^n (x0 + y0)) / 2
    y_n = ((y0 - x0) + (-1/3)^n (x0 + y0)) / 2
    These are the iterates of the plain double iteration
    x_{n+1} = F(x_n, y_n), y_{n+1} = F(y_n, x_n) for F(x, y) = (x - 2y)/3.
    The difference x_n - y_n is invariant, so the limit is
    ((x0 - y0)/2, (y0 - x0)/2), which equals (0, 0) only when x0 = y0.

``krasnoselskij_example_4_1``
    x_n = (1 - 2*lam)^n x0, paired as (x_n, x_n).
    These are the iterates of x_{n+1} = (1 - lam) x_n + lam F(x_n, x_n)
    for the averaging operator F(x, y) = -(x + y)/2, i.e. lam is the
    weight placed on the operator image.

``double_krasnoselskij_example_2_1``
    x_n = ((1-lam)^n (x0 - y0) + (1-2*lam)^n (x0 + y0)) / 2
    y_n = ((1-lam)^n (y0 - x0) + (1-2*lam)^n (x0 + y0)) / 2
    These are the iterates of the componentwise relaxed double scheme
    x_{n+1} = (1-lam) x_n + lam F(x_n, y_n),
    y_{n+1} = (1-lam) y_n + lam F(y_n, x_n),
    again for the averaging operator F(x, y) = -(x + y)/2. Note that the
    skew operator (x - 2y)/3 does NOT generate these formulas: it keeps
    x_n - y_n invariant under the relaxed double scheme, so its pair
    iterates converge to ((x0-y0)/2, (y0-x0)/2) rather than to (0, 0).

Powers are accumulated by repeated multiplication (not ``pow``) so the
oracle's rounding path stays close to the engine's.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import CoupledPair
from .space import as_vector

__all__ = [
    "PICARD_EXAMPLE_2_1",
    "KRASNOSELSKIJ_EXAMPLE_4_1",
    "DOUBLE_KRASNOSELSKIJ_EXAMPLE_2_1",
    "ORACLE_KINDS",
    "OracleHandle",
    "oracle_iterate",
    "oracle_trace",
    "oracle_limit",
    "engine_theta",
]

PICARD_EXAMPLE_2_1 = "picard_example_2_1"
KRASNOSELSKIJ_EXAMPLE_4_1 = "krasnoselskij_example_4_1"
DOUBLE_KRASNOSELSKIJ_EXAMPLE_2_1 = "double_krasnoselskij_example_2_1"

ORACLE_KINDS = (
    PICARD_EXAMPLE_2_1,
    KRASNOSELSKIJ_EXAMPLE_4_1,
    DOUBLE_KRASNOSELSKIJ_EXAMPLE_2_1,
)

_KINDS_WITH_LAM = (KRASNOSELSKIJ_EXAMPLE_4_1, DOUBLE_KRASNOSELSKIJ_EXAMPLE_2_1)
_KINDS_WITH_Y0 = (PICARD_EXAMPLE_2_1, DOUBLE_KRASNOSELSKIJ_EXAMPLE_2_1)


@dataclass(frozen=True, eq=False)
class OracleHandle:
    """A closed-form formula instantiated with initial values (and weight ``lam``)."""

    kind: str
    x0: np.ndarray
    y0: np.ndarray | None = None
    lam: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ORACLE_KINDS:
            raise ValueError(f"unknown oracle kind {self.kind!r}")
        x0 = as_vector(self.x0, "x0")
        object.__setattr__(self, "x0", x0)
        if self.kind in _KINDS_WITH_Y0:
            if self.y0 is None:
                raise ValueError(f"oracle kind {self.kind!r} requires y0")
            y0 = as_vector(self.y0, "y0")
            if y0.shape != x0.shape:
                raise ValueError("x0 and y0 must have equal dimension")
            object.__setattr__(self, "y0", y0)
        elif self.y0 is not None:
            y0 = as_vector(self.y0, "y0")
            if not np.array_equal(y0, x0):
                raise ValueError(f"oracle kind {self.kind!r} is diagonal; y0 must equal x0")
            object.__setattr__(self, "y0", y0)
        if self.kind in _KINDS_WITH_LAM:
            if self.lam is None or not 0.0 < float(self.lam) < 1.0:
                raise ValueError(f"oracle kind {self.kind!r} requires lam in (0, 1), got {self.lam}")
            object.__setattr__(self, "lam", float(self.lam))


def _power(base: float, n: int) -> float:
    p = 1.0
    for _ in range(n):
        p *= base
    return p


def _pair_at(h: OracleHandle, p_slow: float, p_fast: float) -> CoupledPair:
    # p_slow = (1-lam)^n weight on the difference part, p_fast the sum part.
    half_sum = 0.5 * p_fast * (h.x0 + h.y0)
    half_diff = 0.5 * p_slow * (h.x0 - h.y0)
    return CoupledPair(half_diff + half_sum, -half_diff + half_sum)


def oracle_iterate(h: OracleHandle, n: int) -> CoupledPair:
    """The n-th iterate pair of the formula; n = 0 returns the initial values exactly."""
    n = int(n)
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n == 0:
        y0 = h.x0 if h.y0 is None else h.y0
        return CoupledPair(h.x0.copy(), y0.copy())
    if h.kind == PICARD_EXAMPLE_2_1:
        return _pair_at(h, 1.0, _power(-1.0 / 3.0, n))
    if h.kind == KRASNOSELSKIJ_EXAMPLE_4_1:
        x = _power(1.0 - 2.0 * h.lam, n) * h.x0
        return CoupledPair(x, x.copy())
    return _pair_at(h, _power(1.0 - h.lam, n), _power(1.0 - 2.0 * h.lam, n))


def oracle_trace(h: OracleHandle, n_max: int) -> list[CoupledPair]:
    """Iterates 0..n_max inclusive, bit-identical to per-index ``oracle_iterate`` calls."""
    return [oracle_iterate(h, n) for n in range(int(n_max) + 1)]


def oracle_limit(h: OracleHandle) -> CoupledPair:
    """The analytic limit of the formula as n grows."""
    if h.kind == PICARD_EXAMPLE_2_1:
        half_diff = 0.5 * (h.x0 - h.y0)
        return CoupledPair(half_diff, -half_diff)
    # Both relaxed kinds contract to the origin whenever lam is interior,
    # since |1 - lam| < 1 and |1 - 2*lam| < 1 on (0, 1).
    if not 0.0 < h.lam < 1.0:
        raise ValueError(f"no limit: lam={h.lam} outside (0, 1)")
    zero = np.zeros_like(h.x0)
    return CoupledPair(zero, zero.copy())


def engine_theta(h: OracleHandle) -> float | None:
    """Relaxation weight theta for which the engines reproduce this formula.

    The engines always place theta on the operator image, which is exactly
    the role ``lam`` plays in the formulas above, so the mapping is the
    identity. Returns None for the plain (unrelaxed) double iteration.
    """
    if h.kind == PICARD_EXAMPLE_2_1:
        return None
    return h.lam
