"""Bivariate operators F: C x C -> R^d on box domains, plus built-in test problems.

Operators carry their domain and metadata (known coupled fixed points, a
range-containment flag, names of closed-form iterate formulas) so the
hypotheses of the convergence results they are used with become checkable
data rather than comments.

Built-in registry (addressable by name from the CLI):

``example_2_1``
    F(x, y) = (x - 2y)/3 on [-1, 1]. Weakly nonexpansive with per-argument
    constants (1/3, 2/3); not nonexpansive in the 1/2-1/2 sense and not a
    strict contraction. Every pair (t, -t) is a coupled fixed point, and
    (0, 0) is the unique one with equal components.
``example_2_2``
    F(x, y) = 4 - x^2 - 2y on [-4, 4]. Not weakly nonexpansive (the
    first-argument ratio approaches 8) and does not map its domain into
    itself, so iteration requires domain guarding. It has exactly four
    coupled fixed points: (-4, -4), (1, 1), (-1, 2), (2, -1).
``example_4_1``
    F(x, y) = -(x + y)/2 on [-1, 1]. Nonexpansive, with (0, 0) as its
    unique coupled fixed point. The plain double iteration oscillates
    (u_{n+1} = -u_n) while the relaxed schemes converge.
``linear``
    The family F(x, y) = A x + B y + c; configurable through the problem
    file format (see the cli module) or ``make_linear_operator``.

All operators are immutable after construction and evaluation is pure, so
instances are safe for concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .space import Box, as_vector, norm

__all__ = [
    "NonFiniteEvaluationError",
    "CoupledPair",
    "BivariateOperator",
    "is_coupled_fixed_point",
    "make_linear_operator",
    "example_2_1",
    "example_2_2",
    "example_4_1",
    "get_operator",
    "operator_names",
]


class NonFiniteEvaluationError(ValueError):
    """An operator produced NaN/Inf output: an operator defect, not an input error."""


@dataclass(eq=False)
class CoupledPair:
    """An ordered pair (x, y) of vectors of equal dimension."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        self.x = as_vector(self.x, "x")
        self.y = as_vector(self.y, "y")
        if self.x.shape != self.y.shape:
            raise ValueError(f"pair components differ in dimension: {self.x.shape[0]} vs {self.y.shape[0]}")

    @property
    def dim(self) -> int:
        return self.x.shape[0]

    def __iter__(self):
        return iter((self.x, self.y))

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoupledPair):
            return NotImplemented
        return np.array_equal(self.x, other.x) and np.array_equal(self.y, other.y)

    def __repr__(self) -> str:
        return f"CoupledPair(x={self.x.tolist()}, y={self.y.tolist()})"


@dataclass(eq=False)
class BivariateOperator:
    """An evaluatable map F over a box domain C, with metadata.

    ``range_in_domain`` declares that F maps C x C into C; it is trusted by
    the iteration engines when deciding whether domain guarding is needed,
    and is spot-checked by sampling in the test suite. ``closed_forms``
    maps scheme names to oracle kinds from the closed_form module, for the
    combinations where an explicit iterate formula is known.
    """

    name: str
    domain: Box
    evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray]
    known_coupled_fixed_points: tuple[CoupledPair, ...] = ()
    closed_forms: Mapping[str, str] = field(default_factory=dict)
    range_in_domain: bool = False

    @property
    def dim(self) -> int:
        return self.domain.dim

    def eval(self, x, y) -> np.ndarray:
        """Evaluate F(x, y); deterministic and side-effect free."""
        xv = as_vector(x, "x")
        yv = as_vector(y, "y")
        d = self.dim
        if xv.shape[0] != d or yv.shape[0] != d:
            raise ValueError(
                f"operator {self.name!r} has dimension {d}, "
                f"got arguments of dimension {xv.shape[0]} and {yv.shape[0]}"
            )
        out = np.asarray(self.evaluator(xv, yv), dtype=float)
        if out.ndim == 0:
            out = out.reshape(1)
        if out.shape[0] != d:
            raise NonFiniteEvaluationError(
                f"operator {self.name!r} returned dimension {out.shape[0]}, expected {d}"
            )
        if not np.isfinite(out).all():
            raise NonFiniteEvaluationError(f"operator {self.name!r} returned non-finite output")
        return out


def is_coupled_fixed_point(f: BivariateOperator, pair: CoupledPair, tol: float) -> bool:
    """True iff ``norm(F(x,y) - x) <= tol`` and ``norm(F(y,x) - y) <= tol``."""
    tol = float(tol)
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    rx = norm(f.eval(pair.x, pair.y) - pair.x)
    ry = norm(f.eval(pair.y, pair.x) - pair.y)
    return rx <= tol and ry <= tol


def _as_square_matrix(value, name: str) -> np.ndarray:
    m = np.array(value, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError(f"{name} has non-finite entries")
    return m


def _interval_range_contained(a: np.ndarray, b: np.ndarray, c: np.ndarray, box: Box) -> bool:
    # Exact componentwise range of A x + B y + c over the box, by interval arithmetic.
    lo = c.copy()
    hi = c.copy()
    for m in (a, b):
        ml = m * box.lower[None, :]
        mu = m * box.upper[None, :]
        lo = lo + np.minimum(ml, mu).sum(axis=1)
        hi = hi + np.maximum(ml, mu).sum(axis=1)
    return bool((lo >= box.lower).all() and (hi <= box.upper).all())


def make_linear_operator(
    a_matrix,
    b_matrix,
    shift,
    domain: Box,
    name: str = "linear",
    attach_fixed_point: bool | None = None,
) -> BivariateOperator:
    """Build F(x, y) = A x + B y + c on the given box domain.

    When the spectral norms satisfy ``||A|| + ||B|| < 1`` (or when
    ``attach_fixed_point=True`` is forced), the equal-component coupled
    fixed point solving ``(I - A - B) xbar = c`` is attached to the
    operator metadata. Range containment in the domain is decided exactly
    by interval arithmetic.
    """
    a = _as_square_matrix(a_matrix, "a_matrix")
    b = _as_square_matrix(b_matrix, "b_matrix")
    if a.shape != b.shape:
        raise ValueError(f"a_matrix and b_matrix differ in shape: {a.shape} vs {b.shape}")
    c = as_vector(shift, "shift")
    d = a.shape[0]
    if c.shape[0] != d:
        raise ValueError(f"shift has dimension {c.shape[0]}, matrices are {d}x{d}")
    if domain.dim != d:
        raise ValueError(f"domain has dimension {domain.dim}, matrices are {d}x{d}")

    norm_a = float(np.linalg.norm(a, 2))
    norm_b = float(np.linalg.norm(b, 2))
    known: tuple[CoupledPair, ...] = ()
    want_fixed_point = attach_fixed_point
    if want_fixed_point is None:
        want_fixed_point = norm_a + norm_b < 1.0
    if want_fixed_point:
        system = np.eye(d) - a - b
        try:
            xbar = np.linalg.solve(system, c)
        except np.linalg.LinAlgError as exc:
            raise ValueError("fixed point requested but (I - A - B) is singular") from exc
        known = (CoupledPair(xbar, xbar),)

    def evaluator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return a @ x + b @ y + c

    return BivariateOperator(
        name=name,
        domain=domain,
        evaluator=evaluator,
        known_coupled_fixed_points=known,
        range_in_domain=_interval_range_contained(a, b, c, domain),
    )


def example_2_1() -> BivariateOperator:
    """The skew averaging map (x - 2y)/3 on [-1, 1], componentwise in any dimension."""
    zero = CoupledPair([0.0], [0.0])
    return BivariateOperator(
        name="example_2_1",
        domain=Box([-1.0], [1.0]),
        evaluator=lambda x, y: (x - 2.0 * y) / 3.0,
        known_coupled_fixed_points=(zero,),
        closed_forms={"picard_double": "picard_example_2_1"},
        range_in_domain=True,
    )


def example_2_2() -> BivariateOperator:
    """The quadratic map 4 - x^2 - 2y on [-4, 4]; does not map its domain into itself."""
    fixed = tuple(
        CoupledPair([px], [py]) for px, py in ((-4.0, -4.0), (1.0, 1.0), (-1.0, 2.0), (2.0, -1.0))
    )
    return BivariateOperator(
        name="example_2_2",
        domain=Box([-4.0], [4.0]),
        evaluator=lambda x, y: 4.0 - x * x - 2.0 * y,
        known_coupled_fixed_points=fixed,
        range_in_domain=False,
    )


def example_4_1() -> BivariateOperator:
    """The averaging map -(x + y)/2 on [-1, 1]."""
    zero = CoupledPair([0.0], [0.0])
    return BivariateOperator(
        name="example_4_1",
        domain=Box([-1.0], [1.0]),
        evaluator=lambda x, y: -(x + y) / 2.0,
        known_coupled_fixed_points=(zero,),
        closed_forms={
            "krasnoselskij_diagonal": "krasnoselskij_example_4_1",
            "krasnoselskij_double": "double_krasnoselskij_example_2_1",
        },
        range_in_domain=True,
    )


_BUILDERS: dict[str, Callable[[], BivariateOperator]] = {
    "example_2_1": example_2_1,
    "example_2_2": example_2_2,
    "example_4_1": example_4_1,
}


def operator_names() -> tuple[str, ...]:
    """Registry names usable with :func:`get_operator` (plus 'linear' via the CLI)."""
    return tuple(sorted(_BUILDERS))


def get_operator(name: str) -> BivariateOperator:
    """Fresh instance of a registered operator."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ValueError(
            f"unknown operator {name!r}; registered names: {', '.join(operator_names())}"
        ) from None
    return builder()
