"""Order-condition analysis for one- and two-step formulas.

A *stencil* is the nodal-weight description of an update formula

    x_{n+1} = d_n x_n + d_{n-1} x_{n-1}
              + h  (w^v_{n+1} v_{n+1} + w^v_n v_n + w^v_{n-1} v_{n-1})
              + h^2(w^a_{n+1} a_{n+1} + w^a_n a_n + w^a_{n-1} a_{n-1})

where v = x' and a = x''.  Everything in this module is computed in exact
rational arithmetic: Taylor residuals, polynomial-exactness degrees, and
linear solves for unknown weights under order conditions.  Floating point
would mask coefficient defects that these checks exist to expose.

The catalogue at the bottom collects the formulas the steppers are built
from, each with the local order its construction claims.  Two catalogued
correctors (``type1`` and ``averaged``) are stored verbatim even though
their measured exactness falls short of the claim; the verification
harness reports the discrepancy rather than silently repairing weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Mapping, Optional, Sequence, Union

__all__ = [
    "Stencil",
    "TaylorResidual",
    "InfeasibilityReport",
    "taylor_residual",
    "exactness_degree",
    "solve_weights",
    "CatalogueEntry",
    "CATALOGUE",
    "catalogue_by_name",
]

# Node offsets relative to node n, in weight-tuple order (n+1, n, n-1).
_OFFSETS = (1, 0, -1)

FractionLike = Union[Fraction, int, str]


def _frac(value: FractionLike) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


def _frac_tuple(values: Sequence[FractionLike]) -> tuple[Fraction, ...]:
    return tuple(_frac(v) for v in values)


@dataclass(frozen=True)
class Stencil:
    """Nodal weights of an update formula plus its claimed local order.

    ``claimed_order`` p means the construction advertises a local error of
    O(h^(p+1)), i.e. exact reproduction of polynomials through degree p.
    ``role`` is "predictor" or "corrector"; a predictor may not carry any
    weight at node n+1.  ``steps`` is 1 for startup formulas (no n-1 data).
    """

    name: str
    steps: int
    role: str
    displacement: tuple[Fraction, Fraction]
    velocity: tuple[Fraction, Fraction, Fraction]
    acceleration: Optional[tuple[Fraction, Fraction, Fraction]]
    claimed_order: int

    def __post_init__(self):
        object.__setattr__(self, "displacement", _frac_tuple(self.displacement))
        object.__setattr__(self, "velocity", _frac_tuple(self.velocity))
        if self.acceleration is not None:
            object.__setattr__(self, "acceleration", _frac_tuple(self.acceleration))
        if self.steps not in (1, 2):
            raise ValueError("steps must be 1 or 2")
        if self.role not in ("predictor", "corrector"):
            raise ValueError("role must be 'predictor' or 'corrector'")
        if sum(self.displacement) != 1:
            raise ValueError(f"{self.name}: displacement weights must sum to 1")
        if self.role == "predictor":
            if self.velocity[0] != 0 or (self.acceleration and self.acceleration[0] != 0):
                raise ValueError(f"{self.name}: a predictor may not weight node n+1")
        if self.steps == 1:
            trailing = [self.displacement[1], self.velocity[2]]
            if self.acceleration:
                trailing.append(self.acceleration[2])
            if any(w != 0 for w in trailing):
                raise ValueError(f"{self.name}: a one-step formula may not weight node n-1")

    @property
    def kind(self) -> str:
        return "one-step" if self.steps == 1 else self.role


@dataclass(frozen=True)
class TaylorResidual:
    """Coefficients r_k of h^k x^(k)(t_n) in the local truncation error.

    The residual is the expansion of  x(t_{n+1}) - formula  when the formula
    is fed exact nodal data, so a stencil with local error O(h^(p+1)) has
    r_k = 0 for all k <= p.
    """

    coefficients: tuple[Fraction, ...]

    def zero_through(self, order: int) -> bool:
        return all(c == 0 for c in self.coefficients[: order + 1])

    def first_nonzero(self) -> Optional[tuple[int, Fraction]]:
        for k, c in enumerate(self.coefficients):
            if c != 0:
                return k, c
        return None


def _series_term(offset: int, j: int) -> Fraction:
    # Coefficient of h^j x^(j+d) in the expansion of the d-th derivative
    # sampled at node n+offset, about t_n.  offset**0 == 1 covers node n.
    return Fraction(offset**j, factorial(j))


def taylor_residual(s: Stencil, max_order: int) -> TaylorResidual:
    """Expand x(t_{n+1}) - formula about t_n, through order ``max_order``.

    Requires max_order >= claimed_order + 1 so the result always reveals
    whether the claim holds and what the leading error coefficient is.
    """
    if max_order < s.claimed_order + 1:
        raise ValueError("max_order must be at least claimed_order + 1")
    coeffs = []
    for k in range(max_order + 1):
        acc = Fraction(1, factorial(k))  # from the x_{n+1} target
        if k == 0:
            acc -= s.displacement[0]
        acc -= s.displacement[1] * _series_term(-1, k)
        if k >= 1:
            for w, off in zip(s.velocity, _OFFSETS):
                acc -= w * _series_term(off, k - 1)
        if k >= 2 and s.acceleration is not None:
            for w, off in zip(s.acceleration, _OFFSETS):
                acc -= w * _series_term(off, k - 2)
        coeffs.append(acc)
    return TaylorResidual(tuple(coeffs))


# Node coordinates in units of h for monomial checks: t_{n+1}, t_n, t_{n-1}.
_NODE_COORDS = (Fraction(2), Fraction(1), Fraction(0))
_DEGREE_CAP = 16


def _reproduces_monomial(s: Stencil, k: int) -> bool:
    # Apply the stencil to x(t) = t^k sampled on the fixed node layout and
    # compare with the exact value at t_{n+1}.  Everything scales as h^k,
    # so the symbolic h divides out and plain rationals suffice.
    target = _NODE_COORDS[0] ** k
    total = s.displacement[0] * _NODE_COORDS[1] ** k
    total += s.displacement[1] * _NODE_COORDS[2] ** k
    if k >= 1:
        for w, c in zip(s.velocity, _NODE_COORDS):
            total += w * k * c ** (k - 1)
    if k >= 2 and s.acceleration is not None:
        for w, c in zip(s.acceleration, _NODE_COORDS):
            total += w * k * (k - 1) * c ** (k - 2)
    return total == target


def exactness_degree(s: Stencil) -> int:
    """Largest d such that every monomial t^k, k <= d, is reproduced exactly."""
    for k in range(_DEGREE_CAP + 1):
        if not _reproduces_monomial(s, k):
            return k - 1
    raise AssertionError(f"{s.name}: exactness degree exceeds probe cap {_DEGREE_CAP}")


@dataclass(frozen=True)
class InfeasibilityReport:
    """Returned by :func:`solve_weights` when no unique stencil exists.

    ``reason`` is "inconsistent" (contradictory constraints; the violated
    conditions are listed) or "underdetermined" (rank deficiency; the free
    unknowns are listed).
    """

    reason: str
    conditions: tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.reason}: {', '.join(self.conditions)}"


_SLOT_NAMES = {
    ("v", 1): "w^v_{n+1}",
    ("v", 0): "w^v_n",
    ("v", -1): "w^v_{n-1}",
    ("a", 1): "w^a_{n+1}",
    ("a", 0): "w^a_n",
    ("a", -1): "w^a_{n-1}",
}


def solve_weights(
    *,
    order_goal: int,
    displacement: Sequence[FractionLike] = (Fraction(4, 3), Fraction(-1, 3)),
    velocity_pins: Optional[Mapping[int, FractionLike]] = None,
    acceleration_pins: Optional[Mapping[int, FractionLike]] = None,
    with_acceleration: bool = False,
    velocity_weight_sum: Optional[FractionLike] = None,
    acceleration_weight_sum: Optional[FractionLike] = None,
    name: str = "solved",
    steps: int = 2,
    role: str = "corrector",
    claimed_order: Optional[int] = None,
) -> Union[Stencil, InfeasibilityReport]:
    """Solve order conditions for the free velocity/acceleration weights.

    The displacement weights are fixed (BDF2-shaped by default).  Pins fix
    individual weights by node offset (+1, 0, -1); acceleration weights
    exist only when ``with_acceleration`` is true or pins/sums mention them.
    The linear system { r_k = 0 for k <= order_goal } plus any weight-sum
    constraints is solved exactly.  A unique solution comes back as a
    :class:`Stencil`; otherwise an :class:`InfeasibilityReport` names the
    violated conditions or the free unknowns.
    """
    if order_goal < 0 or order_goal > 3:
        raise ValueError("order_goal must be in 0..3")
    disp = _frac_tuple(displacement)
    vpins = {k: _frac(v) for k, v in (velocity_pins or {}).items()}
    apins = {k: _frac(v) for k, v in (acceleration_pins or {}).items()}
    use_accel = with_acceleration or bool(apins) or acceleration_weight_sum is not None

    unknowns: list[tuple[str, int]] = []
    fixed: dict[tuple[str, int], Fraction] = {}
    for off in _OFFSETS:
        key = ("v", off)
        if off in vpins:
            fixed[key] = vpins[off]
        else:
            unknowns.append(key)
    if use_accel:
        for off in _OFFSETS:
            key = ("a", off)
            if off in apins:
                fixed[key] = apins[off]
            else:
                unknowns.append(key)

    # Each constraint row: coefficients over the unknowns, a right-hand
    # side, and the label set it carries through elimination.
    rows: list[tuple[list[Fraction], Fraction, frozenset[str]]] = []

    def residual_row(k: int) -> tuple[list[Fraction], Fraction]:
        rhs = Fraction(1, factorial(k))
        if k == 0:
            rhs -= disp[0]
        rhs -= disp[1] * _series_term(-1, k)
        coeffs = [Fraction(0)] * len(unknowns)
        for kind, off in list(fixed) + unknowns:
            if kind == "v":
                contrib = _series_term(off, k - 1) if k >= 1 else Fraction(0)
            else:
                contrib = _series_term(off, k - 2) if k >= 2 else Fraction(0)
            if (kind, off) in fixed:
                rhs -= fixed[(kind, off)] * contrib
            else:
                coeffs[unknowns.index((kind, off))] = contrib
        return coeffs, rhs

    for k in range(order_goal + 1):
        coeffs, rhs = residual_row(k)
        rows.append((coeffs, rhs, frozenset({f"r_{k}"})))

    def sum_row(kind: str, total: Fraction, label: str) -> None:
        coeffs = [Fraction(0)] * len(unknowns)
        rhs = total
        for off in _OFFSETS:
            key = (kind, off)
            if key in fixed:
                rhs -= fixed[key]
            elif key in unknowns:
                coeffs[unknowns.index(key)] = Fraction(1)
        rows.append((coeffs, rhs, frozenset({label})))

    if velocity_weight_sum is not None:
        sum_row("v", _frac(velocity_weight_sum), "velocity-sum")
    if acceleration_weight_sum is not None:
        if not use_accel:
            raise ValueError("acceleration sum constraint without acceleration weights")
        sum_row("a", _frac(acceleration_weight_sum), "acceleration-sum")

    # Exact Gauss-Jordan elimination with label bookkeeping.
    n = len(unknowns)
    work = [(list(c), r, labels) for c, r, labels in rows]
    pivot_of_col: dict[int, int] = {}
    row_index = 0
    for col in range(n):
        pivot = next(
            (i for i in range(row_index, len(work)) if work[i][0][col] != 0), None
        )
        if pivot is None:
            continue
        work[row_index], work[pivot] = work[pivot], work[row_index]
        pc, pr, pl = work[row_index]
        inv = Fraction(1) / pc[col]
        pc = [v * inv for v in pc]
        pr = pr * inv
        work[row_index] = (pc, pr, pl)
        for i in range(len(work)):
            if i == row_index or work[i][0][col] == 0:
                continue
            factor = work[i][0][col]
            merged = work[i][2] | pl
            newc = [a - factor * b for a, b in zip(work[i][0], pc)]
            work[i] = (newc, work[i][1] - factor * pr, merged)
        pivot_of_col[col] = row_index
        row_index += 1

    violated = [
        labels for coeffs, rhs, labels in work if all(c == 0 for c in coeffs) and rhs != 0
    ]
    if violated:
        names = sorted(set().union(*violated))
        return InfeasibilityReport("inconsistent", tuple(names))
    free_cols = [c for c in range(n) if c not in pivot_of_col]
    if free_cols:
        free = tuple(_SLOT_NAMES[unknowns[c]] for c in free_cols)
        return InfeasibilityReport("underdetermined", free)

    solution = dict(fixed)
    for col, ri in pivot_of_col.items():
        solution[unknowns[col]] = work[ri][1]

    velocity = tuple(solution.get(("v", off), Fraction(0)) for off in _OFFSETS)
    acceleration = (
        tuple(solution.get(("a", off), Fraction(0)) for off in _OFFSETS)
        if use_accel
        else None
    )
    return Stencil(
        name=name,
        steps=steps,
        role=role,
        displacement=(disp[0], disp[1]),
        velocity=velocity,  # type: ignore[arg-type]
        acceleration=acceleration,  # type: ignore[arg-type]
        claimed_order=order_goal if claimed_order is None else claimed_order,
    )


@dataclass(frozen=True)
class CatalogueEntry:
    """A catalogued stencil plus whether its order claim is expected to hold.

    Entries with ``order_verified`` False are retained verbatim for
    comparison runs; the verification command marks them differs-from-claim
    instead of failing on them.
    """

    stencil: Stencil
    order_verified: bool


def _entry(stencil: Stencil, order_verified: bool = True) -> CatalogueEntry:
    return CatalogueEntry(stencil, order_verified)


F = Fraction

CATALOGUE: tuple[CatalogueEntry, ...] = (
    _entry(Stencil(
        "euler_predictor", 1, "predictor",
        (F(1), F(0)), (F(0), F(1), F(0)), None, claimed_order=1,
    )),
    _entry(Stencil(
        "trapezoid_corrector", 1, "corrector",
        (F(1), F(0)), (F(1, 2), F(1, 2), F(0)), None, claimed_order=2,
    )),
    _entry(Stencil(
        "taylor_predictor", 1, "predictor",
        (F(1), F(0)), (F(0), F(1), F(0)), (F(0), F(1, 2), F(0)), claimed_order=2,
    )),
    _entry(Stencil(
        "corrected_trapezoid", 1, "corrector",
        (F(1), F(0)), (F(1, 2), F(1, 2), F(0)),
        (F(-1, 12), F(1, 12), F(0)), claimed_order=3,
    )),
    _entry(Stencil(
        "two_step_predictor", 2, "predictor",
        (F(4, 3), F(-1, 3)), (F(0), F(4, 3), F(-2, 3)), None, claimed_order=2,
    )),
    _entry(Stencil(
        "bdf2_corrector", 2, "corrector",
        (F(4, 3), F(-1, 3)), (F(2, 3), F(0), F(0)), None, claimed_order=2,
    )),
    _entry(Stencil(
        "two_step_accel_predictor", 2, "predictor",
        (F(4, 3), F(-1, 3)), (F(0), F(1, 2), F(1, 6)),
        (F(0), F(31, 36), F(-1, 36)), claimed_order=3,
    )),
    _entry(Stencil(
        "accel_corrector_type1", 2, "corrector",
        (F(4, 3), F(-1, 3)), (F(1, 9), F(5, 9), F(0)),
        (F(2, 9), F(2, 3), F(0)), claimed_order=3,
    ), order_verified=False),
    _entry(Stencil(
        "accel_corrector_type2", 2, "corrector",
        (F(4, 3), F(-1, 3)), (F(-1, 36), F(22, 36), F(3, 36)),
        (F(2, 36), F(27, 36), F(-1, 36)), claimed_order=3,
    )),
    _entry(Stencil(
        "accel_corrector_averaged", 2, "corrector",
        (F(4, 3), F(-1, 3)), (F(1, 24), F(14, 24), F(1, 24)),
        (F(10, 72), F(51, 72), F(-1, 72)), claimed_order=3,
    ), order_verified=False),
)


def catalogue_by_name(name: str) -> Stencil:
    for entry in CATALOGUE:
        if entry.stencil.name == name:
            return entry.stencil
    raise KeyError(name)
