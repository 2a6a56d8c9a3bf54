"""Exponent tables for the phase norms over the transition region.

The exponent plane ``{0 < c2 < c1}`` is cut into regions by the lines where
two of the radius exponents

    E1 = c1,  E2 = c2,  E3 = 2 c2 m/(m-1),  E3' = 3 c2 m/(2m-1),
    E4 = 1 - 1/m - c2,  E5 = 1

coincide.  The 13-region decomposition (without ``E3'``) carries the
exponents of ``||eps||_{L^(6/5)}`` and ``||eps||_{L^1}``; the 26-region
refinement carries ``||d eps||_{L^6}``.  Regions are identified by the
description inequalities, checked in table order with exact rationals (the
first match wins, so shared boundaries belong to the earlier row).

Every table row is a list of summands ``O(t^e)``, possibly with a
``|log t|^(5/6)`` factor; the dominant exponent of a row is the smallest
``e``.  Rows are transcribed as printed, including entries that look like
misprints; :func:`continuity_report` measures the damage.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

F = Fraction
Num = Fraction

QUANTITIES = ("eps_L65", "eps_L1", "deps_L6")


def frac(x) -> Fraction:
    """Exact rational from an int, Fraction, decimal string or float."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


# ---------------------------------------------------------------------------
# thresholds and radius exponents
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Thresholds:
    """Boundary values of ``c2`` at fixed ``(m, c1)``."""

    m: int
    c1: Fraction

    @property
    def q(self) -> Fraction:
        return 1 - F(1, self.m)

    @property
    def half_q(self) -> Fraction:  # E2 = E4 and E3 = E5
        return self.q / 2

    @property
    def half_q_c1(self) -> Fraction:  # E1 = E3
        return self.q / 2 * self.c1

    @property
    def tau(self) -> Fraction:  # E3 = E4
        m = self.m
        return F((m - 1) ** 2, m * (3 * m - 1))

    @property
    def sigma(self) -> Fraction:  # E3' = E4
        m = self.m
        return F((m - 1) * (2 * m - 1), m * (5 * m - 1))

    @property
    def u(self) -> Fraction:  # E3' = E5
        return F(2, 3) * (1 - F(1, 2 * self.m))

    @property
    def u_c1(self) -> Fraction:  # E1 = E3'
        return self.u * self.c1

    @property
    def w(self) -> Fraction:  # E1 = E4
        return self.q - self.c1


def radius_exponents(m: int, c1, c2) -> dict[str, Fraction]:
    c1, c2 = frac(c1), frac(c2)
    return {"E1": c1, "E2": c2, "E3": F(2 * m, m - 1) * c2, "E3'": F(3 * m, 2 * m - 1) * c2,
            "E4": 1 - F(1, m) - c2, "E5": F(1)}


# ---------------------------------------------------------------------------
# region descriptions
# ---------------------------------------------------------------------------

# A condition is (lhs, op, rhs) with lhs/rhs callables of (T, c1, c2).
Cond = tuple[Callable, str, Callable]


def _c1(T, c1, c2):
    return c1


def _c2(T, c1, c2):
    return c2


def _one(T, c1, c2):
    return F(1)


def _th(name):
    return lambda T, c1, c2: getattr(T, name)


def _le(a, b):
    return (a, "<=", b)


def _lt(a, b):
    return (a, "<", b)


HQ, HQC, TAU, SIG, U, UC, W = (_th(n) for n in ("half_q", "half_q_c1", "tau", "sigma", "u",
                                                 "u_c1", "w"))


@dataclass(frozen=True)
class RegionSpec:
    label: str
    conditions: tuple[Cond, ...]
    order: tuple[str, ...]
    parent: str = ""


REGIONS_13: tuple[RegionSpec, ...] = (
    RegionSpec("1", (_le(_one, _c2), _le(HQC, _c2)), ("E4", "E5", "E2", "E1", "E3")),
    RegionSpec("2", (_le(_one, _c2), _le(_c2, HQC)), ("E4", "E5", "E2", "E3", "E1")),
    RegionSpec("3", (_le(HQ, _c2), _le(_c2, _one), _le(_c2, HQC)), ("E4", "E2", "E5", "E3", "E1")),
    RegionSpec("4", (_le(_one, _c1), _le(TAU, _c2), _le(_c2, HQ)), ("E2", "E4", "E3", "E5", "E1")),
    RegionSpec("5", (_le(_one, _c1), _le(_c2, TAU)), ("E2", "E3", "E4", "E5", "E1")),
    RegionSpec("6", (_le(_one, _c1), _le(HQC, _c2), _le(_c2, _one)), ("E4", "E2", "E5", "E1", "E3")),
    RegionSpec("7", (_le(_c1, _one), _le(HQ, _c2)), ("E4", "E2", "E1", "E5", "E3")),
    RegionSpec("8", (_le(W, _c2), _le(_c2, HQ), _le(HQC, _c2)), ("E2", "E4", "E1", "E3", "E5")),
    RegionSpec("9", (_le(_c1, _one), _le(TAU, _c2), _le(_c2, HQC)), ("E2", "E4", "E3", "E1", "E5")),
    RegionSpec("10", (_le(_c1, _one), _le(_c2, TAU), _le(W, _c2)), ("E2", "E3", "E4", "E1", "E5")),
    RegionSpec("11", (_le(TAU, _c2), _le(_c2, W)), ("E2", "E1", "E4", "E3", "E5")),
    RegionSpec("12", (_le(HQC, _c2), _le(_c2, TAU)), ("E2", "E1", "E3", "E4", "E5")),
    RegionSpec("13", (_le(_c2, HQC), _le(_c2, W)), ("E2", "E3", "E1", "E4", "E5")),
)

REGIONS_26: tuple[RegionSpec, ...] = (
    RegionSpec("1_1", (_le(_one, _c2), _le(UC, _c2)), ("E4", "E5", "E2", "E1", "E3'", "E3"), "1"),
    RegionSpec("1_2", (_le(_one, _c2), _le(_c2, UC), _le(HQC, _c2)),
               ("E4", "E5", "E2", "E3'", "E1", "E3"), "1"),
    RegionSpec("2", (_le(_one, _c2), _le(_c2, HQC)), ("E4", "E5", "E2", "E3'", "E3", "E1"), "2"),
    RegionSpec("3_1", (_le(U, _c2), _le(_c2, _one), _le(_c2, HQC)),
               ("E4", "E2", "E5", "E3'", "E3", "E1"), "3"),
    RegionSpec("3_2", (_le(HQ, _c2), _le(_c2, U), _le(_c2, HQC)),
               ("E4", "E2", "E3'", "E5", "E3", "E1"), "3"),
    RegionSpec("4_1", (_le(_one, _c1), _le(SIG, _c2), _le(_c2, HQ)),
               ("E2", "E4", "E3'", "E3", "E5", "E1"), "4"),
    RegionSpec("4_2", (_le(_one, _c1), _le(TAU, _c2), _le(_c2, SIG)),
               ("E2", "E3'", "E4", "E3", "E5", "E1"), "4"),
    RegionSpec("5", (_le(_one, _c1), _le(_c2, TAU)), ("E2", "E3'", "E3", "E4", "E5", "E1"), "5"),
    RegionSpec("6_1", (_le(_one, _c1), _le(UC, _c2), _le(_c2, _one)),
               ("E4", "E2", "E5", "E1", "E3'", "E3"), "6"),
    RegionSpec("6_2", (_le(U, _c2), _le(_c2, UC), _le(HQC, _c2), _le(_c2, _one)),
               ("E4", "E2", "E5", "E3'", "E1", "E3"), "6"),
    RegionSpec("6_3", (_le(_one, _c1), _le(HQC, _c2), _le(_c2, U)),
               ("E4", "E2", "E3'", "E5", "E1", "E3"), "6"),
    RegionSpec("7_1", (_le(_c1, _one), _le(U, _c2)), ("E4", "E2", "E1", "E5", "E3'", "E3"), "7"),
    RegionSpec("7_2", (_le(UC, _c2), _le(_c2, U), _le(HQ, _c2)),
               ("E4", "E2", "E1", "E3'", "E5", "E3"), "7"),
    RegionSpec("7_3", (_le(_c1, _one), _le(HQ, _c2), _le(_c2, UC)),
               ("E4", "E2", "E3'", "E1", "E5", "E3"), "7"),
    RegionSpec("8_1", (_le(W, _c2), _le(_c2, HQ), _le(UC, _c2)),
               ("E2", "E4", "E1", "E3'", "E3", "E5"), "8"),
    RegionSpec("8_2", (_le(SIG, _c2), _le(_c2, UC), _le(HQC, _c2), _le(_c2, HQ)),
               ("E2", "E4", "E3'", "E1", "E3", "E5"), "8"),
    RegionSpec("8_3", (_le(W, _c2), _le(_c2, SIG), _le(HQC, _c2)),
               ("E2", "E3'", "E4", "E1", "E3", "E5"), "8"),
    RegionSpec("9_1", (_le(_c1, _one), _le(SIG, _c2), _le(_c2, HQC)),
               ("E2", "E4", "E3'", "E3", "E1", "E5"), "9"),
    RegionSpec("9_2", (_le(_c1, _one), _le(TAU, _c2), _le(_c2, HQC), _le(_c2, SIG)),
               ("E2", "E3'", "E4", "E3", "E1", "E5"), "9"),
    RegionSpec("10", (_le(_c1, _one), _le(_c2, TAU), _le(W, _c2)),
               ("E2", "E3'", "E3", "E4", "E1", "E5"), "10"),
    RegionSpec("11_1", (_le(SIG, _c2), _le(_c2, W)), ("E2", "E1", "E4", "E3'", "E3", "E5"), "11"),
    RegionSpec("11_2", (_le(TAU, _c2), _le(UC, _c2), _le(_c2, SIG)),
               ("E2", "E1", "E3'", "E4", "E3", "E5"), "11"),
    # printed as "c2 < 2/3 (1 - 1/(2m))"; the order column needs the c1 factor
    RegionSpec("11_3", (_le(TAU, _c2), _lt(_c2, U), _le(_c2, W)),
               ("E2", "E3'", "E1", "E4", "E3", "E5"), "11"),
    RegionSpec("12_1", (_le(UC, _c2), _le(_c2, TAU)), ("E2", "E1", "E3'", "E3", "E4", "E5"), "12"),
    RegionSpec("12_2", (_le(HQC, _c2), _lt(_c2, UC), _le(_c2, TAU)),
               ("E2", "E3'", "E1", "E3", "E4", "E5"), "12"),
    RegionSpec("13", (_le(_c2, HQC), _le(_c2, W)), ("E2", "E3'", "E3", "E1", "E4", "E5"), "13"),
)

_SPECS = {"13": REGIONS_13, "26": REGIONS_26}


class RegionError(ValueError):
    """Raised for exponent pairs outside ``{0 < c2 < c1}`` or unmatched points."""


def _check(cond: Cond, T, c1, c2) -> bool:
    lhs, op, rhs = cond
    a, b = lhs(T, c1, c2), rhs(T, c1, c2)
    return a <= b if op == "<=" else a < b


def classify_region(m: int, c1, c2, table: str = "13") -> str:
    """Region label of ``(c1, c2)`` by the table descriptions, first match wins.

    ``table`` is ``"13"`` or ``"26"``.  Inputs are converted to exact
    rationals (floats through their shortest decimal representation).
    """
    c1, c2 = frac(c1), frac(c2)
    if not (0 < c2 < c1):
        raise RegionError(f"need 0 < c2 < c1, got c1={c1}, c2={c2}")
    if m < 2:
        raise RegionError("m must be at least 2")
    T = Thresholds(m, c1)
    for spec in _SPECS[table]:
        if all(_check(c, T, c1, c2) for c in spec.conditions):
            return spec.label
    raise RegionError(f"no region matches c1={c1}, c2={c2}, m={m}")


def order_of(m: int, c1, c2, table: str = "13") -> tuple[str, ...] | None:
    """Sorted order of the radius exponents, or ``None`` on a tie."""
    E = radius_exponents(m, c1, c2)
    if table == "13":
        E.pop("E3'")
    vals = sorted(E.values())
    if any(a == b for a, b in zip(vals, vals[1:])):
        return None
    return tuple(sorted(E, key=E.get))


def classify_by_order(m: int, c1, c2, table: str = "13") -> str | None:
    """Region whose order column matches the exponents (``None`` on ties)."""
    order = order_of(m, c1, c2, table)
    if order is None:
        return None
    for spec in _SPECS[table]:
        if spec.order == order:
            return spec.label
    return None


def parent_region(label26: str) -> str:
    for spec in REGIONS_26:
        if spec.label == label26:
            return spec.parent
    raise KeyError(label26)


# ---------------------------------------------------------------------------
# exponent tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Term:
    """A summand ``O(t^exponent)``, possibly times ``|log t|^log_power``."""

    exponent: Fraction
    log_power: Fraction = F(0)


# Each row builder takes (m, c1, c2) as Fractions and returns a list of Terms.
RowFn = Callable[[int, Fraction, Fraction], list]


def _q(m):
    return 1 - F(1, m)


def _t(e, log=0):
    return Term(F(e), F(log))


LOG56 = F(5, 6)


def _l65_first(m, c1, c2):
    q = _q(m)
    return (F(8, 3) - F(11, 6) * c1) * q + F(5, 6) * (c1 - c2)


def _l65_base(m, c1, c2):
    return F(8, 3) * _q(m) - F(11, 3) * c2


def _l65_tail(m, c1, c2):
    return _q(m) - c2 / 3


def _row_l65(region: str, m: int, c1: Fraction, c2: Fraction) -> list[Term]:
    q = _q(m)
    first, base, tail = _l65_first(m, c1, c2), _l65_base(m, c1, c2), _l65_tail(m, c1, c2)
    if region in ("1", "7"):
        return [_t(base)]
    if region == "2":
        return [_t(first), _t(base)]
    if region == "3":
        return [_t(first), _t(F(7, 2) - F(8, 3 * m) - F(9, 2) * c2), _t(base)]
    if region == "4":
        if m <= 5:
            mid = _t(F(11, 6) * q + (F(5, 6) - 2 * m + F(5, 3 * (m - 1))) * c2)
        elif m == 6:
            mid = _t(F(11, 6) * (q - F(5, 6) * c2), LOG56)
        else:
            mid = _t(F(5, 6) * (2 - F(1, m) - c2))
        return [_t(first), mid, _t(base), _t(tail)]
    if region == "5":
        a = _t(F(8, 3) * q - F(5, 6) * c2 + (F(11, 6 * m) - 1) * c1)
        b = _t(F(5, 3) - F(5, 6 * m) - F(5, 6) * c2)
        if m <= 10:
            c = _t(F(11, 6) * q + (11 - m) * c2 / (3 * (m - 1)))
        elif m == 11:
            c = _t(F(5, 3), LOG56)
        else:
            c = _t(F(1, 6) * q * (10 + F(11, m)) + F(1, 6) * (1 - F(11, m)) * c2)
        return [a, b, c, _t(tail)]
    if region == "6":
        return [_t(F(7, 2) - F(8, 3 * m) - F(9, 2) * c2), _t(base)]
    if region == "8":
        return [_t(base), _t(tail)]
    if region == "9":
        if m <= 5:
            a = _t(F(11, 6) * q - F(17, 6) * c2 + F(5 * m, 3 * (m - 1)) * c2)
        elif m == 6:
            a = _t(F(11, 6) * q - F(5, 6) * c2, LOG56)
        else:
            a = _t(F(11, 6) * q - (F(1, m) - F(1, 6)) * c1 - F(5, 6) * c2)
        return [a, _t(base), _t(tail)]
    if region == "10":
        b = _t(q + (F(1, m) + F(2, 3)) * F(2 * m, m - 1) * c2)
        if m <= 5:
            a = _t(F(8, 3) * q - q ** 2 - (F(2, 3) + F(1, m)) * c2)
        elif m == 6:
            a = _t(F(55, 36) - F(5, 6) * c2, LOG56)
        else:
            a = _t(F(11, 6) * q + (F(1, m) - F(1, 6)) * c1 - F(5, 6) * c2)
        return [a, b, _t(tail)]
    if region in ("11", "12"):
        return [_t(tail)]
    if region == "13":
        return [_t(q + F(4, 3) * c2 + F(10, 3 * (m - 1)) * c2), _t(tail)]
    raise KeyError(region)


def _row_l1(region: str, m: int, c1: Fraction, c2: Fraction) -> list[Term]:
    q = _q(m)
    base = 3 * q - 4 * c2
    if m == 2:
        first = _t(F(3, 2) - c2, 1)
    else:
        first = _t(3 * q + (F(2, m) - 1) * c1 - c2)
    if region in ("1", "7"):
        return [_t(base)]
    if region == "2":
        return [first, _t(base)]
    if region == "3":
        return [first, _t(4 - F(3, m) - 5 * c2), _t(base)]
    if region == "4":
        return [first, _t(2 * q - c2 + F(2, m - 1) * c2), _t(base), _t(q)]
    if region == "5":
        if m == 2:
            return [first, _t(2 * q + F(4, m - 1) * c2), _t(q)]
        return [first, _t(2 - F(1, m) - c2), _t(2 * q + F(4, m - 1) * c2), _t(q)]
    if region == "6":
        return [_t(4 - F(3, m) - 5 * c2), _t(base)]
    if region == "8":
        return [_t(base), _t(q)]
    if region == "9":
        return [_t(2 * q - c2 - F(2, m - 1) * c2), _t(base), _t(q)]
    if region == "10":
        return [_t(2 - (1 + F(1, m)) * (c2 + F(1, m))), _t(q + F(2 * (m + 1), m - 1) * c2), _t(q)]
    if region in ("11", "12"):
        return [_t(q)]
    if region == "13":
        return [_t(q + F(2 * (m + 1), m - 1) * c2), _t(q)]
    raise KeyError(region)


def _row_l6(region: str, m: int, c1: Fraction, c2: Fraction) -> list[Term]:
    q = _q(m)
    base = _t(F(4, 3) * q - F(10, 3) * c2)
    tail = _t(q - F(8, 3) * c2)
    a_half = _t(F(4, 3) * q + (F(1, m) - F(11, 6)) * c1 - c2 / 2)
    a_sixth = _t(F(4, 3) * q + (F(1, m) - F(11, 6)) * c1 - c2 / 6)
    b = _t(F(4, 3) * q + (F(7, 6 * m) - 2) * c1 - c2 / 6)
    k25 = F(25, 6) + F(5, 3 * (m - 1))
    k23 = F(23, 6) + F(5, 3 * (m - 1))
    mixed_plus = _t(q * (F(1, m) - F(2, 3)) + (F(1, m) - F(5, 3)) * c2)
    mixed_minus = _t(q * (F(1, m) - F(2, 3)) - (F(1, m) - F(5, 3)) * c2)
    c7 = _t(F(7, 6) * q + (F(1, m) - F(11, 6)) * c1 - c2 / 6)
    d7 = _t(F(7, 6) * q - k23 * c2)
    e7 = _t(F(7, 6) * q + F(9 - 35 * m, 6 * (2 * m - 1)) * c2)
    half_row = _t(F(3, 2) - F(4, 3 * m) - F(7, 2) * c2)
    small = _t(-F(1, 2) - F(1, 3 * m) - c2 / 2)
    small6 = _t(-F(2, 3) - F(1, 6 * m) - c2 / 6)
    const13 = _t(q - F(2 * (5 * m - 3), 3 * (m - 1)))
    p53 = _t(q + (F(1, m) - F(5, 3)) * c1)
    rows = {
        "1_1": [base],
        "1_2": [a_half, base],
        "2": [b, _t(F(4, 3) * q - k25 * c2), base],
        "3_1": [b, _t(-k25), half_row, base],
        "3_2": [a_sixth, _t(F(4, 3) * q - k25 * c2), small, _t(F(4, 3) * q - F(23, 6) * c2)],
        "4_1": [b, small6, d7, base, tail],
        "4_2": [b, small6, d7, mixed_minus, tail],
        "5": [b, small6, _t(q * (F(7, 6 * m) - F(2, 3)) - (F(7, 6 * m) - F(11, 6)) * c2),
              const13, tail],
        "6_1": [half_row, base],
        "6_2": [a_half, half_row, base],
        "6_3": [a_half, small, base],
        "7_1": [base],
        "7_2": [base],
        "7_3": [a_half, base],
        "8_1": [_t(F(4, 3) * q - F(7, 2) * c2), tail],
        "8_2": [e7, base, tail],
        "8_3": [e7, mixed_plus, tail],
        "9_1": [c7, d7, base, tail],
        "9_2": [c7, d7, mixed_plus, tail],
        "10": [c7, mixed_plus, _t(q - F(2 * (5 * m - 3), 3 * (m - 1)) / c2), tail],
        "11_1": [tail],
        "11_2": [tail],
        "11_3": [p53, tail],
        "12_1": [tail],
        "12_2": [p53, tail],
        "13": [p53, const13, tail],
    }
    return rows[region]


_ROWS = {"eps_L65": (_row_l65, "13"), "eps_L1": (_row_l1, "13"), "deps_L6": (_row_l6, "26")}

#: (quantity, region) pairs with an entry flagged as a likely misprint
SUSPECT_ROWS = {
    ("deps_L6", "3_1"), ("deps_L6", "3_2"), ("deps_L6", "4_1"), ("deps_L6", "4_2"),
    ("deps_L6", "5"), ("deps_L6", "10"), ("deps_L6", "13"),
}


def table_for(quantity: str) -> str:
    return _ROWS[quantity][1]


def row_terms(quantity: str, region: str, m: int, c1, c2) -> list[Term]:
    fn, _ = _ROWS[quantity]
    return fn(region, m, frac(c1), frac(c2))


@dataclass(frozen=True)
class Prediction:
    """Dominant exponent of a table row at one ``(m, c1, c2)``."""

    quantity: str
    region: str
    exponent: Fraction
    log_power: Fraction
    terms: tuple[Term, ...]
    bound: str  # "upper": table rows are O()-bounds
    suspect: bool

    @property
    def has_log(self) -> bool:
        return self.log_power != 0


def dominant(terms: Iterable[Term]) -> Term:
    """Smallest exponent; among ties the largest log power."""
    terms = list(terms)
    e = min(tm.exponent for tm in terms)
    return Term(e, max(tm.log_power for tm in terms if tm.exponent == e))


def predicted_exponent(quantity: str, m: int, c1, c2, region: str | None = None) -> Prediction:
    """Table prediction for ``quantity`` in the region containing ``(c1, c2)``."""
    if quantity not in _ROWS:
        raise KeyError(f"unknown quantity {quantity!r}; expected one of {QUANTITIES}")
    region = region or classify_region(m, c1, c2, table_for(quantity))
    terms = row_terms(quantity, region, m, c1, c2)
    d = dominant(terms)
    return Prediction(quantity, region, d.exponent, d.log_power, tuple(terms), "upper",
                      (quantity, region) in SUSPECT_ROWS)


# ---------------------------------------------------------------------------
# exponents on the holomorphic piece and the sup norms
# ---------------------------------------------------------------------------


def p_region_exponent(quantity: str, m: int, c1) -> Fraction:
    """Exact ``t``-exponent of the norm on ``P`` (equality-order)."""
    c1 = frac(c1)
    q = _q(m)
    if quantity == "eps_L65":
        return F(8, 3) * c1 if c1 <= 1 else F(8, 3) * (1 + (c1 - 1) / m)
    if quantity == "eps_L1":
        return 3 * c1 if c1 <= 1 else 3 * (1 + (c1 - 1) / m)
    if quantity == "deps_L6":
        return c1 * (F(4, 3) - F(1, m)) - q if c1 <= 1 else F(1, 3) * (1 + (c1 - 1) / m)
    raise KeyError(quantity)


def sup_exponents(m: int, c1, c2) -> dict[str, Fraction]:
    """Dominant exponents of the ``C^0`` bounds on ``P`` and on ``Q``."""
    c1, c2 = frac(c1), frac(c2)
    q = _q(m)
    return {"P": min(c1, q + c1 / m), "Q": min(q - 2 * c2, q * (1 - c1))}


# ---------------------------------------------------------------------------
# continuity across region boundaries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ContinuityDefect:
    quantity: str
    m: int
    c1: Fraction
    c2: Fraction
    below: str
    above: str
    exp_below: Fraction
    exp_above: Fraction


def _boundary_values(m: int, c1: Fraction) -> set[Fraction]:
    T = Thresholds(m, c1)
    return {F(1), T.half_q, T.half_q_c1, T.tau, T.sigma, T.u, T.u_c1, T.w}


def continuity_report(quantity: str, m: int, c1_values: Iterable,
                      eps: Fraction = F(1, 10 ** 9)) -> tuple[int, list[ContinuityDefect]]:
    """Compare dominant exponents on both sides of every region boundary.

    For each ``c1`` the boundary values of ``c2`` in ``(0, c1)`` are computed
    exactly; the regions just below and above are found with an offset
    ``eps`` and both rows are evaluated exactly on the boundary point.
    Returns the number of boundary crossings examined and the defects.
    """
    table = table_for(quantity)
    checked = 0
    defects = []
    for c1 in c1_values:
        c1 = frac(c1)
        for b in sorted(_boundary_values(m, c1)):
            if not (eps < b < c1 - eps):
                continue
            lo = classify_region(m, c1, b - eps, table)
            hi = classify_region(m, c1, b + eps, table)
            if lo == hi:
                continue
            checked += 1
            e_lo = dominant(row_terms(quantity, lo, m, c1, b)).exponent
            e_hi = dominant(row_terms(quantity, hi, m, c1, b)).exponent
            if e_lo != e_hi:
                defects.append(ContinuityDefect(quantity, m, c1, b, lo, hi, e_lo, e_hi))
        # vertical boundary c1 = 1 crossed along fixed c2
    return checked, defects


def continuity_report_c1(quantity: str, m: int, c2_values: Iterable,
                         eps: Fraction = F(1, 10 ** 9)) -> tuple[int, list[ContinuityDefect]]:
    """Same as :func:`continuity_report` along lines of constant ``c2``.

    Boundaries crossed in the ``c1`` direction are ``c1 = 1`` and the lines
    ``c2 = k c1`` and ``c2 = q - c1``, solved for ``c1``.
    """
    table = table_for(quantity)
    q = _q(m)
    checked = 0
    defects = []
    for c2 in c2_values:
        c2 = frac(c2)
        T0 = Thresholds(m, F(1))
        cands = {F(1), q - c2}
        for k in (T0.half_q_c1, T0.u_c1):  # slopes at c1 = 1
            cands.add(c2 / k)
        for b in sorted(cands):
            if not b > c2 + eps:
                continue
            lo = classify_region(m, b - eps, c2, table)
            hi = classify_region(m, b + eps, c2, table)
            if lo == hi:
                continue
            checked += 1
            e_lo = dominant(row_terms(quantity, lo, m, b, c2)).exponent
            e_hi = dominant(row_terms(quantity, hi, m, b, c2)).exponent
            if e_lo != e_hi:
                defects.append(ContinuityDefect(quantity, m, b, c2, lo, hi, e_lo, e_hi))
    return checked, defects


# ---------------------------------------------------------------------------
# lattice checks
# ---------------------------------------------------------------------------


def lattice(n: int = 100, hi=3) -> list[Fraction]:
    """``k hi / n`` for ``k = 1..n`` as exact rationals."""
    hi = frac(hi)
    return [hi * k / n for k in range(1, n + 1)]


@dataclass(frozen=True)
class LatticeReport:
    quantity: str
    m: int
    points: int
    classified: int
    order_agreement: int
    crossings: int
    defects: tuple[ContinuityDefect, ...]

    @property
    def covered(self) -> bool:
        return self.classified == self.points

    @property
    def continuous(self) -> bool:
        return not self.defects


def lattice_report(quantity: str, m: int, n: int = 100, hi=3) -> LatticeReport:
    """Coverage and boundary continuity of one table on an ``n x n`` lattice.

    Every lattice point with ``c2 < c1`` must receive a region id.  The
    boundary crossings are examined along every lattice line of constant
    ``c1`` and of constant ``c2``.
    """
    table = table_for(quantity)
    vals = lattice(n, hi)
    points = classified = agree = 0
    for c1 in vals:
        for c2 in vals:
            if not c2 < c1:
                continue
            points += 1
            try:
                label = classify_region(m, c1, c2, table)
            except RegionError:
                continue
            classified += 1
            agree += classify_by_order(m, c1, c2, table) == label
    n1, d1 = continuity_report(quantity, m, vals)
    n2, d2 = continuity_report_c1(quantity, m, vals)
    return LatticeReport(quantity, m, points, classified, agree, n1 + n2, tuple(d1 + d2))
