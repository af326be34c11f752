"""Exact Picard-lattice arithmetic for blowups of a Hirzebruch surface.

Classes are written in the total-transform basis (F*, M*, E_l*) with the sign
convention D = a F* + b M* - sum c_l E_l*.  The surface parameter delta (the
negative of the special section's self-intersection) never enters a stored
class except through :class:`DeltaLinear` coefficients; intersection numbers
come out as exact degree-one polynomials in delta.

The pairing is determined by F*^2 = 0, F*.M* = 1, M*^2 = delta, the E_l*
orthogonal to both with E_l*^2 = -1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

from .proximity_graph import ArrowedProximityGraph, GraphStructure, as_structure

__all__ = [
    "DeltaLinear",
    "PicardClass",
    "picard_class",
    "f_star",
    "m_star",
    "e_star",
    "pairing",
    "self_intersection",
    "anticanonical_product",
    "anticanonical_class",
    "StrictTransforms",
    "strict_transform_classes",
]


@dataclass(frozen=True)
class DeltaLinear:
    """An exact integer value of the form const + slope * delta."""

    const: int
    slope: int = 0

    def evaluate(self, delta: int) -> int:
        return self.const + self.slope * delta

    def __add__(self, other: Union[int, "DeltaLinear"]) -> "DeltaLinear":
        o = _dl(other)
        return DeltaLinear(self.const + o.const, self.slope + o.slope)

    __radd__ = __add__

    def __sub__(self, other: Union[int, "DeltaLinear"]) -> "DeltaLinear":
        o = _dl(other)
        return DeltaLinear(self.const - o.const, self.slope - o.slope)

    def __rsub__(self, other: Union[int, "DeltaLinear"]) -> "DeltaLinear":
        return _dl(other) - self

    def __neg__(self) -> "DeltaLinear":
        return DeltaLinear(-self.const, -self.slope)

    def __mul__(self, other: Union[int, "DeltaLinear"]) -> "DeltaLinear":
        o = _dl(other)
        if self.slope and o.slope:
            raise ValueError("product would be quadratic in delta")
        return DeltaLinear(
            self.const * o.const,
            self.const * o.slope + self.slope * o.const,
        )

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = DeltaLinear(other)
        if not isinstance(other, DeltaLinear):
            return NotImplemented
        return self.const == other.const and self.slope == other.slope

    def __hash__(self) -> int:
        return hash(self.const) if self.slope == 0 else hash((self.const, self.slope))

    def __str__(self) -> str:
        if self.slope == 0:
            return str(self.const)
        head = {1: "δ", -1: "-δ"}.get(self.slope, f"{self.slope}δ")
        if self.const == 0:
            return head
        return f"{head} + {self.const}" if self.const > 0 else f"{head} - {-self.const}"


def _dl(x: Union[int, DeltaLinear]) -> DeltaLinear:
    return x if isinstance(x, DeltaLinear) else DeltaLinear(x)


Coefficient = Union[int, DeltaLinear]


@dataclass(frozen=True)
class PicardClass:
    """A divisor class a F* + b M* - sum c_l E_l* with exact coefficients.

    ``c`` is stored sparsely (zeros dropped) and sorted by point id, so equal
    classes compare and hash equal; deduplication of generators relies on
    this.  Only ``a`` may carry a delta term (needed for the pulled-back
    special section and the anticanonical class); ``b`` and the ``c_l`` are
    plain integers of either sign.
    """

    a: Coefficient
    b: int
    c: tuple[tuple[str, int], ...] = ()

    def coeff(self, pid: str) -> int:
        for key, value in self.c:
            if key == pid:
                return value
        return 0

    @property
    def c_map(self) -> dict[str, int]:
        return dict(self.c)

    @property
    def support(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self.c)

    def __add__(self, other: "PicardClass") -> "PicardClass":
        c = self.c_map
        for k, v in other.c:
            c[k] = c.get(k, 0) + v
        return picard_class(_add(self.a, other.a), self.b + other.b, c)

    def __sub__(self, other: "PicardClass") -> "PicardClass":
        return self + (-1) * other

    def __rmul__(self, t: int) -> "PicardClass":
        return picard_class(_scale(self.a, t), t * self.b, {k: t * v for k, v in self.c})

    def __str__(self) -> str:
        parts: list[str] = []
        if self.a != 0:
            parts.append(_coeff_str(self.a, "F*"))
        if self.b != 0:
            parts.append(_coeff_str(self.b, "M*"))
        for pid, v in self.c:
            parts.append(_coeff_str(-v, f"E({pid})"))
        if not parts:
            return "0"
        text = parts[0]
        for p in parts[1:]:
            text += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return text


def _add(x: Coefficient, y: Coefficient) -> Coefficient:
    z = _dl(x) + _dl(y)
    return z.const if z.slope == 0 else z


def _scale(x: Coefficient, t: int) -> Coefficient:
    z = _dl(x) * t
    return z.const if z.slope == 0 else z


def _coeff_str(v: Coefficient, symbol: str) -> str:
    if isinstance(v, DeltaLinear):
        return f"({v}){symbol}"
    if v == 1:
        return symbol
    if v == -1:
        return f"-{symbol}"
    return f"{v}{symbol}"


def picard_class(a: Coefficient, b: int, c: Mapping[str, int] = ()) -> PicardClass:
    """Normalize and build a class: drop zero coefficients, sort by point id."""
    if isinstance(a, DeltaLinear) and a.slope == 0:
        a = a.const
    items = tuple(sorted((k, v) for k, v in dict(c).items() if v != 0))
    return PicardClass(a=a, b=b, c=items)


def f_star() -> PicardClass:
    return picard_class(1, 0)


def m_star() -> PicardClass:
    return picard_class(0, 1)


def e_star(pid: str) -> PicardClass:
    """The total transform of one exceptional divisor (c-coefficient -1)."""
    return picard_class(0, 0, {pid: -1})


def pairing(d1: PicardClass, d2: PicardClass) -> DeltaLinear:
    """Intersection product of two classes, exact in delta."""
    cross = 0
    c2 = d2.c_map
    for pid, v in d1.c:
        w = c2.get(pid)
        if w:
            cross += v * w
    return _dl(d1.a) * d2.b + _dl(d2.a) * d1.b + DeltaLinear(0, d1.b * d2.b) - cross


def self_intersection(d: PicardClass) -> DeltaLinear:
    """D^2 = 2ab + b^2 delta - sum c_l^2, computed directly from the coefficients."""
    return 2 * _dl(d.a) * d.b + DeltaLinear(0, d.b * d.b) - sum(v * v for _, v in d.c)


def anticanonical_product(d: PicardClass) -> DeltaLinear:
    """D.(-K_X) = 2a + b(2 + delta) - sum c_l, computed directly from the coefficients."""
    return 2 * _dl(d.a) + DeltaLinear(2 * d.b, d.b) - sum(v for _, v in d.c)


def anticanonical_class(graph: ArrowedProximityGraph | GraphStructure) -> PicardClass:
    """-K_X = (2 - delta) F* + 2 M* - sum over all blown-up points of E_l*."""
    s = as_structure(graph)
    return picard_class(DeltaLinear(2, -1), 2, {pid: 1 for pid in s.point_ids})


@dataclass(frozen=True)
class StrictTransforms:
    """Classes of the strict transforms spanning the effective-side cone.

    ``exceptional`` follows graph point order; ``fibers`` lists one class per
    distinct fiber id in first-seen origin order.  The section class carries
    the delta term of M0* = M* - delta F*.
    """

    exceptional: tuple[tuple[str, PicardClass], ...]
    fibers: tuple[tuple[str, PicardClass], ...]
    section: PicardClass

    def labelled(self) -> tuple[tuple[str, PicardClass], ...]:
        rows = [(f"E({pid})", cls) for pid, cls in self.exceptional]
        rows += [(f"F~({fib})", cls) for fib, cls in self.fibers]
        rows.append(("M0~", self.section))
        return tuple(rows)


def strict_transform_classes(graph: ArrowedProximityGraph | GraphStructure) -> StrictTransforms:
    """Strict transforms of the exceptional divisors, flagged fibers and the section.

    E_l = E_l* - sum of E_mu* over points mu proximate to l; a fiber loses the
    total transforms of its flagged points; the special section additionally
    pulls back as M* - delta F* before losing its flagged points.
    """
    s = as_structure(graph)

    exceptional = []
    for pid in s.point_ids:
        c = {pid: -1}
        for src in s.prox_sources[pid]:
            c[src] = 1
        exceptional.append((pid, picard_class(0, 0, c)))

    fibers = []
    for fib in s.fibers:
        flags = {pid: 1 for pid in s.stubs(fib) if s.node[pid].on_fiber}
        fibers.append((fib, picard_class(1, 0, flags)))

    section_flags = {pid: 1 for pid in s.point_ids if s.node[pid].on_special_section}
    section = picard_class(DeltaLinear(0, -1), 1, section_flags)

    return StrictTransforms(
        exceptional=tuple(exceptional), fibers=tuple(fibers), section=section
    )
