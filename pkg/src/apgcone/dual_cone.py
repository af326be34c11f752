"""Enumeration of the generator set of the dual of the effective-side cone.

The cone spanned by the strict transforms of the flagged fibers, the special
section and the exceptional divisors has a polyhedral dual generated by:

* the total transforms F* and M*;
* one chain divisor per configuration point p: the class whose exceptional
  part is the multiplicity vector of the curvette at p and whose F*/M*
  coefficients are the curvette's intersection numbers with the section and
  fiber germs;
* one join divisor per choice of a set of at least two distinct fibers and
  one configuration point on each: the chain divisors of the chosen points
  are rescaled by the primitive integer vector equalizing their M*
  coefficients and summed (with a single M* term).

Chain prefixes shared between chains are recognized up front (a stub is a
point, not a pair (chain, truncation)), so the enumeration itself never
produces duplicate join divisors from aliased prefixes; a coefficient-level
deduplication still runs as a safety net and keeps every provenance label.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, product
from typing import Sequence

from .lattice import PicardClass, f_star, m_star, picard_class
from .multiplicities import germ_multiplicities, intersection_numbers
from .proximity_graph import ArrowedProximityGraph, Chain, GraphStructure, as_structure

__all__ = [
    "GeneratorLabel",
    "GeneratorEntry",
    "GeneratorSet",
    "EnumerationCapError",
    "lambda_divisor",
    "primitive_z",
    "enumerate_w",
    "generator_set",
]

MAX_FIBERS = 12
MAX_W_CANDIDATES = 5_000_000


class EnumerationCapError(RuntimeError):
    """Raised when the join-divisor enumeration would exceed the configured caps."""


@dataclass(frozen=True)
class GeneratorLabel:
    """Provenance of one generator: F*, M*, Lambda(j,k) or W((j1,k1),...;z)."""

    kind: str  # "F*" | "M*" | "Lambda" | "W"
    stubs: tuple[tuple[int, int], ...] = ()
    z: tuple[int, ...] = ()

    def display(self) -> str:
        if self.kind in ("F*", "M*"):
            return self.kind
        if self.kind == "Lambda":
            j, k = self.stubs[0]
            return f"Λ({j},{k})"
        inner = ",".join(f"({j},{k})" for j, k in self.stubs)
        return f"W({inner})"


@dataclass(frozen=True)
class GeneratorEntry:
    divisor: PicardClass
    labels: tuple[GeneratorLabel, ...]

    def display_labels(self) -> str:
        return " = ".join(l.display() for l in self.labels)


@dataclass(frozen=True)
class GeneratorSet:
    entries: tuple[GeneratorEntry, ...]

    @property
    def count(self) -> int:
        return len(self.entries)

    def by_label(self, text: str) -> GeneratorEntry:
        for entry in self.entries:
            if any(l.display() == text for l in entry.labels):
                return entry
        raise KeyError(text)


def lambda_divisor(
    graph: ArrowedProximityGraph | GraphStructure, chain: Chain, k: int
) -> PicardClass:
    """The chain divisor at truncation k: a F* + b M* minus the curvette multiplicities."""
    s = as_structure(graph)
    inter = intersection_numbers(s, chain, k)
    mult = germ_multiplicities(s, chain, k)
    return picard_class(inter.a, inter.b, mult)


def primitive_z(b_values: Sequence[int]) -> tuple[int, ...]:
    """Componentwise smallest positive integers with z_h * b_h all equal.

    The common value is lcm(b_values); any other positive solution is an
    integer multiple of this one.
    """
    if not b_values:
        raise ValueError("no fiber intersection numbers given")
    if any(b < 1 for b in b_values):
        raise ValueError("fiber intersection numbers must be positive")
    common = math.lcm(*b_values)
    return tuple(common // b for b in b_values)


@dataclass
class _Stub:
    """Per-point data reused across the whole enumeration."""

    pid: str
    label: tuple[int, int]  # canonical (chain index, truncation)
    a: int
    b: int
    mult: dict[str, int]


def _stub_table(s: GraphStructure) -> dict[str, _Stub]:
    table: dict[str, _Stub] = {}
    for pid in s.point_ids:
        j, k = s.chain_at[pid]
        chain = s.chain_by_index(j)
        inter = intersection_numbers(s, chain, k)
        table[pid] = _Stub(
            pid=pid,
            label=(j, k),
            a=inter.a,
            b=inter.b,
            mult=germ_multiplicities(s, chain, k),
        )
    return table


def _w_candidate_count(stub_counts: Sequence[int]) -> int:
    total = 1
    for n in stub_counts:
        total *= 1 + n
    return total - 1 - sum(stub_counts)


def enumerate_w(
    graph: ArrowedProximityGraph | GraphStructure,
    *,
    max_fibers: int = MAX_FIBERS,
    max_candidates: int = MAX_W_CANDIDATES,
) -> list[tuple[PicardClass, GeneratorLabel]]:
    """All join divisors, one per choice of >= 2 fibers and one point on each.

    Points on one fiber pool across its constellations; chains on distinct
    fibers lie in distinct constellations, so the disjointness requirement is
    exactly the one-point-per-fiber shape of the choice.  With a single fiber
    the list is empty.  Output order: by number of fibers, then fiber order,
    then graph order of the chosen points.
    """
    s = as_structure(graph)
    if len(s.fibers) < 2:
        return []
    if len(s.fibers) > max_fibers:
        raise EnumerationCapError(
            f"{len(s.fibers)} fibers exceed the cap of {max_fibers}; raise max_fibers to proceed"
        )
    stubs_per_fiber = [s.stubs(fib) for fib in s.fibers]
    candidates = _w_candidate_count([len(st) for st in stubs_per_fiber])
    if candidates > max_candidates:
        raise EnumerationCapError(
            f"{candidates} join-divisor candidates exceed the cap of {max_candidates}; raise max_candidates to proceed"
        )

    table = _stub_table(s)
    out: list[tuple[PicardClass, GeneratorLabel]] = []
    for size in range(2, len(s.fibers) + 1):
        for fiber_idx in combinations(range(len(s.fibers)), size):
            for pids in product(*(stubs_per_fiber[i] for i in fiber_idx)):
                chosen = [table[pid] for pid in pids]
                z = primitive_z([st.b for st in chosen])
                a = sum(zh * st.a for zh, st in zip(z, chosen))
                b = z[0] * chosen[0].b
                c: dict[str, int] = {}
                for zh, st in zip(z, chosen):
                    for pid, m in st.mult.items():
                        c[pid] = zh * m  # chains on distinct fibers are disjoint
                label = GeneratorLabel(kind="W", stubs=tuple(st.label for st in chosen), z=z)
                out.append((picard_class(a, b, c), label))
    return out


def generator_set(
    graph: ArrowedProximityGraph | GraphStructure,
    *,
    max_fibers: int = MAX_FIBERS,
    max_candidates: int = MAX_W_CANDIDATES,
) -> GeneratorSet:
    """Deduplicated generators of the dual cone with full provenance labels.

    Order: F*, M*, chain divisors by graph point order (one per point, with
    every (chain, truncation) alias as a label), then join divisors in
    enumeration order.  Classes colliding coefficientwise are merged and keep
    all labels.
    """
    s = as_structure(graph)
    entries: dict[PicardClass, list[GeneratorLabel]] = {}

    def add(divisor: PicardClass, label: GeneratorLabel) -> None:
        entries.setdefault(divisor, []).append(label)

    add(f_star(), GeneratorLabel(kind="F*"))
    add(m_star(), GeneratorLabel(kind="M*"))

    table = _stub_table(s)
    for pid in s.point_ids:
        st = table[pid]
        divisor = picard_class(st.a, st.b, st.mult)
        for j, k in s.chain_aliases[pid]:
            add(divisor, GeneratorLabel(kind="Lambda", stubs=((j, k),)))

    for divisor, label in enumerate_w(s, max_fibers=max_fibers, max_candidates=max_candidates):
        add(divisor, label)

    return GeneratorSet(
        entries=tuple(GeneratorEntry(d, tuple(ls)) for d, ls in entries.items())
    )
