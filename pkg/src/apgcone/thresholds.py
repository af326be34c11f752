"""Threshold values of the surface parameter and certified verdicts.

Every dual-cone generator D = a F* + b M* - sum c_l E_l* (other than F*,
whose entries vanish identically) contributes two rational requirements:

* nonnegative self-intersection needs delta >= (sum c^2 - 2ab) / b^2;
* a positive anticanonical product needs delta > (sum c - 2a) / b - 2.

The nonnegativity threshold ``a`` is the maximum over generators of the
smallest positive integer upper bound of the first ratio; the positivity
threshold ``b'`` is the maximum of the smallest nonnegative integer strictly
above the second.  For delta at least ``a`` the cone of curves is finite
polyhedral with the strict transforms as its minimal extremal-ray set; for
delta at least ``b = max(a, b')`` the anticanonical class is big and the
surface is a Mori dream space.  Both criteria are sufficient only, so a
verdict below threshold is "criterion-silent", never "no".

A rounding variant ``plus_ceil`` (ceiling for nonnegative arguments, else 0)
is kept selectable: it understates the positivity threshold by exactly one
whenever the binding ratio is a nonnegative integer, but matches the strict
form everywhere else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence, Union

from .dual_cone import GeneratorSet, generator_set
from .lattice import PicardClass, f_star
from .multiplicities import germ_multiplicities, intersection_numbers
from .proximity_graph import (
    ArrowedProximityGraph,
    GraphStructure,
    PointNode,
    as_structure,
    make_graph,
)

__all__ = [
    "ceil_star",
    "strict_pos_threshold",
    "plus_ceil",
    "GeneratorWitness",
    "Thresholds",
    "compute_thresholds",
    "a_of_apg",
    "b_prime_of_apg",
    "b_of_apg",
    "HypothesesNotMetError",
    "ClosedForm",
    "closed_form_free_points",
    "closed_form_constellation",
    "PlacementCapError",
    "a_of_pg",
    "Verdict",
    "report",
]

Rational = Union[int, Fraction]


def ceil_star(x: Rational) -> int:
    """Smallest positive integer upper bound of x."""
    return max(1, math.ceil(x))


def strict_pos_threshold(x: Rational) -> int:
    """Smallest nonnegative integer strictly greater than x (0 for negative x)."""
    if x < 0:
        return 0
    return math.floor(x) + 1


def plus_ceil(x: Rational) -> int:
    """Ceiling of x for nonnegative x, else 0; understates strict positivity at integers."""
    if x < 0:
        return 0
    return math.ceil(x)


@dataclass(frozen=True)
class GeneratorWitness:
    """Per-generator integer requirements behind the two thresholds."""

    labels: str
    self_int_bound: int
    positivity_bound: int
    positivity_bound_paper: int


@dataclass(frozen=True)
class Thresholds:
    a: int
    b_prime: int
    b_prime_paper: int
    b: int  # max(a, b_prime)
    witnesses: tuple[GeneratorWitness, ...]


def _requirements(d: PicardClass) -> tuple[Fraction, Fraction]:
    sum_c = sum(v for _, v in d.c)
    sum_c2 = sum(v * v for _, v in d.c)
    ra = Fraction(sum_c2 - 2 * d.a * d.b, d.b * d.b)
    rb = Fraction(sum_c - 2 * d.a, d.b) - 2
    return ra, rb


def compute_thresholds(
    graph: ArrowedProximityGraph | GraphStructure,
    generators: GeneratorSet | None = None,
) -> Thresholds:
    """Both thresholds with the per-generator witness table.

    F* is excluded (zero M* coefficient; its self-intersection vanishes
    identically and it never binds).  Every other generator has a positive
    M* coefficient.
    """
    s = as_structure(graph)
    gens = generators if generators is not None else generator_set(s)
    fstar = f_star()
    witnesses: list[GeneratorWitness] = []
    a_val, bp_val, bp_paper = 1, 0, 0
    for entry in gens.entries:
        if entry.divisor == fstar:
            continue
        ra, rb = _requirements(entry.divisor)
        w = GeneratorWitness(
            labels=entry.display_labels(),
            self_int_bound=ceil_star(ra),
            positivity_bound=strict_pos_threshold(rb),
            positivity_bound_paper=plus_ceil(rb),
        )
        witnesses.append(w)
        a_val = max(a_val, w.self_int_bound)
        bp_val = max(bp_val, w.positivity_bound)
        bp_paper = max(bp_paper, w.positivity_bound_paper)
    return Thresholds(
        a=a_val,
        b_prime=bp_val,
        b_prime_paper=bp_paper,
        b=max(a_val, bp_val),
        witnesses=tuple(witnesses),
    )


def a_of_apg(graph: ArrowedProximityGraph | GraphStructure) -> int:
    return compute_thresholds(graph).a


def b_prime_of_apg(
    graph: ArrowedProximityGraph | GraphStructure, *, paper_rounding: bool = False
) -> int:
    t = compute_thresholds(graph)
    return t.b_prime_paper if paper_rounding else t.b_prime


def b_of_apg(graph: ArrowedProximityGraph | GraphStructure) -> int:
    return compute_thresholds(graph).b


class HypothesesNotMetError(ValueError):
    """The graph does not satisfy the hypotheses of a closed-form shortcut."""


@dataclass(frozen=True)
class ClosedForm:
    a: int
    b_prime: int
    b_prime_paper: int


def closed_form_free_points(graph: ArrowedProximityGraph | GraphStructure) -> ClosedForm:
    """Closed form for configurations of free points with minimal arrows.

    Requires every point free, no special-section flags, and fiber flags only
    at origins.  Then the binding generators are the joins of full chains on
    distinct fibers: the nonnegativity threshold is the largest total point
    count of a family of chains on pairwise distinct fibers (one chain per
    fiber, and only the longest chain of each constellation can matter), and
    the positivity threshold applies the strict rounding to that count minus
    two.
    """
    s = as_structure(graph)
    if s.satellites:
        raise HypothesesNotMetError("configuration has satellite points")
    if any(n.on_special_section for n in s.node.values()):
        raise HypothesesNotMetError("special section meets the configuration")
    if any(n.on_fiber and n.parent is not None for n in s.node.values()):
        raise HypothesesNotMetError("a fiber passes through a non-origin point")

    best_per_fiber: dict[str, int] = {}
    for chain in s.chains:
        n = len(chain.points)
        if n > best_per_fiber.get(chain.fiber, 0):
            best_per_fiber[chain.fiber] = n
    a_val = sum(best_per_fiber.values())
    return ClosedForm(
        a=a_val,
        b_prime=strict_pos_threshold(a_val - 2),
        b_prime_paper=plus_ceil(a_val - 2),
    )


def closed_form_constellation(graph: ArrowedProximityGraph | GraphStructure) -> ClosedForm:
    """Closed form for a single constellation: only full-length chain divisors bind.

    With one constellation there are no join divisors, and along one chain
    both requirements are largest at the final truncation.
    """
    s = as_structure(graph)
    if len(s.origins) != 1:
        raise HypothesesNotMetError("configuration is not a single constellation")
    a_val, bp_val, bp_paper = 1, 0, 0
    for chain in s.chains:
        n = len(chain.points)
        inter = intersection_numbers(s, chain, n)
        mult = germ_multiplicities(s, chain, n)
        sum_m = sum(mult.values())
        sum_m2 = sum(m * m for m in mult.values())
        a_val = max(a_val, ceil_star(Fraction(sum_m2 - 2 * inter.a * inter.b, inter.b**2)))
        rb = Fraction(sum_m - 2 * (inter.a + inter.b), inter.b)
        bp_val = max(bp_val, strict_pos_threshold(rb))
        bp_paper = max(bp_paper, plus_ceil(rb))
    return ClosedForm(a=a_val, b_prime=bp_val, b_prime_paper=bp_paper)


class PlacementCapError(RuntimeError):
    """Raised when the arrow-placement enumeration would exceed the configured caps."""


def _free_initial_chains(s: GraphStructure, origin: str) -> list[tuple[str, ...]]:
    """All chains origin, q1, ..., qt through free points (t >= 0), a smooth germ's possible tracks."""
    out: list[tuple[str, ...]] = []

    def grow(path: tuple[str, ...]) -> None:
        out.append(path)
        for child in s.children[path[-1]]:
            if s.classify(child) == "free":
                grow(path + (child,))

    grow((origin,))
    return out


def a_of_pg(
    graph: ArrowedProximityGraph | GraphStructure,
    *,
    scope: str = "all",
    max_origins: int = 10,
    max_placements: int = 100_000,
) -> int:
    """Largest nonnegativity threshold over all arrow placements on a bare forest.

    Flags and fiber assignments of the input are ignored; only the proximity
    forest matters.  A placement consists of a fiber partition of the
    origins, a free initial chain of fiber flags per constellation, and
    optional special-section chains (at most one origin per fiber, diverging
    from the fiber chain after the origin).  Two reductions cut the search
    without changing the maximum: dropping all section flags only lowers the
    F* coefficients of generators, which raises their self-intersection
    requirement, and refining the fiber partition only enlarges the family of
    join divisors.  So only section-free placements are enumerated, on the
    finest partition ``scope`` allows ("all" and "distinct" mean pairwise
    distinct fibers; "shared" forces a single fiber).
    """
    if scope not in ("all", "distinct", "shared"):
        raise ValueError(f"unknown scope {scope!r}")
    s = as_structure(graph)
    origins = s.origins
    if len(origins) > max_origins:
        raise PlacementCapError(f"{len(origins)} origins exceed the cap of {max_origins}")

    chain_options = [_free_initial_chains(s, o) for o in origins]
    total = 1
    for opts in chain_options:
        total *= len(opts)
        if total > max_placements:
            raise PlacementCapError(
                f"more than {max_placements} fiber-chain placements; raise max_placements to proceed"
            )

    if scope == "shared":
        fibers = {o: "f" for o in origins}
    else:
        fibers = {o: f"f{i}" for i, o in enumerate(origins, start=1)}

    best = 1
    for combo in product(*chain_options):
        flagged = {pid for path in combo for pid in path}
        points = tuple(
            PointNode(
                id=p.id,
                parent=p.parent,
                proximate_to=p.proximate_to,
                on_fiber=p.id in flagged,
                on_special_section=False,
            )
            for p in s.graph.points
        )
        placed = make_graph(points, fibers)
        best = max(best, compute_thresholds(placed).a)
    return best


@dataclass(frozen=True)
class Verdict:
    """Certified verdict at one value of delta; sufficient conditions only."""

    delta: int
    a: int
    b_prime: int
    b: int
    ne_minimal: str  # "yes" | "criterion-silent"
    mori_dream: str  # "yes" | "criterion-silent"
    p2_mode: bool


def report(
    graph: ArrowedProximityGraph | GraphStructure,
    delta: int,
    *,
    p2_mode: bool = False,
    paper_rounding: bool = False,
    thresholds: Thresholds | None = None,
) -> Verdict:
    """Evaluate both criteria at one delta.

    In p2 mode the surface is a blowup of the plane factored through the
    degree-one Hirzebruch surface, so delta is forced to 1 and fibers are
    read as lines through the base point.
    """
    if delta < 0:
        raise ValueError("delta must be a nonnegative integer")
    if p2_mode and delta != 1:
        raise ValueError("p2 mode fixes delta = 1")
    t = thresholds if thresholds is not None else compute_thresholds(graph)
    b_prime = t.b_prime_paper if paper_rounding else t.b_prime
    b = max(t.a, b_prime)
    return Verdict(
        delta=delta,
        a=t.a,
        b_prime=b_prime,
        b=b,
        ne_minimal="yes" if delta >= t.a else "criterion-silent",
        mori_dream="yes" if delta >= b else "criterion-silent",
        p2_mode=p2_mode,
    )
