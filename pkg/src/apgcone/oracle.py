"""Brute-force cone oracle: exact dualization, membership and extremality.

The effective-side cone is spanned by the strict transforms of the
exceptional divisors, the flagged fibers and the special section.  Pairing a
class a F* + b M* - sum c_l E_l* against those spans gives integer linear
functionals in which the surface parameter cancels:

* against an exceptional strict transform:  c_l - sum of c over points
  proximate to l;
* against a fiber strict transform:  b - sum of c over that fiber's flags;
* against the section strict transform:  a - sum of c over section flags.

The dual cone is therefore the integer solution cone of these rows, and its
extreme rays are computed by an exact double-description pass — a second
route, independent of the generator enumeration, used to certify it.

Everything here runs on arbitrary-precision integers and fractions; no
floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence, Union

from .dual_cone import GeneratorSet, generator_set
from .lattice import DeltaLinear, PicardClass
from .proximity_graph import ArrowedProximityGraph, GraphStructure, as_structure

__all__ = [
    "InequalitySystem",
    "inequality_system",
    "class_vector",
    "DimensionCapError",
    "dual_rays_dd",
    "DualConeCheck",
    "verify_dual_cone",
    "in_cone",
    "extremality_flags",
]

MAX_DIMENSION = 24

Number = Union[int, Fraction]


class DimensionCapError(RuntimeError):
    """Raised when the ambient dimension exceeds the desk-scale cap."""


@dataclass(frozen=True)
class InequalitySystem:
    """Integer rows over the coordinates (a, b, c_1..c_N), with provenance."""

    coords: tuple[str, ...]
    rows: tuple[tuple[int, ...], ...]
    provenance: tuple[str, ...]

    @property
    def dimension(self) -> int:
        return len(self.coords)


def inequality_system(graph: ArrowedProximityGraph | GraphStructure) -> InequalitySystem:
    s = as_structure(graph)
    ids = s.point_ids
    pos = {pid: 2 + i for i, pid in enumerate(ids)}
    n = 2 + len(ids)
    rows: list[tuple[int, ...]] = []
    prov: list[str] = []

    for pid in ids:
        row = [0] * n
        row[pos[pid]] = 1
        for src in s.prox_sources[pid]:
            row[pos[src]] = -1
        rows.append(tuple(row))
        prov.append(f"E({pid})")

    for fib in s.fibers:
        row = [0] * n
        row[1] = 1
        for pid in s.stubs(fib):
            if s.node[pid].on_fiber:
                row[pos[pid]] = -1
        rows.append(tuple(row))
        prov.append(f"F~({fib})")

    row = [0] * n
    row[0] = 1
    for pid in ids:
        if s.node[pid].on_special_section:
            row[pos[pid]] = -1
    rows.append(tuple(row))
    prov.append("M0~")

    return InequalitySystem(
        coords=("F*", "M*") + ids, rows=tuple(rows), provenance=tuple(prov)
    )


def class_vector(
    system: InequalitySystem, divisor: PicardClass, delta: int | None = None
) -> tuple[Number, ...]:
    """Coordinates (a, b, c_1..c_N) of a class; delta must be supplied to flatten delta terms."""
    a = divisor.a
    if isinstance(a, DeltaLinear):
        if delta is None:
            raise ValueError("class has a delta-dependent coefficient; pass delta")
        a = a.evaluate(delta)
    c = divisor.c_map
    unknown = set(c) - set(system.coords[2:])
    if unknown:
        raise KeyError(f"class supported on points outside this graph: {sorted(unknown)}")
    return (a, divisor.b) + tuple(c.get(pid, 0) for pid in system.coords[2:])


def _dot(u: Sequence[Number], v: Sequence[Number]) -> Number:
    return sum(x * y for x, y in zip(u, v))


def _primitive(vec: Sequence[Number]) -> tuple[int, ...]:
    """Scale to coprime integers with the first nonzero entry positive."""
    denom = 1
    for x in vec:
        if isinstance(x, Fraction):
            denom = denom * x.denominator // math.gcd(denom, x.denominator)
    ints = [int(x * denom) for x in vec]
    g = 0
    for x in ints:
        g = math.gcd(g, abs(x))
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x != 0)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def _rank(rows: Sequence[Sequence[Number]]) -> int:
    mat = [[Fraction(x) for x in row] for row in rows]
    rank = 0
    cols = len(mat[0]) if mat else 0
    for col in range(cols):
        pivot = next((r for r in range(rank, len(mat)) if mat[r][col] != 0), None)
        if pivot is None:
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        inv = 1 / mat[rank][col]
        mat[rank] = [x * inv for x in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [x - f * y for x, y in zip(mat[r], mat[rank])]
        rank += 1
        if rank == len(mat):
            break
    return rank


def _initial_rays(basis_rows: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Columns of the inverse of a nonsingular row matrix, as primitive integer rays."""
    n = len(basis_rows)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(basis_rows)]
    for col in range(n):
        pivot = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [_primitive([aug[i][n + j] for i in range(n)]) for j in range(n)]


def dual_rays_dd(
    graph: ArrowedProximityGraph | GraphStructure, *, max_dimension: int = MAX_DIMENSION
) -> tuple[tuple[int, ...], ...]:
    """Extreme rays of the dual cone by exact double description.

    Starts from a simplicial cone cut out by a full-rank subset of rows, then
    inserts the remaining rows one at a time, keeping the nonnegative rays
    and the combinations of adjacent ray pairs straddling the new hyperplane
    (adjacency tested by the rank of the common tight rows).  The output is a
    canonically sorted tuple of primitive rays, independent of row order.
    """
    s = as_structure(graph)
    system = inequality_system(s)
    n = system.dimension
    if n > max_dimension:
        raise DimensionCapError(f"ambient dimension {n} exceeds the cap of {max_dimension}")

    rows = list(system.rows)
    basis: list[int] = []
    for i in range(len(rows)):
        if len(basis) == n:
            break
        if _rank([rows[j] for j in basis] + [rows[i]]) > len(basis):
            basis.append(i)
    if len(basis) < n:
        raise ValueError("inequality system is rank-deficient; the dual cone is not pointed")

    rays = _initial_rays([rows[i] for i in basis])
    done = [rows[i] for i in basis]

    for i, row in enumerate(rows):
        if i in basis:
            continue
        values = [_dot(row, ray) for ray in rays]
        if all(v >= 0 for v in values):
            done.append(row)
            continue
        pos = [r for r, v in zip(rays, values) if v > 0]
        zero = [r for r, v in zip(rays, values) if v == 0]
        neg = [r for r, v in zip(rays, values) if v < 0]
        kept = pos + zero
        for p in pos:
            for q in neg:
                tight = [held for held in done if _dot(held, p) == 0 and _dot(held, q) == 0]
                if _rank(tight) != n - 2:
                    continue
                vp, vq = _dot(row, p), _dot(row, q)
                combined = [vp * yq - vq * yp for yp, yq in zip(p, q)]
                kept.append(_primitive(combined))
        done.append(row)
        rays = kept

    return tuple(sorted(set(rays)))


@dataclass(frozen=True)
class DualConeCheck:
    ok: bool
    generator_count: int
    ray_count: int
    failures: tuple[str, ...]


def verify_dual_cone(
    graph: ArrowedProximityGraph | GraphStructure,
    generators: GeneratorSet | None = None,
) -> DualConeCheck:
    """Certify the generator enumeration against the double-description rays.

    Both inclusions: every enumerated generator must satisfy every inequality
    row (membership in the dual cone), and every extreme ray of the dual cone
    must be proportional to an enumerated generator.  Together these make the
    two cones equal.
    """
    s = as_structure(graph)
    system = inequality_system(s)
    gens = generators if generators is not None else generator_set(s)

    failures: list[str] = []
    primitive_gens = set()
    for entry in gens.entries:
        vec = class_vector(system, entry.divisor)
        primitive_gens.add(_primitive(vec))
        for row, prov in zip(system.rows, system.provenance):
            if _dot(row, vec) < 0:
                failures.append(f"{entry.display_labels()} pairs negatively with {prov}")

    rays = dual_rays_dd(s)
    for ray in rays:
        if ray not in primitive_gens:
            failures.append(f"extreme ray {ray} matches no enumerated generator")

    return DualConeCheck(
        ok=not failures,
        generator_count=gens.count,
        ray_count=len(rays),
        failures=tuple(failures),
    )


def in_cone(vectors: Sequence[Sequence[Number]], target: Sequence[Number]) -> bool:
    """Exact feasibility of target = sum t_i vectors_i with t_i >= 0 (phase-1 simplex).

    Bland's rule, fraction arithmetic; immune to degeneracy and cycling.
    """
    n = len(target)
    m = len(vectors)
    A = [[Fraction(vec[i]) for vec in vectors] for i in range(n)]
    rhs = [Fraction(x) for x in target]
    for i in range(n):
        if rhs[i] < 0:
            rhs[i] = -rhs[i]
            A[i] = [-x for x in A[i]]
    # columns: m structural then n artificial; basis starts all-artificial
    tableau = [A[i] + [Fraction(int(i == j)) for j in range(n)] + [rhs[i]] for i in range(n)]
    basis = list(range(m, m + n))

    while True:
        # reduced cost of column j for the artificial-sum objective
        entering = None
        for j in range(m + n):
            cost = (1 if j >= m else 0) - sum(
                tableau[i][j] for i in range(n) if basis[i] >= m
            )
            if cost < 0:
                entering = j
                break  # Bland: smallest index
        if entering is None:
            break
        leaving = None
        best = None
        for i in range(n):
            if tableau[i][entering] > 0:
                ratio = tableau[i][-1] / tableau[i][entering]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leaving]):
                    best, leaving = ratio, i
        if leaving is None:
            break  # unbounded objective cannot happen in phase 1; defensive
        piv = tableau[leaving][entering]
        tableau[leaving] = [x / piv for x in tableau[leaving]]
        for i in range(n):
            if i != leaving and tableau[i][entering] != 0:
                f = tableau[i][entering]
                tableau[i] = [x - f * y for x, y in zip(tableau[i], tableau[leaving])]
        basis[leaving] = entering

    artificial_sum = sum(tableau[i][-1] for i in range(n) if basis[i] >= m)
    return artificial_sum == 0


def extremality_flags(vectors: Sequence[Sequence[Number]]) -> list[bool]:
    """True where a vector is not a nonnegative combination of the others."""
    flags: list[bool] = []
    for i, vec in enumerate(vectors):
        others = [v for j, v in enumerate(vectors) if j != i]
        flags.append(not in_cone(others, vec))
    return flags
