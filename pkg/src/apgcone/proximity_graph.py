"""Data model, validation and derived structure for arrowed proximity graphs.

An arrowed proximity graph records a configuration of infinitely near points
over a Hirzebruch surface: a parent forest of blowup centers (one rooted tree
per constellation), the full proximity relation between centers, and two kinds
of flags ("arrows") marking the points swept by the strict transform of the
fiber through each constellation origin and by the strict transform of the
special section.

Everything here is combinatorial; no coordinates or ground field appear.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Mapping

__all__ = [
    "PointNode",
    "ArrowedProximityGraph",
    "make_graph",
    "Violation",
    "ValidationReport",
    "InvalidGraphError",
    "validate",
    "Chain",
    "GraphStructure",
    "derive_chains",
    "as_structure",
]

# Validation rule codes (stable identifiers used in reports and tests).
RULE_EMPTY = "empty-graph"
RULE_DUPLICATE_ID = "duplicate-id"
RULE_DANGLING = "dangling-reference"
RULE_PARENT_CYCLE = "parent-cycle"
RULE_ORIGIN_PROXIMITY = "origin-proximity"
RULE_PARENT_NOT_PROXIMATE = "parent-not-proximate"
RULE_PROXIMITY_ARITY = "proximity-arity"
RULE_PROXIMITY_ANCESTOR = "proximity-ancestor"
RULE_PROXIMITY_SEGMENT = "proximity-segment"
RULE_FLAG_ON_SATELLITE = "flag-on-satellite"
RULE_FLAG_CHAIN = "flag-chain"
RULE_ORIGIN_FIBER_FLAG = "origin-fiber-flag"
RULE_FLAG_OVERLAP = "fiber-section-overlap"
RULE_SECTION_PER_FIBER = "section-once-per-fiber"
RULE_FIBER_MAP = "fiber-map"


@dataclass(frozen=True)
class PointNode:
    """One blowup center.

    ``parent`` is absent exactly for constellation origins (proper points of
    the base surface).  ``proximate_to`` lists every earlier point whose
    exceptional divisor still passes through this one; it always contains the
    parent and has at most two members (free point: one, satellite: two).
    """

    id: str
    parent: str | None = None
    proximate_to: tuple[str, ...] = ()
    on_fiber: bool = False
    on_special_section: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "proximate_to", tuple(sorted(set(self.proximate_to))))


@dataclass(frozen=True, eq=False)
class ArrowedProximityGraph:
    """An ordered list of points plus the fiber id of each constellation origin.

    Two origins may share a fiber id (their constellations sit on one fiber).
    The list order fixes the numbering of chains and of exceptional classes in
    every downstream computation.
    """

    points: tuple[PointNode, ...]
    fiber_of_origin: Mapping[str, str]

    def node(self, pid: str) -> PointNode:
        for p in self.points:
            if p.id == pid:
                return p
        raise KeyError(pid)


def make_graph(points: Iterable[PointNode], fibers: Mapping[str, str]) -> ArrowedProximityGraph:
    """Build a graph, normalizing origin fiber flags.

    A proper point always lies on its fiber, so every parentless node is
    given ``on_fiber=True`` even if the input omitted the flag.
    """
    pts = tuple(
        replace(p, on_fiber=True) if p.parent is None and not p.on_fiber else p
        for p in points
    )
    return ArrowedProximityGraph(pts, dict(fibers))


@dataclass(frozen=True)
class Violation:
    code: str
    points: tuple[str, ...]
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> tuple[str, ...]:
        return tuple(v.code for v in self.violations)


class InvalidGraphError(ValueError):
    """Raised when an operation requires a graph that failed validation."""

    def __init__(self, report: ValidationReport):
        self.report = report
        lines = "; ".join(f"{v.code}: {v.message}" for v in report.violations)
        super().__init__(f"invalid arrowed proximity graph ({lines})")


def validate(graph: ArrowedProximityGraph) -> ValidationReport:
    """Check every structural invariant, collecting violations without aborting.

    Structural rules: unique resolvable ids, an acyclic parent forest, origins
    with empty proximity sets, parents contained in proximity sets of arity at
    most two, proximity targets on the ancestor path, and the segment rule
    (whenever r is proximate to p, every point between them on the ancestor
    path is proximate to p as well).

    Flag rules: per constellation, the fiber-flagged points form a chain of
    consecutive levels starting at the origin through free points, likewise
    for the section flags; the two chains share at most the origin; origins
    always carry the fiber flag; at most one origin per fiber id carries the
    section flag; the fiber map keys are exactly the origins.
    """
    out: list[Violation] = []

    def flag(code: str, pts: Iterable[str], msg: str) -> None:
        out.append(Violation(code, tuple(pts), msg))

    points = graph.points
    if not points:
        flag(RULE_EMPTY, (), "graph has no points")
        return ValidationReport(tuple(out))

    node: dict[str, PointNode] = {}
    for p in points:
        if p.id in node:
            flag(RULE_DUPLICATE_ID, (p.id,), f"point id {p.id!r} appears more than once")
        else:
            node[p.id] = p

    broken: set[str] = set()
    for p in points:
        if p.parent is not None and p.parent not in node:
            flag(RULE_DANGLING, (p.id, p.parent), f"{p.id}: parent {p.parent!r} does not resolve")
            broken.add(p.id)
        for q in p.proximate_to:
            if q not in node:
                flag(RULE_DANGLING, (p.id, q), f"{p.id}: proximity target {q!r} does not resolve")
                broken.add(p.id)

    # Ancestor path of each point (nearest first), guarding against cycles.
    ancestors: dict[str, tuple[str, ...]] = {}
    for p in points:
        path: list[str] = []
        seen = {p.id}
        q = p.parent
        while q is not None and q in node and q not in seen:
            seen.add(q)
            path.append(q)
            q = node[q].parent
        if q is not None and q in seen:
            flag(RULE_PARENT_CYCLE, (p.id,), f"{p.id}: parent chain never reaches an origin")
            broken.add(p.id)
        elif q is not None and q not in node:
            broken.add(p.id)  # dangling parent higher up, already reported there
        else:
            ancestors[p.id] = tuple(path)

    for p in points:
        if p.id in broken or p.id not in ancestors:
            continue
        if p.parent is None:
            if p.proximate_to:
                flag(RULE_ORIGIN_PROXIMITY, (p.id,), f"origin {p.id} has a nonempty proximity set")
            continue
        if p.parent not in p.proximate_to:
            flag(RULE_PARENT_NOT_PROXIMATE, (p.id, p.parent), f"{p.id}: parent {p.parent} missing from proximity set")
        if not 1 <= len(p.proximate_to) <= 2:
            flag(
                RULE_PROXIMITY_ARITY,
                (p.id,),
                f"{p.id} is proximate to {len(p.proximate_to)} points; at most two exceptional branches meet a point",
            )
        anc = ancestors[p.id]
        ancset = set(anc)
        for q in p.proximate_to:
            if q not in ancset:
                flag(RULE_PROXIMITY_ANCESTOR, (p.id, q), f"{p.id}: proximity target {q} is not a strict ancestor")
                continue
            for mid in anc:
                if mid == q:
                    break
                if q not in node[mid].proximate_to:
                    flag(
                        RULE_PROXIMITY_SEGMENT,
                        (p.id, mid, q),
                        f"{p.id} is proximate to {q} but intermediate {mid} is not",
                    )

    # Flag checks need levels and the free/satellite classification; run them
    # only on structurally sound points.
    good = [p for p in points if p.id not in broken and p.id in ancestors]
    level = {p.id: len(ancestors[p.id]) for p in good}
    root_of = {p.id: (ancestors[p.id][-1] if ancestors[p.id] else p.id) for p in good}
    satellite = {p.id for p in good if p.parent is not None and len(p.proximate_to) == 2}

    origins = [p for p in good if p.parent is None]
    for p in origins:
        if p.id not in graph.fiber_of_origin:
            flag(RULE_FIBER_MAP, (p.id,), f"origin {p.id} has no fiber id")
    for key in graph.fiber_of_origin:
        if key not in node or (key in node and node[key].parent is not None):
            flag(RULE_FIBER_MAP, (key,), f"fiber map key {key!r} is not a constellation origin")

    constellations: dict[str, list[PointNode]] = {}
    for p in good:
        constellations.setdefault(root_of[p.id], []).append(p)

    for root, members in constellations.items():
        if node[root].parent is not None:
            continue  # root itself broken; skip flag analysis for this tree
        for attr, word in (("on_fiber", "fiber"), ("on_special_section", "special section")):
            flagged = [p for p in members if getattr(p, attr)]
            if attr == "on_fiber" and not getattr(node[root], attr):
                flag(RULE_ORIGIN_FIBER_FLAG, (root,), f"origin {root} must carry the fiber flag")
            for p in flagged:
                if p.id in satellite:
                    flag(RULE_FLAG_ON_SATELLITE, (p.id,), f"{word} flag on satellite point {p.id}: smooth germs pass through free points only")
            ids = {p.id for p in flagged}
            for p in flagged:
                if p.parent is None:
                    continue
                if p.parent not in ids:
                    flag(RULE_FLAG_CHAIN, (p.id,), f"{word} flag at {p.id} but not at its parent {p.parent}")
            levels = sorted(level[p.id] for p in flagged)
            if flagged and levels != list(range(len(flagged))):
                flag(RULE_FLAG_CHAIN, tuple(sorted(p.id for p in flagged)), f"{word} flags of constellation {root} do not form a chain of consecutive levels from the origin")
        shared = [
            p.id
            for p in members
            if p.on_fiber and p.on_special_section and p.id != root
        ]
        if shared:
            flag(RULE_FLAG_OVERLAP, tuple(shared), f"fiber and special-section germs of constellation {root} share non-origin points {shared}: their global intersection number is one")

    per_fiber: dict[str, list[str]] = {}
    for p in origins:
        if p.on_special_section and p.id in graph.fiber_of_origin:
            per_fiber.setdefault(graph.fiber_of_origin[p.id], []).append(p.id)
    for fib, ids in sorted(per_fiber.items()):
        if len(ids) > 1:
            flag(RULE_SECTION_PER_FIBER, tuple(ids), f"fiber {fib!r} has several origins on the special section; a section meets each fiber once")

    return ValidationReport(tuple(out))


@dataclass(frozen=True)
class Chain:
    """The ordered point list of the divisorial valuation of a final exceptional divisor."""

    index: int  # 1-based, in order of maximal points
    points: tuple[str, ...]
    fiber: str

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True, eq=False)
class GraphStructure:
    """A validated graph together with everything derived from it.

    ``chains`` holds one chain per maximal point.  ``chain_at`` maps a point
    to its first (chain index, position) occurrence; ``chain_aliases`` keeps
    every occurrence, which is how shared chain prefixes are recognized.
    """

    graph: ArrowedProximityGraph
    node: Mapping[str, PointNode]
    order: Mapping[str, int]
    level: Mapping[str, int]
    origin_of: Mapping[str, str]
    prefix: Mapping[str, tuple[str, ...]]
    children: Mapping[str, tuple[str, ...]]
    prox_sources: Mapping[str, tuple[str, ...]]
    satellites: frozenset[str]
    maximal_points: tuple[str, ...]
    chains: tuple[Chain, ...]
    chain_at: Mapping[str, tuple[int, int]]
    chain_aliases: Mapping[str, tuple[tuple[int, int], ...]]
    shared_prefix: Mapping[tuple[int, int], int]
    fibers: tuple[str, ...]

    @property
    def point_ids(self) -> tuple[str, ...]:
        return tuple(p.id for p in self.graph.points)

    @property
    def origins(self) -> tuple[str, ...]:
        return tuple(p.id for p in self.graph.points if p.parent is None)

    def classify(self, pid: str) -> str:
        if self.node[pid].parent is None:
            return "origin"
        return "satellite" if pid in self.satellites else "free"

    def fiber_of(self, pid: str) -> str:
        return self.graph.fiber_of_origin[self.origin_of[pid]]

    def stubs(self, fiber: str) -> tuple[str, ...]:
        """All configuration points lying on constellations of one fiber, in graph order."""
        return tuple(p.id for p in self.graph.points if self.fiber_of(p.id) == fiber)

    def chain_by_index(self, j: int) -> Chain:
        return self.chains[j - 1]


def derive_chains(graph: ArrowedProximityGraph) -> GraphStructure:
    """Derive chains, levels, classification and prefix tables from a valid graph."""
    report = validate(graph)
    if not report.ok:
        raise InvalidGraphError(report)

    node = {p.id: p for p in graph.points}
    order = {p.id: i for i, p in enumerate(graph.points)}

    prefix: dict[str, tuple[str, ...]] = {}

    def path_of(pid: str) -> tuple[str, ...]:
        if pid not in prefix:
            p = node[pid]
            prefix[pid] = (pid,) if p.parent is None else path_of(p.parent) + (pid,)
        return prefix[pid]

    for p in graph.points:
        path_of(p.id)

    level = {pid: len(path) - 1 for pid, path in prefix.items()}
    origin_of = {pid: path[0] for pid, path in prefix.items()}

    children: dict[str, list[str]] = {p.id: [] for p in graph.points}
    prox_sources: dict[str, list[str]] = {p.id: [] for p in graph.points}
    for p in graph.points:
        if p.parent is not None:
            children[p.parent].append(p.id)
        for q in p.proximate_to:
            prox_sources[q].append(p.id)

    satellites = frozenset(p.id for p in graph.points if p.parent is not None and len(p.proximate_to) == 2)
    maximal = tuple(p.id for p in graph.points if not children[p.id])

    chains = tuple(
        Chain(index=j, points=prefix[t], fiber=graph.fiber_of_origin[origin_of[t]])
        for j, t in enumerate(maximal, start=1)
    )

    chain_at: dict[str, tuple[int, int]] = {}
    chain_aliases: dict[str, list[tuple[int, int]]] = {p.id: [] for p in graph.points}
    for ch in chains:
        for k, pid in enumerate(ch.points, start=1):
            chain_at.setdefault(pid, (ch.index, k))
            chain_aliases[pid].append((ch.index, k))

    shared: dict[tuple[int, int], int] = {}
    for c1 in chains:
        for c2 in chains:
            if c1.index >= c2.index:
                continue
            n = 0
            for a, b in zip(c1.points, c2.points):
                if a != b:
                    break
                n += 1
            shared[(c1.index, c2.index)] = n

    fibers: list[str] = []
    for p in graph.points:
        if p.parent is None:
            fib = graph.fiber_of_origin[p.id]
            if fib not in fibers:
                fibers.append(fib)

    return GraphStructure(
        graph=graph,
        node=node,
        order=order,
        level=level,
        origin_of=origin_of,
        prefix=prefix,
        children={k: tuple(v) for k, v in children.items()},
        prox_sources={k: tuple(v) for k, v in prox_sources.items()},
        satellites=satellites,
        maximal_points=maximal,
        chains=chains,
        chain_at=chain_at,
        chain_aliases={k: tuple(v) for k, v in chain_aliases.items()},
        shared_prefix=shared,
        fibers=tuple(fibers),
    )


def as_structure(graph: ArrowedProximityGraph | GraphStructure) -> GraphStructure:
    """Accept either a raw graph or an already derived structure."""
    if isinstance(graph, GraphStructure):
        return graph
    return derive_chains(graph)
