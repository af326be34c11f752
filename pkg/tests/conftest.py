"""Shared fixtures: canonical graphs plus seeded random valid graphs."""

from __future__ import annotations

import random
from pathlib import Path

import pytest

from apgcone import ArrowedProximityGraph, PointNode, derive_chains, make_graph, validate
from apgcone.cli import parse_apg_file

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load_fixture(name: str) -> ArrowedProximityGraph:
    _, graph = parse_apg_file(str(FIXTURES / f"{name}.json"))
    return graph


@pytest.fixture(scope="session")
def fix_a() -> ArrowedProximityGraph:
    return load_fixture("FIX-A")


@pytest.fixture(scope="session")
def fix_b() -> ArrowedProximityGraph:
    return load_fixture("FIX-B")


@pytest.fixture(scope="session")
def fix_d() -> ArrowedProximityGraph:
    return load_fixture("FIX-D")


@pytest.fixture(scope="session")
def fix_e() -> ArrowedProximityGraph:
    return load_fixture("FIX-E")


def single_point_graph() -> ArrowedProximityGraph:
    return make_graph([PointNode(id="p1")], {"p1": "f1"})


class _Draft:
    """Mutable point record used while a random graph is being grown."""

    def __init__(self, pid, parent, prox):
        self.pid = pid
        self.parent = parent
        self.prox = tuple(prox)
        self.on_fiber = False
        self.on_section = False

    @property
    def free(self):
        return self.parent is not None and len(self.prox) == 1


def _grow_constellation(rng: random.Random, tag: str, size: int, satellites: bool) -> list[_Draft]:
    nodes = [_Draft(f"{tag}p1", None, ())]
    by_id = {nodes[0].pid: nodes[0]}
    for k in range(2, size + 1):
        parent = rng.choice(nodes)
        prox = {parent.pid}
        # a new point may also sit on one exceptional divisor still passing
        # through its parent; that keeps the segment rule valid by induction
        if satellites and parent.prox and rng.random() < 0.45:
            prox.add(rng.choice(parent.prox))
        node = _Draft(f"{tag}p{k}", parent.pid, sorted(prox))
        nodes.append(node)
        by_id[node.pid] = node
    return nodes


def _free_chain(rng: random.Random, nodes: list[_Draft], start: _Draft, avoid: str | None, p_grow: float) -> list[_Draft]:
    chain = [start]
    current = start
    while rng.random() < p_grow:
        options = [
            n for n in nodes
            if n.parent == current.pid and n.free and n.pid != (avoid if current is start else None)
        ]
        if not options:
            break
        current = rng.choice(options)
        chain.append(current)
    return chain


def random_graph(
    rng: random.Random,
    *,
    max_points: int = 8,
    max_constellations: int = 3,
    satellites: bool = True,
    section_flags: bool = True,
    deep_fiber_flags: bool = True,
) -> ArrowedProximityGraph:
    """A uniform-ish valid graph; every structural rule holds by construction."""
    total = rng.randint(1, max_points)
    r = rng.randint(1, min(max_constellations, total))
    sizes = [1] * r
    for _ in range(total - r):
        sizes[rng.randrange(r)] += 1

    fiber_ids: list[str] = []
    for i in range(r):
        if fiber_ids and rng.random() < 0.3:
            fiber_ids.append(rng.choice(fiber_ids))
        else:
            fiber_ids.append(f"f{len(set(fiber_ids)) + 1}")

    groups = [_grow_constellation(rng, f"c{i + 1}", sizes[i], satellites) for i in range(r)]

    for nodes in groups:
        origin = nodes[0]
        fiber_chain = (
            _free_chain(rng, nodes, origin, avoid=None, p_grow=0.6)
            if deep_fiber_flags
            else [origin]
        )
        for node in fiber_chain:
            node.on_fiber = True

    if section_flags:
        chosen: set[str] = set()
        for i, nodes in enumerate(groups):
            fib = fiber_ids[i]
            if fib in chosen or rng.random() < 0.5:
                continue
            chosen.add(fib)
            origin = nodes[0]
            first_fiber_step = next(
                (n.pid for n in nodes if n.parent == origin.pid and n.on_fiber), None
            )
            for node in _free_chain(rng, nodes, origin, avoid=first_fiber_step, p_grow=0.5):
                node.on_section = True

    points = [
        PointNode(
            id=n.pid,
            parent=n.parent,
            proximate_to=n.prox,
            on_fiber=n.on_fiber,
            on_special_section=n.on_section,
        )
        for nodes in groups
        for n in nodes
    ]
    fibers = {groups[i][0].pid: fiber_ids[i] for i in range(r)}
    graph = make_graph(points, fibers)
    report = validate(graph)
    assert report.ok, f"random graph generator produced an invalid graph: {report.violations}"
    return graph


def random_chain_graph(rng: random.Random, *, max_points: int = 12) -> ArrowedProximityGraph:
    """A single random chain (one constellation, one maximal point)."""
    n = rng.randint(1, max_points)
    nodes = [_Draft("p1", None, ())]
    for k in range(2, n + 1):
        parent = nodes[-1]
        prox = {parent.pid}
        if parent.prox and rng.random() < 0.45:
            prox.add(rng.choice(parent.prox))
        nodes.append(_Draft(f"p{k}", parent.pid, sorted(prox)))
    points = [PointNode(id=d.pid, parent=d.parent, proximate_to=d.prox) for d in nodes]
    graph = make_graph(points, {"p1": "f1"})
    assert validate(graph).ok
    return graph


def y3_x4_graph() -> ArrowedProximityGraph:
    """Resolution chain of the germ y^3 = x^4: multiplicities (3, 1, 1, 1)."""
    return make_graph(
        [
            PointNode(id="p1"),
            PointNode(id="p2", parent="p1", proximate_to=("p1",)),
            PointNode(id="p3", parent="p2", proximate_to=("p1", "p2")),
            PointNode(id="p4", parent="p3", proximate_to=("p1", "p3")),
        ],
        {"p1": "f1"},
    )
