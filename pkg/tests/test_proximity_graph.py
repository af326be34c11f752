from __future__ import annotations

import random
from dataclasses import replace

import pytest

from apgcone import PointNode, derive_chains, make_graph, validate
from apgcone.proximity_graph import (
    RULE_DANGLING,
    RULE_FIBER_MAP,
    RULE_FLAG_CHAIN,
    RULE_FLAG_ON_SATELLITE,
    RULE_FLAG_OVERLAP,
    RULE_ORIGIN_FIBER_FLAG,
    RULE_PARENT_CYCLE,
    RULE_PROXIMITY_ARITY,
    RULE_PROXIMITY_SEGMENT,
    RULE_SECTION_PER_FIBER,
    ArrowedProximityGraph,
    InvalidGraphError,
)

from conftest import random_graph, single_point_graph, y3_x4_graph


def test_fix_a_validates(fix_a):
    assert validate(fix_a).ok


def test_fix_a_chains(fix_a):
    s = derive_chains(fix_a)
    assert [len(c.points) for c in s.chains] == [2, 3, 2]
    assert s.chains[0].fiber == "f1"
    assert s.chains[1].fiber == "f2" == s.chains[2].fiber
    assert s.chains[1].points[0] == s.chains[2].points[0] == "q3"
    assert s.shared_prefix[(2, 3)] == 1
    assert s.shared_prefix[(1, 2)] == 0


def test_fix_d_chains(fix_d):
    s = derive_chains(fix_d)
    assert [len(c.points) for c in s.chains] == [7, 5, 4, 5, 3]
    assert s.shared_prefix[(1, 2)] == 3
    assert s.shared_prefix[(3, 4)] == 1


def test_single_point_chain():
    s = derive_chains(single_point_graph())
    assert len(s.chains) == 1 and len(s.chains[0].points) == 1


def test_levels_and_classification(fix_a):
    s = derive_chains(fix_a)
    assert s.level["q1"] == 0 and s.level["q5"] == 2
    assert s.classify("q3") == "origin"
    assert s.classify("q4") == "free"
    assert s.classify("q5") == "satellite"
    kinds = {s.classify(pid) for pid in s.point_ids}
    assert kinds <= {"origin", "free", "satellite"}


def test_flag_on_satellite_rejected(fix_a):
    points = [replace(p, on_fiber=True) if p.id == "q5" else p for p in fix_a.points]
    report = validate(ArrowedProximityGraph(tuple(points), fix_a.fiber_of_origin))
    assert RULE_FLAG_ON_SATELLITE in report.codes()


def test_proximity_arity_rejected():
    g = make_graph(
        [
            PointNode(id="p1"),
            PointNode(id="p2", parent="p1", proximate_to=("p1",)),
            PointNode(id="p3", parent="p2", proximate_to=("p1", "p2")),
            PointNode(id="p4", parent="p3", proximate_to=("p1", "p2", "p3")),
        ],
        {"p1": "f1"},
    )
    assert RULE_PROXIMITY_ARITY in validate(g).codes()


def test_y3_x4_passes_and_broken_segment_fails():
    assert validate(y3_x4_graph()).ok
    # drop p3 -> p1: p4 -> p1 is then missing the intermediate proximity
    g = make_graph(
        [
            PointNode(id="p1"),
            PointNode(id="p2", parent="p1", proximate_to=("p1",)),
            PointNode(id="p3", parent="p2", proximate_to=("p2",)),
            PointNode(id="p4", parent="p3", proximate_to=("p1", "p3")),
        ],
        {"p1": "f1"},
    )
    assert RULE_PROXIMITY_SEGMENT in validate(g).codes()


def test_dangling_references_collected_without_abort():
    g = make_graph(
        [
            PointNode(id="p1"),
            PointNode(id="p2", parent="ghost", proximate_to=("ghost",)),
            PointNode(id="p3", parent="p1", proximate_to=("p1", "phantom")),
        ],
        {"p1": "f1"},
    )
    report = validate(g)
    assert report.codes().count(RULE_DANGLING) == 3


def test_parent_cycle_detected():
    g = ArrowedProximityGraph(
        (
            PointNode(id="p1", parent="p2", proximate_to=("p2",)),
            PointNode(id="p2", parent="p1", proximate_to=("p1",)),
        ),
        {},
    )
    assert RULE_PARENT_CYCLE in validate(g).codes()


def test_origin_must_be_on_fiber(fix_a):
    points = [replace(p, on_fiber=False) if p.id == "q1" else p for p in fix_a.points]
    report = validate(ArrowedProximityGraph(tuple(points), fix_a.fiber_of_origin))
    assert RULE_ORIGIN_FIBER_FLAG in report.codes()
    # the loader normalizes instead
    assert validate(make_graph(points, fix_a.fiber_of_origin)).ok


def test_fiber_and_section_chains_may_share_only_origin(fix_a):
    points = [replace(p, on_special_section=True) if p.id == "q4" else p for p in fix_a.points]
    report = validate(ArrowedProximityGraph(tuple(points), fix_a.fiber_of_origin))
    assert RULE_FLAG_OVERLAP in report.codes()


def test_flag_chain_must_be_consecutive():
    g = make_graph(
        [
            PointNode(id="p1"),
            PointNode(id="p2", parent="p1", proximate_to=("p1",)),
            PointNode(id="p3", parent="p2", proximate_to=("p2",), on_fiber=True),
        ],
        {"p1": "f1"},
    )
    assert RULE_FLAG_CHAIN in validate(g).codes()


def test_one_section_origin_per_fiber():
    g = make_graph(
        [
            PointNode(id="p1", on_special_section=True),
            PointNode(id="p2", on_special_section=True),
        ],
        {"p1": "f1", "p2": "f1"},
    )
    assert RULE_SECTION_PER_FIBER in validate(g).codes()


def test_fiber_map_mismatches():
    report = validate(make_graph([PointNode(id="p1")], {}))
    assert RULE_FIBER_MAP in report.codes()
    report = validate(
        make_graph(
            [PointNode(id="p1"), PointNode(id="p2", parent="p1", proximate_to=("p1",))],
            {"p1": "f1", "p2": "f1"},
        )
    )
    assert RULE_FIBER_MAP in report.codes()


def test_derive_chains_rejects_invalid():
    g = make_graph([PointNode(id="p1", proximate_to=("p1",))], {"p1": "f1"})
    with pytest.raises(InvalidGraphError):
        derive_chains(g)


@pytest.mark.parametrize("seed", range(40))
def test_random_graph_structure_properties(seed):
    s = derive_chains(random_graph(random.Random(seed)))
    for pid in s.point_ids:
        node = s.node[pid]
        if node.parent is None:
            assert s.level[pid] == 0
        else:
            assert s.level[pid] == s.level[node.parent] + 1
    # chains are root-to-maximal prefixes, and the points of a chain that are
    # proximate to a fixed chain point form a consecutive run right after it
    for chain in s.chains:
        assert chain.points == s.prefix[chain.points[-1]]
        assert chain.points[-1] in s.maximal_points
        pts = chain.points
        for i, p in enumerate(pts):
            hits = [j for j in range(len(pts)) if p in s.node[pts[j]].proximate_to]
            if hits:
                assert hits == list(range(i + 1, i + 1 + len(hits)))
