"""Multiplicity vectors of curvettes and local intersection numbers.

The curvette at the k-th point of a chain is an analytically irreducible germ
whose strict transform meets the k-th exceptional divisor transversally at a
general point.  Its multiplicities at the chain points are determined by the
proximity equalities, solved backwards from a single 1 at position k.  Local
intersection numbers with the fiber and special-section germs then come out
of the Noether formula as dot products with 0/1 flag vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

from .proximity_graph import ArrowedProximityGraph, Chain, GraphStructure, as_structure

__all__ = [
    "germ_multiplicities",
    "smooth_flag_multiplicities",
    "intersection_numbers",
    "ChainIntersections",
]


def germ_multiplicities(
    graph: ArrowedProximityGraph | GraphStructure, chain: Chain, k: int
) -> dict[str, int]:
    """Multiplicities of the curvette at the k-th chain point, keyed by point id.

    Backward recursion: the multiplicity at position k is 1, and at every
    earlier position it equals the sum of the multiplicities at later prefix
    positions proximate to it.  Points outside the length-k prefix carry an
    implicit 0 and are not included.
    """
    s = as_structure(graph)
    if not 1 <= k <= len(chain.points):
        raise IndexError(f"truncation {k} out of range for chain of length {len(chain.points)}")
    prefix = chain.points[:k]
    mult = {prefix[k - 1]: 1}
    for lam in range(k - 2, -1, -1):
        p = prefix[lam]
        mult[p] = sum(mult[prefix[mu]] for mu in range(lam + 1, k) if p in s.node[prefix[mu]].proximate_to)
    return {pid: mult[pid] for pid in prefix}


def smooth_flag_multiplicities(
    graph: ArrowedProximityGraph | GraphStructure, chain: Chain, flag: str
) -> dict[str, int]:
    """0/1 multiplicity vector of a smooth flagged germ restricted to one chain.

    ``flag`` is ``"fiber"`` or ``"special_section"``.  Smooth germs have
    multiplicity one at each point they pass through, so the vector is 1
    exactly at the chain points carrying the flag.
    """
    s = as_structure(graph)
    if flag == "fiber":
        keep = lambda n: n.on_fiber
    elif flag == "special_section":
        keep = lambda n: n.on_special_section
    else:
        raise ValueError(f"unknown flag {flag!r}")
    return {pid: (1 if keep(s.node[pid]) else 0) for pid in chain.points}


@dataclass(frozen=True)
class ChainIntersections:
    """Local intersection numbers of a curvette with the section and fiber germs."""

    a: int  # with the special section
    b: int  # with the fiber through the chain origin; >= 1, the origin is on its fiber


def intersection_numbers(
    graph: ArrowedProximityGraph | GraphStructure, chain: Chain, k: int
) -> ChainIntersections:
    """Noether products of the k-th curvette with the two flagged smooth germs."""
    s = as_structure(graph)
    mult = germ_multiplicities(s, chain, k)
    section = smooth_flag_multiplicities(s, chain, "special_section")
    fiber = smooth_flag_multiplicities(s, chain, "fiber")
    a = sum(m * section[pid] for pid, m in mult.items())
    b = sum(m * fiber[pid] for pid, m in mult.items())
    return ChainIntersections(a=a, b=b)
