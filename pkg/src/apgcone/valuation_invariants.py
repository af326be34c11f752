"""Maximal contact values, gcd ladder and two executable positivity lemmas.

For the divisorial valuation of a chain's final exceptional divisor, the
maximal contact values are computed from curvettes: the zeroth is the
multiplicity at the origin, the w-th (1 <= w <= g, with g the number of
maximal satellite runs in the chain) is the Noether product of the
valuation's multiplicity vector with the curvette at the free point
immediately preceding the w-th satellite run, and the last one is the sum of
squared multiplicities (the self-product of a general curvette).

The construction is cross-checked on return: the gcd ladder must strictly
decrease to 1 and the tail identity (last value minus final quotient times
the g-th value equals the number of trailing free points) must hold.  A
failure raises instead of returning silently wrong values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dual_cone import lambda_divisor
from .lattice import anticanonical_product
from .multiplicities import germ_multiplicities
from .proximity_graph import ArrowedProximityGraph, Chain, GraphStructure, as_structure

__all__ = [
    "ValuationInvariants",
    "BlockStructureError",
    "maximal_contact_values",
    "SumIdentityCheck",
    "verify_sum_identity",
    "anticanonical_monotonicity_check",
]


class BlockStructureError(ValueError):
    """Non-characteristic block structure: the curvette values violate the gcd ladder."""


@dataclass(frozen=True)
class ValuationInvariants:
    """beta_bar[0..g+1], the gcd ladder e[0..g] and the quotients N[0..g]."""

    beta_bar: tuple[int, ...]
    e: tuple[int, ...]
    N: tuple[int, ...]
    g: int
    free_tail: int

    @property
    def characteristic_exponents(self) -> tuple[int, ...]:
        """Derived, debugging only: beta[w] = beta[w-1] + beta_bar[w] - N[w-1] * beta_bar[w-1]."""
        beta = [self.beta_bar[0]]
        for w in range(1, self.g + 2):
            beta.append(beta[w - 1] + self.beta_bar[w] - self.N[w - 1] * self.beta_bar[w - 1])
        return tuple(beta)


def _satellite_blocks(s: GraphStructure, chain: Chain) -> list[tuple[int, int]]:
    """Maximal runs of satellite points as 1-based [start, end] chain positions."""
    blocks: list[tuple[int, int]] = []
    run_start = None
    for pos, pid in enumerate(chain.points, start=1):
        if pid in s.satellites:
            if run_start is None:
                run_start = pos
        elif run_start is not None:
            blocks.append((run_start, pos - 1))
            run_start = None
    if run_start is not None:
        blocks.append((run_start, len(chain.points)))
    return blocks


def maximal_contact_values(
    graph: ArrowedProximityGraph | GraphStructure, chain: Chain
) -> ValuationInvariants:
    s = as_structure(graph)
    n = len(chain.points)
    if n == 0:
        raise ValueError("empty chain")
    mult = germ_multiplicities(s, chain, n)
    blocks = _satellite_blocks(s, chain)
    g = len(blocks)

    beta_bar = [mult[chain.points[0]]]
    for start, _ in blocks:
        # free point immediately preceding the block; satellites never sit at
        # positions 1 or 2, so start - 1 >= 2
        curvette = germ_multiplicities(s, chain, start - 1)
        beta_bar.append(sum(m * curvette.get(pid, 0) for pid, m in mult.items()))
    beta_bar.append(sum(m * m for m in mult.values()))

    e = [beta_bar[0]]
    for w in range(1, g + 1):
        e.append(math.gcd(e[w - 1], beta_bar[w]))
    quotients = [1] + [e[w - 1] // e[w] for w in range(1, g + 1)]

    if any(e[w] <= e[w + 1] for w in range(g)):
        raise BlockStructureError(f"gcd ladder {e} is not strictly decreasing")
    if e[g] != 1:
        raise BlockStructureError(f"gcd ladder {e} does not end at 1")
    free_tail = n - (blocks[-1][1] if blocks else 0)
    if g >= 1 and beta_bar[g + 1] - quotients[g] * beta_bar[g] != free_tail:
        raise BlockStructureError(
            f"tail identity fails: {beta_bar[g + 1]} - {quotients[g]}*{beta_bar[g]} != {free_tail} trailing free points"
        )

    return ValuationInvariants(
        beta_bar=tuple(beta_bar),
        e=tuple(e),
        N=tuple(quotients),
        g=g,
        free_tail=free_tail,
    )


@dataclass(frozen=True)
class SumIdentityCheck:
    lhs: int  # sum of the valuation's multiplicities
    rhs: int  # beta_bar[g+1] + sum beta_bar[w] (1 - N[w]) + beta_bar[0] - 1

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs

    def __bool__(self) -> bool:
        return self.holds


def verify_sum_identity(
    graph: ArrowedProximityGraph | GraphStructure, chain: Chain
) -> SumIdentityCheck:
    """Check that the multiplicity sum matches its closed form in the contact values."""
    s = as_structure(graph)
    inv = maximal_contact_values(s, chain)
    mult = germ_multiplicities(s, chain, len(chain.points))
    lhs = sum(mult.values())
    rhs = (
        inv.beta_bar[inv.g + 1]
        + sum(inv.beta_bar[w] * (1 - inv.N[w]) for w in range(inv.g + 1))
        + inv.beta_bar[0]
        - 1
    )
    return SumIdentityCheck(lhs=lhs, rhs=rhs)


def anticanonical_monotonicity_check(
    graph: ArrowedProximityGraph | GraphStructure, delta: int
) -> bool:
    """Per chain: a positive final anticanonical product forces positivity at every truncation.

    Evaluated directly at the given delta for every chain divisor.  This
    implication is a theorem; a False return is a defect somewhere.
    """
    s = as_structure(graph)
    for chain in s.chains:
        products = [
            anticanonical_product(lambda_divisor(s, chain, k)).evaluate(delta)
            for k in range(1, len(chain.points) + 1)
        ]
        if products[-1] > 0 and any(p <= 0 for p in products):
            return False
    return True
