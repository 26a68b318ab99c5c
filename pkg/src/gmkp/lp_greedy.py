"""Greedy solver for the continuous relaxation of the grouped problem.

Groups are taken in non-increasing reward-to-weight order and poured into
the knapsacks one by one; at most the last group taken is fractional.  All
arithmetic is exact (integers and Fractions).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .model import FractionalSolution, Instance


def sort_groups(instance: Instance) -> list[int]:
    """Group indices by non-increasing reward / total-weight ratio.

    Ratios are compared exactly via cross-multiplication; ties keep
    ascending original index.
    """
    gw = instance.group_weights()
    # Fraction comparison is exact cross-multiplication of the integer parts.
    return sorted(range(instance.k), key=lambda l: (-Fraction(instance.rewards[l], gw[l]), l))


def greedy_lp(instance: Instance, total_capacity: Optional[int] = None) -> FractionalSolution:
    """Fill knapsacks sequentially with groups in sorted order.

    ``total_capacity`` overrides the aggregate budget for the fractional
    selection (defaults to the sum of capacities).  The physical placement
    constraints cap usable weight at the capacity sum regardless, so the
    effective budget is ``min(total_capacity, sum(capacities))``.

    The result satisfies: per-knapsack loads within capacity, placed
    fraction of every item equal to its group's z, and at most one group
    with a strictly fractional z.
    """
    gw = instance.group_weights()
    cap_sum = instance.total_capacity
    budget = cap_sum if total_capacity is None else min(int(total_capacity), cap_sum)
    if budget < 0:
        raise ValueError("total_capacity must be non-negative")

    order = sort_groups(instance)
    z: list[Fraction] = [Fraction(0)] * instance.k
    x: dict[tuple[int, int], Fraction] = {}
    i = 0  # current knapsack
    knapsack_weight = Fraction(0)
    total_weight = Fraction(0)

    for l in order:
        if i >= instance.m:
            break
        zl = min(Fraction(1), Fraction(budget - total_weight) / gw[l])
        if zl <= 0:
            break
        z[l] = zl
        for j in instance.groups[l]:
            item_weight = zl * instance.item_weights[j]
            while item_weight > 0:
                piece = min(item_weight, instance.capacities[i] - knapsack_weight)
                x[(i, j)] = x.get((i, j), Fraction(0)) + piece / instance.item_weights[j]
                item_weight -= piece
                knapsack_weight += piece
                total_weight += piece
                if knapsack_weight == instance.capacities[i]:
                    knapsack_weight = Fraction(0)
                    i += 1
                    if i >= instance.m and item_weight > 0:
                        raise AssertionError("knapsacks exhausted before budget")
    return FractionalSolution(z=tuple(z), x=x)
