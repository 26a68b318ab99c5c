"""Exact small-instance machinery: optimal solving and feasibility checks.

Everything here is exponential-time search with pruning; intended for
instances with at most roughly a dozen groups and a few dozen items.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .model import (
    Assignment,
    BudgetExceededError,
    Instance,
    Selection,
)
from .subset_select import SelectionProblem


@dataclass
class _Budget:
    remaining: Optional[int]

    def tick(self):
        if self.remaining is None:
            return
        self.remaining -= 1
        if self.remaining < 0:
            raise BudgetExceededError("oracle node budget exceeded")


def feasible_packing(
    instance: Instance,
    selection: Selection,
    node_budget: Optional[int] = None,
) -> Optional[Assignment]:
    """A capacity-feasible placement of all chosen items, or None.

    Complete depth-first search over placements, items heaviest first.
    Prunes on aggregate residual capacity and skips knapsacks whose
    residual equals one already tried for the current item (equal
    residuals give symmetric subtrees).  Raises ``BudgetExceededError``
    rather than returning an unproven answer.
    """
    items = sorted(
        (j for l in selection.indices() for j in instance.groups[l]),
        key=lambda j: (-instance.item_weights[j], j),
    )
    if not items:
        return Assignment.empty(instance)
    budget = _Budget(node_budget)
    residual = list(instance.capacities)
    placement: list = [None] * instance.n
    weights = instance.item_weights
    suffix = [0] * (len(items) + 1)
    for t in range(len(items) - 1, -1, -1):
        suffix[t] = suffix[t + 1] + weights[items[t]]

    def dfs(t: int) -> bool:
        budget.tick()
        if t == len(items):
            return True
        if suffix[t] > sum(residual):
            return False
        j = items[t]
        w = weights[j]
        tried: set[int] = set()
        for i in range(instance.m):
            r = residual[i]
            if r < w or r in tried:
                continue
            tried.add(r)
            residual[i] -= w
            placement[j] = i
            if dfs(t + 1):
                return True
            residual[i] += w
            placement[j] = None
        return False

    if dfs(0):
        return Assignment.build(instance, placement)
    return None


def exact_gmkp(
    instance: Instance,
    node_budget: Optional[int] = None,
) -> tuple[int, Selection, Assignment]:
    """Optimal reward and a witnessing feasible solution.

    Branches over group subsets in decreasing-reward order with a
    remaining-reward bound and an aggregate-capacity prune; leaves are
    certified with :func:`feasible_packing`.
    """
    k = instance.k
    order = sorted(range(k), key=lambda l: (-instance.rewards[l], l))
    gw = instance.group_weights()
    total_cap = instance.total_capacity
    rewards = [instance.rewards[l] for l in order]
    suffix_reward = [0] * (k + 1)
    for t in range(k - 1, -1, -1):
        suffix_reward[t] = suffix_reward[t + 1] + rewards[t]

    best_value = -1
    best_selection = Selection.empty(k)
    best_assignment = Assignment.empty(instance)
    chosen: list[int] = []

    def dfs(t: int, weight: int, value: int):
        nonlocal best_value, best_selection, best_assignment
        if value + suffix_reward[t] <= best_value:
            return
        if t == k:
            sel = Selection.from_indices(chosen, k)
            packed = feasible_packing(instance, sel, node_budget=node_budget)
            if packed is not None and value > best_value:
                best_value = value
                best_selection = sel
                best_assignment = packed
            return
        l = order[t]
        if weight + gw[l] <= total_cap:
            chosen.append(l)
            dfs(t + 1, weight + gw[l], value + rewards[t])
            chosen.pop()
        dfs(t + 1, weight, value)

    dfs(0, 0, 0)
    if best_value < 0:  # empty selection is always feasible
        best_value = 0
    return best_value, best_selection, best_assignment


def enumerate_feasible_z(problem: SelectionProblem) -> set[tuple[bool, ...]]:
    """All 0/1 group vectors satisfying every row of the problem."""
    k = problem.k
    if k > 20:
        raise ValueError(f"enumeration limited to 20 groups, got {k}")
    out: set[tuple[bool, ...]] = set()
    for mask in range(1 << k):
        chosen = tuple(bool(mask >> l & 1) for l in range(k))
        if problem.feasible(chosen):
            out.add(chosen)
    return out
