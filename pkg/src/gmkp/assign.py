"""Item placement: greedy heavier-first assignment and jump/swap local search."""

from __future__ import annotations

import heapq

from .model import Assignment, GmkpError, Instance, Selection


def greedy_assign(instance: Instance, selection: Selection) -> Assignment:
    """Place chosen items, heaviest first, on the least-loaded knapsack.

    "Least loaded" means smallest ``load - capacity``; ties go to the
    lowest knapsack index, and equally heavy items keep ascending index.
    """
    items = sorted(
        (j for l in selection.indices() for j in instance.groups[l]),
        key=lambda j: (-instance.item_weights[j], j),
    )
    placement: list = [None] * instance.n
    loads = [0] * instance.m
    heap = [(-c, i) for i, c in enumerate(instance.capacities)]
    heapq.heapify(heap)
    for j in items:
        overload, i = heapq.heappop(heap)
        placement[j] = i
        loads[i] += instance.item_weights[j]
        heapq.heappush(heap, (loads[i] - instance.capacities[i], i))
    return Assignment(tuple(placement), tuple(loads))


def _potential(loads, capacities, c_max) -> int:
    return sum((load - c + c_max) ** 2 for load, c in zip(loads, capacities))


def swap_optimal(instance: Instance, assignment: Assignment) -> Assignment:
    """Local search to a jump/swap fixed point.

    A move (relocate one item, or exchange two items on different
    knapsacks) is accepted iff it strictly decreases the load-balance
    potential sum((load_i - c_i + c_max)^2) and does not increase the
    maximum overload.  The scan is a deterministic sweep (jumps by
    (item, target), then swaps by item pair); the first improving move is
    applied and the sweep restarts.  The potential is a non-negative
    integer that drops on every accepted move, so termination is
    guaranteed; a step guard turns a logic error into a loud failure
    instead of a hang.
    """
    placement = list(assignment.placement)
    loads = list(assignment.loads)
    caps = instance.capacities
    c_max = instance.c_max
    weights = instance.item_weights
    placed = [j for j in range(instance.n) if placement[j] is not None]
    if not placed:
        return assignment

    phi0 = _potential(loads, caps, c_max)
    guard = len(placed) ** 2 * instance.m * max(phi0, 1)
    steps = 0

    def max_overload() -> int:
        return max(load - c for load, c in zip(loads, caps))

    improved = True
    while improved:
        improved = False
        cur_max = max_overload()
        # jumps
        for j in placed:
            src = placement[j]
            w = weights[j]
            for dst in range(instance.m):
                steps += 1
                if steps > guard:
                    raise GmkpError("swap-optimal step guard exceeded")
                if dst == src:
                    continue
                # potential delta of moving j from src to dst
                a = loads[src] - caps[src] + c_max
                b = loads[dst] - caps[dst] + c_max
                delta = ((a - w) ** 2 - a**2) + ((b + w) ** 2 - b**2)
                if delta >= 0:
                    continue
                new_dst_over = loads[dst] + w - caps[dst]
                if new_dst_over > cur_max:
                    continue
                loads[src] -= w
                loads[dst] += w
                placement[j] = dst
                improved = True
                break
            if improved:
                break
        if improved:
            continue
        # swaps
        for a_idx, j1 in enumerate(placed):
            i1 = placement[j1]
            w1 = weights[j1]
            for j2 in placed[a_idx + 1 :]:
                steps += 1
                if steps > guard:
                    raise GmkpError("swap-optimal step guard exceeded")
                i2 = placement[j2]
                if i1 == i2:
                    continue
                w2 = weights[j2]
                diff = w2 - w1
                a = loads[i1] - caps[i1] + c_max
                b = loads[i2] - caps[i2] + c_max
                delta = ((a + diff) ** 2 - a**2) + ((b - diff) ** 2 - b**2)
                if delta >= 0:
                    continue
                if max(loads[i1] + diff - caps[i1], loads[i2] - diff - caps[i2]) > cur_max:
                    continue
                loads[i1] += diff
                loads[i2] -= diff
                placement[j1], placement[j2] = i2, i1
                improved = True
                break
            if improved:
                break
    return Assignment(tuple(placement), tuple(loads))
