"""Group-selection subproblems: one knapsack row plus optional cut rows.

The cut rows count how many pieces strictly larger than a threshold fit
into weights and capacities; they remove group combinations that can never
be packed, without excluding any packable combination.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence

from .model import BudgetExceededError, Instance, Selection

# Variant tags accepted by build_problem / the pipeline.
VARIANT_KP = "kp"
VARIANT_2MKP = "2mkp"
VARIANT_3MKP = "3mkp"
VARIANT_MKPD = "mkpd"
VARIANT_MKP_PRIME = "mkpprime"


@dataclass(frozen=True)
class SelectionProblem:
    """A 0/1 maximization over groups with non-negative integer rows.

    Row 0 is always the aggregate weight row; further rows are threshold
    cuts or floor cuts.  ``provenance[r]`` records where row ``r`` came
    from ("aggregate", "fd:<d>", or "floor:<d>").
    """

    group_rewards: tuple[int, ...]
    rows: tuple[tuple[tuple[int, ...], int], ...]
    provenance: tuple[str, ...]

    @property
    def k(self) -> int:
        return len(self.group_rewards)

    def feasible(self, chosen: Sequence[bool]) -> bool:
        for coeffs, rhs in self.rows:
            if sum(c for c, b in zip(coeffs, chosen) if b) > rhs:
                return False
        return True


def f_d(y: int, d: Fraction) -> int:
    """Largest integer strictly below ``y / d``.

    Counts how many pieces slightly heavier than ``d`` fit completely
    into ``y``.  Exact: for d = a/b this is floor((y*b - 1) / a).
    """
    if y < 1:
        raise ValueError("y must be a positive integer")
    d = Fraction(d)
    if d <= 0:
        raise ValueError("d must be positive")
    return (y * d.denominator - 1) // d.numerator


def canonical_D(instance: Instance) -> set[Fraction]:
    """A finite threshold set whose cut rows imply every other cut row.

    Thresholds have the form a/b with ``a`` a divisor of some capacity
    (these are the points where the right-hand side changes).  For each
    ``a``, the row value of a selection at threshold a/b depends on
    ``b mod a`` only, up to a term monotone in ``b``; among row-0-feasible
    selections the constraint is tightest at the smallest valid ``b`` of
    each residue class.  Keeping those representatives therefore preserves
    the feasible set of the all-thresholds problem.
    """
    w_max = instance.w_max
    divisors: set[int] = set()
    for c in set(instance.capacities):
        for a in range(1, c + 1):
            if c % a == 0:
                divisors.add(a)
    out: set[Fraction] = set()
    for a in divisors:
        b_min = a // w_max + 1  # smallest b with a/b < w_max
        for b in range(b_min, b_min + a):
            if gcd(a, b) == 1:
                out.add(Fraction(a, b))
    return out


def _dedupe_rows(rows, provenance):
    """Drop all-zero rows; for equal coefficient vectors keep the tightest rhs."""
    best: dict[tuple[int, ...], tuple[int, str]] = {}
    order: list[tuple[int, ...]] = []
    for (coeffs, rhs), tag in zip(rows, provenance):
        if not any(coeffs):
            continue
        if coeffs not in best:
            best[coeffs] = (rhs, tag)
            order.append(coeffs)
        elif rhs < best[coeffs][0]:
            best[coeffs] = (rhs, tag)
    out_rows = tuple((c, best[c][0]) for c in order)
    out_tags = tuple(best[c][1] for c in order)
    return out_rows, out_tags


def build_problem(
    instance: Instance,
    variant: str,
    total_capacity: Optional[int] = None,
    d_set: Optional[Iterable[Fraction]] = None,
) -> SelectionProblem:
    """Assemble the selection subproblem for one algorithm variant.

    Row 0 carries the aggregate group weights against ``total_capacity``
    (default: sum of capacities).  The variant decides which cut rows are
    appended:

    - ``kp``: none.
    - ``2mkp``: the half-capacity cut.
    - ``3mkp``: the half- and third-capacity cuts.
    - ``mkpd``: one cut per threshold in ``d_set``.
    - ``mkpprime``: one floor cut per distinct item weight above the
      smallest capacity.
    """
    if total_capacity is None:
        total_capacity = instance.total_capacity
    gw = instance.group_weights()
    rows: list[tuple[tuple[int, ...], int]] = [(gw, int(total_capacity))]
    tags: list[str] = ["aggregate"]

    c_max = instance.c_max
    if variant == VARIANT_KP:
        ds: list[Fraction] = []
    elif variant == VARIANT_2MKP:
        ds = [Fraction(c_max, 2)]
    elif variant == VARIANT_3MKP:
        ds = [Fraction(c_max, 2), Fraction(c_max, 3)]
    elif variant == VARIANT_MKPD:
        if d_set is None:
            raise ValueError("mkpd variant requires d_set")
        ds = sorted({Fraction(d) for d in d_set}, reverse=True)
        if any(d <= 0 for d in ds):
            raise ValueError("thresholds must be positive")
    elif variant == VARIANT_MKP_PRIME:
        ds = []
        c_min = min(instance.capacities)
        for d in sorted({w for w in instance.item_weights if w > c_min}):
            coeffs = tuple(
                sum(instance.item_weights[j] // d for j in g) for g in instance.groups
            )
            rhs = sum(c // d for c in instance.capacities)
            rows.append((coeffs, rhs))
            tags.append(f"floor:{d}")
    else:
        raise ValueError(f"unknown variant {variant!r}")

    for d in ds:
        coeffs = tuple(sum(f_d(instance.item_weights[j], d) for j in g) for g in instance.groups)
        rhs = sum(f_d(c, d) for c in instance.capacities)
        rows.append((coeffs, rhs))
        tags.append(f"fd:{d}")

    cut_rows, cut_tags = _dedupe_rows(rows[1:], tags[1:])
    return SelectionProblem(
        group_rewards=instance.rewards,
        rows=(rows[0],) + cut_rows,
        provenance=(tags[0],) + cut_tags,
    )


def solve_dp_single_row(problem: SelectionProblem) -> Selection:
    """Classic 0/1 knapsack DP over the single row's right-hand side."""
    if len(problem.rows) != 1:
        raise ValueError("DP solver handles exactly one row")
    coeffs, rhs = problem.rows[0]
    k = problem.k
    values = [0] * (rhs + 1)
    take = [[False] * (rhs + 1) for _ in range(k)]
    for l in range(k):
        w, p = coeffs[l], problem.group_rewards[l]
        if w > rhs:
            continue
        row_take = take[l]
        for cap in range(rhs, w - 1, -1):
            cand = values[cap - w] + p
            if cand > values[cap]:
                values[cap] = cand
                row_take[cap] = True
    chosen = [False] * k
    cap = rhs
    for l in range(k - 1, -1, -1):
        if take[l][cap]:
            chosen[l] = True
            cap -= coeffs[l]
    return Selection(tuple(chosen))


def _greatest_weight_counts(
    T: int, cnt: list[int], col: list[list[int]], rhs_list: list[int]
) -> list[int]:
    """Exact counts maximizing the row-0 total when rewards equal row-0 coefficients.

    Dynamic program over cut-row usage states; each state holds a bitset of
    achievable row-0 totals (bit ``u`` set iff total ``u`` is reachable).
    Polynomial in the state space times the row-0 right-hand side.  Forward
    tables are snapshotted every few types so reconstruction reruns only
    short segments.
    """
    num_rows = len(rhs_list)
    rhs0 = rhs_list[0]
    mask = (1 << (rhs0 + 1)) - 1
    cut_rhs = rhs_list[1:]

    def apply_type(table: dict, t: int) -> dict:
        c0 = col[0][t]
        cut = [col[r][t] for r in range(1, num_rows)]
        for _ in range(cnt[t]):
            new_table = dict(table)
            changed = False
            for s, bits in table.items():
                ns = tuple(a + b for a, b in zip(s, cut))
                if any(a > b for a, b in zip(ns, cut_rhs)):
                    continue
                shifted = (bits << c0) & mask
                if shifted:
                    prev = new_table.get(ns, 0)
                    merged = prev | shifted
                    if merged != prev:
                        new_table[ns] = merged
                        changed = True
            if not changed:
                break
            table = new_table
        return table

    stride = max(1, -(-T // 16))
    snapshots = {0: {(0,) * (num_rows - 1): 1}}
    table = snapshots[0]
    for t in range(T):
        table = apply_type(table, t)
        if (t + 1) % stride == 0 or t + 1 == T:
            snapshots[t + 1] = table

    final = snapshots[T]
    best_u0 = max(bits.bit_length() - 1 for bits in final.values())
    state = min(s for s, bits in final.items() if (bits >> best_u0) & 1)
    u0 = best_u0

    counts_out = [0] * T
    t = T - 1
    while t >= 0:
        base = max(b for b in snapshots if b <= t)
        seg = {base: snapshots[base]}
        tbl = snapshots[base]
        for u in range(base, t):
            tbl = apply_type(tbl, u)
            seg[u + 1] = tbl
        for u in range(t, base - 1, -1):
            before = seg[u]
            c0 = col[0][u]
            cut = [col[r][u] for r in range(1, num_rows)]
            for q in range(cnt[u], -1, -1):
                ps = tuple(a - q * b for a, b in zip(state, cut))
                pu = u0 - q * c0
                if pu < 0 or any(a < 0 for a in ps):
                    continue
                bits = before.get(ps)
                if bits is not None and (bits >> pu) & 1:
                    counts_out[u] = q
                    state, u0 = ps, pu
                    break
            else:
                raise AssertionError("weight-fill backtrack lost the target state")
        t = base - 1
    return counts_out


# Largest cut-state-space x row-0-range product handled by the dynamic program.
_WEIGHT_DP_LIMIT = 64_000_000


def solve_exact(problem: SelectionProblem, node_budget: Optional[int] = None) -> Selection:
    """Reward-maximizing selection satisfying every row, by branch and bound.

    Groups with identical reward and row coefficients are interchangeable;
    they collapse into one column type with a count, and the search
    branches on how many copies of each type to take (most-first), in
    non-increasing reward / row-0-coefficient order.  Two node bounds are
    combined: a Lagrangian bound with non-negative multipliers fitted once
    at the root (valid for any multipliers, O(rows) per node), and the
    minimum over rows of the fractional relaxation of that row alone.
    Deterministic; raises ``BudgetExceededError`` when ``node_budget``
    nodes are expanded without a proof of optimality (never returns a
    silently suboptimal answer).
    """
    k = problem.k
    if k == 0:
        return Selection(())
    rewards = problem.group_rewards
    num_rows = len(problem.rows)
    rhs_list = [rhs for _, rhs in problem.rows]

    # Collapse duplicate columns; remember the original indices of each.
    members: dict[tuple[int, ...], list[int]] = {}
    for l in range(k):
        key = (rewards[l],) + tuple(coeffs[l] for coeffs, _ in problem.rows)
        members.setdefault(key, []).append(l)
    keys = sorted(
        members,
        key=lambda key: (
            ((0, -key[0]) if key[1] == 0 else (1, -Fraction(key[0], key[1]))),
            members[key][0],
        ),
    )
    T = len(keys)
    p_t = [key[0] for key in keys]
    cnt = [len(members[key]) for key in keys]
    col = [[key[1 + r] for key in keys] for r in range(num_rows)]

    # Weight-objective problems (reward == aggregate coefficient) admit an
    # exact polynomial dynamic program when the cut-row state space is small.
    if all(p_t[t] == col[0][t] for t in range(T)) and rhs_list[0] >= 0:
        space = rhs_list[0] + 1
        for r in range(1, num_rows):
            space *= rhs_list[r] + 1
        if 0 < space <= _WEIGHT_DP_LIMIT and all(r >= 0 for r in rhs_list):
            counts = _greatest_weight_counts(T, cnt, col, rhs_list)
            out = [False] * k
            for t, key in enumerate(keys):
                for l in members[key][: counts[t]]:
                    out[l] = True
            return Selection(tuple(out))

    # Per-row orderings for the fractional bounds (zero-coefficient types
    # contribute their full reward for free).
    bound_rows = []
    for r in range(num_rows):
        coeffs = col[r]
        ratio_order = sorted(
            range(T),
            key=lambda t: ((0, 0) if coeffs[t] == 0 else (1, -Fraction(p_t[t], coeffs[t]))),
        )
        bound_rows.append((coeffs, rhs_list[r], ratio_order))

    def can_improve(pos: int, used: list[int], value: int, best: int) -> bool:
        """True iff every row's fractional bound strictly exceeds ``best``.

        Integer arithmetic only; each row scan stops as soon as its running
        total passes ``best`` (no prune possible from that row) or hits the
        fractional break type (exact cross-multiplied comparison).
        """
        for r, (coeffs, rhs, ratio_order) in enumerate(bound_rows):
            remaining = rhs - used[r]
            acc = value
            exceeded = acc > best
            if not exceeded:
                for t in ratio_order:
                    if t < pos:
                        continue
                    c = coeffs[t]
                    q = cnt[t]
                    if c == 0:
                        acc += p_t[t] * q
                    elif c * q <= remaining:
                        acc += p_t[t] * q
                        remaining -= c * q
                    else:
                        fit = remaining // c
                        acc += p_t[t] * fit
                        remaining -= fit * c
                        # bound = acc + p * remaining / c, compared exactly
                        exceeded = acc * c + p_t[t] * remaining > best * c
                        break
                    if acc > best:
                        exceeded = True
                        break
                else:
                    exceeded = acc > best
            if not exceeded:
                return False
        return True

    # Greedy incumbent: take as many copies as fit, in branch order.
    greedy_used = [0] * num_rows
    greedy_value = 0
    for t in range(T):
        q = cnt[t]
        for r in range(num_rows):
            c = col[r][t]
            if c:
                q = min(q, (rhs_list[r] - greedy_used[r]) // c)
        if q > 0:
            for r in range(num_rows):
                greedy_used[r] += q * col[r][t]
            greedy_value += q * p_t[t]

    # Root multipliers by projected subgradient on the Lagrangian dual.
    lam = [0.0] * num_rows
    best_lam = lam[:]
    best_dual = float("inf")
    theta = 2.0
    for _ in range(150):
        reduced = [
            p_t[t] - sum(lam[r] * col[r][t] for r in range(num_rows)) for t in range(T)
        ]
        dual = sum(cnt[t] * reduced[t] for t in range(T) if reduced[t] > 0) + sum(
            lam[r] * rhs_list[r] for r in range(num_rows)
        )
        if dual < best_dual:
            best_dual = dual
            best_lam = lam[:]
        else:
            theta *= 0.9
        grad = [
            rhs_list[r] - sum(cnt[t] * col[r][t] for t in range(T) if reduced[t] > 0)
            for r in range(num_rows)
        ]
        norm = sum(g * g for g in grad)
        if norm == 0 or dual <= greedy_value:
            break
        step = theta * max(dual - greedy_value, 1.0) / norm
        lam = [max(0.0, lam[r] - step * grad[r]) for r in range(num_rows)]

    # Fixed-point multipliers keep the per-node bound in exact integers.
    SCALE = 1 << 20
    lam_int = [max(0, int(x * SCALE)) for x in best_lam]
    reduced_scaled = [
        SCALE * p_t[t] - sum(lam_int[r] * col[r][t] for r in range(num_rows))
        for t in range(T)
    ]
    lag_suffix = [0] * (T + 1)
    for t in range(T - 1, -1, -1):
        lag_suffix[t] = lag_suffix[t + 1] + cnt[t] * max(0, reduced_scaled[t])

    best_value = -1
    best_counts: list[int] = [0] * T
    counts = [0] * T
    nodes = 0

    def dfs(pos: int, used: list[int], value: int):
        nonlocal best_value, best_counts, nodes
        nodes += 1
        if node_budget is not None and nodes > node_budget:
            raise BudgetExceededError(f"node budget {node_budget} exceeded")
        if value > best_value:
            best_value = value
            best_counts = counts.copy()
        if pos == T:
            return
        lag_bound = (
            SCALE * value
            + lag_suffix[pos]
            + sum(lam_int[r] * (rhs_list[r] - used[r]) for r in range(num_rows))
        )
        if lag_bound <= SCALE * best_value:
            return
        if not can_improve(pos, used, value, best_value):
            return
        q_max = cnt[pos]
        for r in range(num_rows):
            c = col[r][pos]
            if c:
                q_max = min(q_max, (rhs_list[r] - used[r]) // c)
        for q in range(q_max, -1, -1):
            counts[pos] = q
            dfs(
                pos + 1,
                [used[r] + q * col[r][pos] for r in range(num_rows)],
                value + q * p_t[pos],
            )
        counts[pos] = 0

    import sys

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 2 * T + 100))
    try:
        dfs(0, [0] * num_rows, 0)
    finally:
        sys.setrecursionlimit(old_limit)

    out = [False] * k
    for t, key in enumerate(keys):
        for l in members[key][: best_counts[t]]:
            out[l] = True
    return Selection(tuple(out))
