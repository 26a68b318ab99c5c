"""Shared samplers and fixtures for the test suite."""

from __future__ import annotations

import random

import pytest

from gmkp.model import Instance


def random_small_instance(
    rng: random.Random,
    equal_caps: bool | None = None,
    reward_mode: str | None = None,
    max_m: int = 4,
    max_k: int = 8,
    max_n: int = 16,
) -> Instance:
    """A small valid instance: m <= 4, k <= 8, n <= 16.

    Weights never exceed the largest capacity, the lightest item fits the
    smallest knapsack, and every group fits the total capacity.
    """
    m = rng.randint(2, max_m)
    if equal_caps is None:
        equal_caps = rng.random() < 0.5
    if equal_caps:
        caps = [rng.randint(5, 25)] * m
    else:
        caps = sorted(rng.randint(5, 25) for _ in range(m))
    c_min, c_max = caps[0], caps[-1]
    total = sum(caps)

    k = rng.randint(1, max_k)
    weights: list[int] = []
    groups: list[list[int]] = []
    # one seed item per group, the first light enough for every knapsack
    for l in range(k):
        w = rng.randint(1, c_min if l == 0 else c_max)
        groups.append([len(weights)])
        weights.append(w)
    totals = [weights[g[0]] for g in groups]
    while len(weights) < rng.randint(k, max_n):
        w = rng.randint(1, c_max)
        eligible = [l for l in range(k) if totals[l] + w <= total]
        if not eligible:
            break
        l = rng.choice(eligible)
        groups[l].append(len(weights))
        weights.append(w)
        totals[l] += w

    if reward_mode is None:
        reward_mode = rng.choice(["weight", "uniform", "weightish"])
    if reward_mode == "weight":
        rewards = list(totals)
    elif reward_mode == "uniform":
        rewards = [rng.randint(1, 50) for _ in range(k)]
    else:
        rewards = [max(1, t + rng.randint(-3, 3)) for t in totals]

    return Instance(
        capacities=tuple(caps),
        item_weights=tuple(weights),
        groups=tuple(tuple(g) for g in groups),
        rewards=tuple(rewards),
        meta=f"test-sampler mode={reward_mode}",
    )


@pytest.fixture(scope="session")
def small_suite() -> list[Instance]:
    """The 200-instance suite shared by the alpha/beta/heuristic criteria."""
    rng = random.Random(20260826)
    out = []
    for idx in range(200):
        out.append(random_small_instance(rng, equal_caps=idx % 2 == 0))
    return out


@pytest.fixture(scope="session")
def small_suite_optima(small_suite):
    from gmkp.oracle import exact_gmkp

    return [exact_gmkp(inst)[0] for inst in small_suite]
