"""Shared fixtures: tiny hand-checkable graphs, a modular test objective,
and a session-cached family of brute-forced instances."""

import numpy as np
import pytest

from fastsubmod import (
    MaxCoverObjective,
    Objective,
    ObjectiveHandle,
    brute_force_opt,
    build_graph,
    gen_er,
)


class ModularObjective(Objective):
    """f(S) = sum of fixed element weights; exercises the generic state protocol."""

    def __init__(self, weights):
        self.w = np.asarray(weights, dtype=np.float64)
        self.n = len(self.w)
        self.description = f"modular(n={self.n})"

    def value(self, elements):
        idx = list(elements)
        if not idx:
            return 0.0
        return float(self.w[np.asarray(idx, dtype=np.int64)].sum())


def path3():
    """Path 0 - 1 - 2."""
    return build_graph(3, np.array([0, 1]), np.array([1, 2]))


def star5():
    """Star K_{1,4}: center 0, leaves 1..4."""
    return build_graph(5, np.array([0, 0, 0, 0]), np.array([1, 2, 3, 4]))


def triangle():
    return build_graph(3, np.array([0, 1, 2]), np.array([1, 2, 0]))


@pytest.fixture(scope="session")
def er20_instances():
    """100 seeded ER(20, 0.3) cover instances with brute-forced optima (k=5)."""
    out = []
    for seed in range(100):
        obj = MaxCoverObjective(gen_er(20, 0.3, seed=seed))
        _, opt = brute_force_opt(ObjectiveHandle(obj), 5)
        out.append((obj, opt))
    return out
