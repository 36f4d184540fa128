import random

from cutsys import homotopy as H
from cutsys import walks
from cutsys.universe import make_universe


def test_walks_are_valid_closed_loops():
    for seed in range(8):
        rng = random.Random(seed)
        g = rng.choice((2, 3, 4))
        k = min(rng.choice((1, 2, 3)), g - 1)
        u = make_universe("sympZ", g=g)
        loop = walks.random_closed_walk(u, g, k, rng, steps=4)
        if loop is None:
            continue
        assert loop[0] == loop[-1]
        assert 2 <= len(loop) - 1 <= 16
        assert H.check_path(u, loop, closed=True)
        assert all(len(v) == k for v in loop)


def test_walks_deterministic_per_seed():
    u1 = make_universe("sympZ", g=3)
    u2 = make_universe("sympZ", g=3)
    l1 = walks.random_closed_walk(u1, 3, 2, random.Random(5), steps=4)
    l2 = walks.random_closed_walk(u2, 3, 2, random.Random(5), steps=4)
    assert l1 == l2
