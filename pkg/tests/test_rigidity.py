import random

import pytest

from cutsys import rigidity as R
from cutsys.homotopy import ContractionError
from cutsys.sympcurves import HClass, SympSpace
from cutsys.surfaces import NoRoom, SurfaceSpec
from cutsys.universe import Room, SympZUniverse, make_universe

G, K = 3, 2
S = SympSpace(G)
a1, b1, a2 = S.basis_a(1), S.basis_b(1), S.basis_a(2)


def zu():
    return make_universe("sympZ", g=G)


def test_induced_map_of_a_twist():
    u = zu()
    w = R.TwistWord(((a1, 1),))
    fmap = R.InducedCurveMap(u, R.AutoOracle.from_twist_word(u, w), K, G)
    assert fmap(b1) == HClass((1, 1, 0, 0))


def test_induced_map_identity():
    u = zu()
    w = R.TwistWord(((a1, 0),))
    fmap = R.InducedCurveMap(u, R.AutoOracle.from_twist_word(u, w), K, G)
    assert fmap(b1) == b1
    assert fmap(a2) == a2


def test_well_definedness_over_choices():
    u = zu()
    rng = random.Random(20)
    words = [
        R.TwistWord(((a1, 1),)),
        R.TwistWord(((b1, -1), (a2, 2))),
        R.TwistWord(((a2, 1), (a1, -1))),
    ]
    for w in words:
        oracle = R.AutoOracle.from_twist_word(u, w)
        for _ in range(15):
            curve = b1 if rng.random() < 0.5 else a2
            comps = R._companions(u, curve, K, G, rng)
            partner = R._partner(u, curve, comps)
            got = R.induced_curve_map(u, oracle, curve, K, G, comps, partner)
            assert got == w.act(u, curve)


def test_schmutz_simplicial_and_negative_control():
    u = zu()
    rng = random.Random(21)
    w = R.TwistWord(((a1, 1), (b1, 1)))
    fmap = R.InducedCurveMap(u, R.AutoOracle.from_twist_word(u, w), K, G)
    samples = []
    while len(samples) < 25:
        x = u.solve([(S.basis_a(rng.randrange(1, G + 1)), rng.choice((0, 1)))])
        y = u.solve([(x, 1)])
        if x is not None and y is not None and u.inter(x, y) == 1:
            samples.append((x, y))
    rep = R.check_schmutz_simplicial(u, fmap, samples)
    assert rep.passed and rep.checked == 25

    corrupt = lambda c: a1 if u.inter(c, a1) != 1 else b1
    bad = R.check_schmutz_simplicial(u, corrupt, samples)
    assert not bad.passed


def test_nonsep_simplicial_with_separating_union_pair():
    u = zu()
    w = R.TwistWord(((b1, 2),))
    fmap = R.InducedCurveMap(u, R.AutoOracle.from_twist_word(u, w), K, G)
    dependent = HClass((1, 0, 1, 0, 0, 0))
    samples = [
        (a1, a2, False),
        (a1, dependent, False),
        # the triple witness: a1, a2, a1+a2 sums to zero, union separating
        (a2, dependent, False),
        (a1, HClass((1, 0, 2, 0, 0, 0)), True),
    ]
    rep = R.check_nonsep_simplicial(u, fmap, samples)
    assert rep.passed


def test_filling_chain_pattern_and_prefix():
    u = zu()
    pair = (a1, HClass((1, 0, 2, 0, 0, 0)))
    chain = R.build_filling_chain(u, u.room, 4, pair)
    for i in range(len(chain)):
        for j in range(i + 1, len(chain)):
            want = 1 if j == i + 1 else 0
            assert u.inter(chain[i], chain[j]) == want
    assert u.inter(chain[0], pair[0]) == 1 and u.inter(chain[0], pair[1]) == 1
    u2 = zu()
    prefix = R.build_filling_chain(u2, u2.room, 2, pair)
    assert prefix == chain[: len(prefix)]


def test_filling_chain_needs_separating_pair():
    u = zu()
    with pytest.raises(ValueError):
        R.build_filling_chain(u, u.room, 2, (a1, a2))
    with pytest.raises(ValueError):
        R.build_filling_chain(u, u.room, 2, (a1, b1))


def test_filling_chain_no_room():
    room = Room(SurfaceSpec("finite", genus=2, boundary=0))
    room.ensure(2)
    u = SympZUniverse(room)
    S2 = SympSpace(2)
    with pytest.raises((NoRoom, ContractionError)):
        R.build_filling_chain(u, room, 6, (S2.basis_a(1), HClass((1, 0, 2, 0))))


def test_phi_psi_suite():
    u = zu()
    rng = random.Random(22)
    words = [
        R.TwistWord(((a1, 1),)),
        R.TwistWord(((b1, 1),)),
        R.TwistWord(((a2, -1), (a1, 1))),
        R.TwistWord(((b1, -2),)),
    ]
    rep = R.check_phi_psi(u, words, G, K, rng, curve_samples=6)
    assert rep.passed, rep.failures[:3]


def test_twist_word_algebra():
    u = zu()
    w = R.TwistWord(((a1, 2), (b1, -1)))
    composite = w * w.inverse()
    for c in (b1, a2, HClass((1, 1, 0, 0))):
        assert composite.act(u, c) == c


def test_non_simplicial_oracle_rejected():
    u = zu()
    scramble = {}

    def fn(v):
        # swap two disjoint curves inconsistently: breaks move preservation
        return tuple(sorted((R.SympSpace(G).basis_a(((hash(c) % G) + 1)) for c in v), key=u.key))

    bad = R.AutoOracle(fn, fn, "external")
    with pytest.raises(R.NotAnAutomorphism):
        R.induced_curve_map(u, bad, b1, K, G)
