"""Induced curve maps of complex automorphisms, and the sampled identities
pinning them to twist actions.

An automorphism is only ever available as an oracle on a finite ball.  From
it the curve-level map is read off as the unique curve in f(v) - f(w) for a
move v <-> w swapping the queried curve; the module checks well-definedness
over companion choices, simpliciality on the Schmutz graph and on the
disjointness graph, the homomorphism law of the induced-map assignment, and
the pointwise match with the underlying twist word.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import homotopy as H
from . import intlin
from .sympcurves import SympSpace, stack_rows


class NotAnAutomorphism(ValueError):
    pass


@dataclass(frozen=True)
class TwistWord:
    """Composition of twist powers, leftmost applied last."""

    factors: tuple  # ((curve, exponent), ...)

    def act(self, universe, c):
        for curve, exp in reversed(self.factors):
            c = universe.twist(curve, exp, c)
        return c

    def inverse(self):
        return TwistWord(tuple((c, -e) for c, e in reversed(self.factors)))

    def __mul__(self, other):
        return TwistWord(self.factors + other.factors)

    @property
    def trivial(self):
        return all(e == 0 for _, e in self.factors)

    def to_json(self, space=None):
        return [[repr(c), e] for c, e in self.factors]


@dataclass
class AutoOracle:
    """Vertex map on cut systems, with inverse; provenance recorded."""

    fn: object
    inv: object
    provenance: str = "twist-word"

    @classmethod
    def from_twist_word(cls, universe, word):
        def fn(v):
            return tuple(sorted((word.act(universe, c) for c in v), key=universe.key))

        inv_word = word.inverse()

        def inv(v):
            return tuple(
                sorted((inv_word.act(universe, c) for c in v), key=universe.key)
            )

        return cls(fn, inv, "twist-word")


@dataclass
class InducedCurveMap:
    """The curve-level map read off an automorphism oracle, built lazily."""

    universe: object
    oracle: AutoOracle
    k: int
    g: int
    cache: dict = field(default_factory=dict)

    def __call__(self, a, companions=None, partner=None):
        key = (a, companions, partner)
        if companions is None and a in self.cache:
            return self.cache[a]
        value = induced_curve_map(
            self.universe, self.oracle, a, self.k, self.g, companions, partner
        )
        if companions is None:
            self.cache[a] = value
        return value


def _companions(universe, a, k, g, rng=None, forbid=()):
    """Curves completing a to a cut system of size k."""
    rng = rng or random.Random(0)
    out = []
    space = SympSpace(g)
    for _ in range(200):
        if len(out) == k - 1:
            break
        cons = [(a, 0)] + [(c, 0) for c in out]
        jitter = []
        pool = [space.basis_a(i) for i in range(1, g + 1)] + [
            space.basis_b(i) for i in range(1, g + 1)
        ]
        x = pool[rng.randrange(len(pool))]
        jitter = [(x, rng.choice((0, 1)))]
        d = universe.solve(cons + jitter, forbid=tuple(out) + (a,) + tuple(forbid))
        if d is None:
            continue
        if universe.cut_ok(tuple(out) + (d, a)):
            out.append(d)
    if len(out) != k - 1:
        raise NotAnAutomorphism("could not complete the curve to a cut system")
    return tuple(out)


def _partner(universe, a, companions, forbid=()):
    d = universe.solve(
        [(a, 1)] + [(c, 0) for c in companions], forbid=(a,) + tuple(companions) + tuple(forbid)
    )
    if d is None or not universe.cut_ok(tuple(companions) + (d,)):
        raise NotAnAutomorphism("no partner curve meeting the query once")
    return d


def induced_curve_map(universe, oracle, a, k, g, companions=None, partner=None):
    """The unique curve in f(v) - f(w) for a move v <-> w swapping a."""
    companions = companions or _companions(universe, a, k, g)
    b = partner or _partner(universe, a, companions)
    v = tuple(sorted((a,) + companions, key=universe.key))
    w = tuple(sorted((b,) + companions, key=universe.key))
    fv, fw = oracle.fn(v), oracle.fn(w)
    if not H.check_path(universe, [fv, fw]):
        raise NotAnAutomorphism("oracle does not preserve the elementary move")
    diff = set(fv) - set(fw)
    if len(diff) != 1:
        raise NotAnAutomorphism("image systems do not differ in one curve")
    return next(iter(diff))


@dataclass
class Report:
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures

    def to_json(self):
        return {
            "checked": self.checked,
            "failed": len(self.failures),
            "first_counterexample": repr(self.failures[0]) if self.failures else None,
        }


def check_schmutz_simplicial(universe, fmap, samples):
    """i(a, b) = 1 must imply i(fmap(a), fmap(b)) = 1 on all samples."""
    rep = Report()
    for a, b in samples:
        assert universe.inter(a, b) == 1
        fa, fb = fmap(a), fmap(b)
        rep.checked += 1
        if universe.inter(fa, fb) != 1:
            rep.failures.append((a, b, fa, fb))
    return rep


def check_nonsep_simplicial(universe, fmap, samples):
    """Disjointness must be preserved; separating-union pairs are routed
    through the same pairing check, tagged in the sample."""
    rep = Report()
    for a, b, separating_union in samples:
        assert universe.inter(a, b) == 0
        fa, fb = fmap(a), fmap(b)
        rep.checked += 1
        if universe.inter(fa, fb) != 0:
            rep.failures.append((a, b, separating_union, fa, fb))
    return rep


def build_filling_chain(universe, room, stage_count, pair):
    """An ordered chain c_0, ..., c_m: consecutive curves meet once, all other
    pairs are disjoint, and c_0 meets both distinguished curves once.

    Staged by the exhaustion: the chain built at stage n is a prefix of the
    chain at stage n + 1.
    """
    a, b = pair
    if universe.inter(a, b) != 0:
        raise ValueError("the distinguished pair must be disjoint")
    rows, _ = stack_rows([a, b])
    if intlin.is_primitive_stack(rows):
        raise ValueError("the distinguished pair must have separating union")
    chain = []
    c0 = universe.solve([(a, 1), (b, 1)])
    if c0 is None:
        raise H.ContractionError("no chain seed at this genus")
    chain.append(c0)
    for n in range(stage_count):
        prev = chain[-1]
        others = [c for c in chain[:-1]] + [a, b]
        cons = [(prev, 1)] + [(c, 0) for c in others]
        nxt = universe.solve(cons, forbid=tuple(chain) + (a, b))
        if nxt is None:
            raise H.ContractionError("chain construction stalled")
        # displace into the next stage: keeps every prescribed pairing and
        # frees the later links from rational dependences
        _ha, hb = room.fresh_pair()
        g = max(nxt.g, hb.g)
        nxt = type(nxt)(
            tuple(x + y for x, y in zip(nxt.padded(g), hb.padded(g)))
        )
        chain.append(nxt)
    return chain


def check_phi_psi(universe, words, g, k, rng, curve_samples=30):
    """Homomorphism, pointwise-match, and moving-vertex identities for the
    induced maps of twist words."""
    rep = Report()
    space = SympSpace(g)
    pool = [space.basis_a(i) for i in range(1, g + 1)] + [
        space.basis_b(i) for i in range(1, g + 1)
    ]

    def random_curve():
        while True:
            cons = [(pool[rng.randrange(len(pool))], rng.choice((0, 1, 1)))]
            d = universe.solve(cons)
            if d is not None:
                return d

    for word in words:
        oracle = AutoOracle.from_twist_word(universe, word)
        fmap = InducedCurveMap(universe, oracle, k, g)
        for _ in range(curve_samples):
            a = random_curve()
            rep.checked += 1
            if fmap(a) != word.act(universe, a):
                rep.failures.append(("pointwise", word, a))
        if not word.trivial:
            moved = False
            for i in range(1, g + 1):
                for c in (space.basis_a(i), space.basis_b(i)):
                    if word.act(universe, c) != c:
                        moved = True
            rep.checked += 1
            if not moved:
                rep.failures.append(("kernel-witness", word))
    for w1 in words[: len(words) // 2]:
        for w2 in words[len(words) // 2 :]:
            composite = w1 * w2
            o1 = AutoOracle.from_twist_word(universe, w1)
            o2 = AutoOracle.from_twist_word(universe, w2)
            oc = AutoOracle.from_twist_word(universe, composite)
            f1 = InducedCurveMap(universe, o1, k, g)
            f2 = InducedCurveMap(universe, o2, k, g)
            fc = InducedCurveMap(universe, oc, k, g)
            for _ in range(3):
                a = random_curve()
                rep.checked += 1
                if f1(f2(a)) != fc(a):
                    rep.failures.append(("homomorphism", w1, w2, a))
    return rep
