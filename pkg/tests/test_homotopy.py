import random

import pytest

from cutsys import homotopy as H
from cutsys import walks
from cutsys.geomcurves import Slope
from cutsys.sympcurves import HClass, SympSpace
from cutsys.surfaces import NoRoom, SurfaceSpec
from cutsys.universe import Room, SympZUniverse, make_universe

S2, S3 = SympSpace(2), SympSpace(3)
a1, b1, a2, b2 = S2.basis_a(1), S2.basis_b(1), S2.basis_a(2), S2.basis_b(2)


def zu(g):
    return make_universe("sympZ", g=g)


def _cert(steps):
    return H.HomotopyCertificate(steps)


# --- radius and segments -----------------------------------------------------


def test_radius_examples():
    u = zu(2)
    path = ((a1,), (b1,), (HClass((1, 1, 0, 0)),))
    assert H.radius(u, path, a1) == 1
    seg = ((a1, a2), (a1, b2))
    assert H.radius(u, seg, a1) == 0
    heavy = HClass((1, 2, 0, 0))  # pairs 2 with a1
    deep = ((a1,), (heavy,))
    # a vertex whose only curve meets the reference twice pushes radius to 2
    assert H.radius(u, ((a1,), (heavy,)), a1) == 2
    with pytest.raises(H.InvalidReference):
        H.radius(u, ((a1,),), b2)


def test_radius_reversal_invariance():
    u = zu(2)
    loop = ((a1,), (b1,), (HClass((1, 1, 0, 0)),), (a1,))
    rev = tuple(reversed(loop))
    assert H.radius(u, loop, a1) == H.radius(u, rev, a1)


def test_segment_decomposition():
    u = zu(2)
    loop = (
        (a1, a2),
        (a1, b2),
        (HClass((1, 1, 0, 0)), b2),
        (a1, b2),
        (a1, a2),
    )
    segs = H.segment_decomposition(u, loop, a1)
    assert segs[0][0] == a1
    total = [(s, e) for _, s, e in segs]
    assert total[0][0] == 0 and total[-1][1] == len(loop) - 1
    for (_, _, e), (_, s, _) in zip(segs, segs[1:]):
        assert e == s


# --- bounded paths -------------------------------------------------------------


def test_path_common_direct_move():
    u = zu(2)
    p = H.Prover(u)
    v = tuple(sorted((a1, a2)))
    w = tuple(sorted((b1, a2)))
    assert H.path_common(p, v, w) == [v, w]


def test_path_common_length_two():
    u = zu(2)
    p = H.Prover(u)
    path = H.path_common(p, (a1,), (a2,))
    assert len(path) == 3
    mid = path[1][0]
    assert u.inter(mid, a1) == 1 and u.inter(mid, a2) == 1


def test_path_common_bound_random():
    rng = random.Random(10)
    for trial in range(60):
        g = rng.choice((2, 3, 4))
        k = rng.choice((1, 2, 3))
        if k > g - 1:
            continue
        u = zu(g)
        p = H.Prover(u)
        S = SympSpace(g)
        common = tuple(S.basis_a(i) for i in range(2, k + 1))
        a = S.basis_a(1)
        b = u.solve([(a, rng.choice((1, 2, 0)))] + [(c, 0) for c in common])
        if b is None or b == a or not u.cut_ok(common + (b,)):
            continue
        v = tuple(sorted(common + (a,), key=u.key))
        w = tuple(sorted(common + (b,), key=u.key))
        path = H.path_common(p, v, w)
        assert len(path) - 1 <= 4
        assert path[0] == v and path[-1] == w
        assert H.check_path(u, path)
        for vv in path[1:-1]:
            assert all(c in vv for c in common)


def test_connect_identity_and_bounds():
    u = zu(3)
    p = H.Prover(u)
    v = tuple(sorted((S3.basis_a(1), S3.basis_a(2)), key=u.key))
    assert H.connect(p, v, v) == [v]
    w = tuple(sorted((S3.basis_b(1), S3.basis_b(2)), key=u.key))
    path = H.connect(p, v, w)
    assert path[0] == v and path[-1] == w
    assert H.check_path(u, path)
    assert len(path) - 1 <= 8 * 2 - 4
    assert len(path) - 1 >= 2  # all four curves distinct


# --- squares and radius-1 -------------------------------------------------------


def test_contract_square_spec_example():
    u = zu(2)
    x2, x3 = HClass((1, 0, 1, 0)), HClass((0, 1, 1, 0))
    loop = ((a1,), (b1,), (x2,), (x3,), (a1,))
    steps = H.contract_square(u, loop)
    ok, idx = H.verify_certificate(u, loop, _cert(steps))
    assert ok, idx
    # diagonal already disjoint: no twist-reduction steps, just four triangles
    assert sum(1 for s in steps if s.op == H.CELL_FILL) == 4
    center = steps[0].new[1][0]
    assert all(u.inter(center, c) == 1 for c in (a1, b1, x2, x3))


def test_contract_square_with_reduction():
    u = zu(2)
    # make the (0,2)-diagonal meet: x2' = T_{b1}^2(a1) + ...: build explicitly
    x1 = b1
    x2 = HClass((1, 2, 1, 0))
    x3 = HClass((0, 1, 1, 0))
    loop = ((a1,), (x1,), (x2,), (x3,), (a1,))
    if H.check_path(u, loop, closed=True) and u.inter(x1, x3) == 0:
        steps = H.contract_square(u, loop)
        ok, idx = H.verify_certificate(u, loop, _cert(steps))
        assert ok, idx


def test_contract_square_not_applicable_on_slopes():
    us = make_universe("slope", bound=2)
    q = [Slope(1, 0), Slope(0, 1), Slope(1, 1), Slope(1, 2)]
    loop = tuple((s,) for s in q) + ((q[0],),)
    with pytest.raises(H.NotApplicable):
        H.contract_square(us, loop)


def test_contract_radius1_triangle_and_fan():
    u = zu(2)
    tri = ((a1,), (b1,), (HClass((1, 1, 0, 0)),), (a1,))
    steps = H.contract_radius1(u, tri, a1)
    assert H.verify_certificate(u, tri, _cert(steps))[0]
    # fan: all curves meet the center once
    x = HClass((1, 1, 0, 0))
    y = HClass((2, 1, 0, 0))
    fan = ((a1,), (b1,), (x,), (y,), (a1,))
    if H.check_path(u, fan, closed=True):
        assert H.radius(u, fan, a1) == 1
        steps = H.contract_radius1(u, fan, a1)
        assert H.verify_certificate(u, fan, _cert(steps))[0]
        assert all(s.kind == "triangle" for s in steps if s.op == H.CELL_FILL)


def test_contract_radius1_with_disjoint_vertex():
    u = zu(2)
    # 4-cycle visiting a2, which is disjoint from the center a1
    x = HClass((0, 1, 0, 1))  # b1 + b2
    y = HClass((0, 1, 0, -1))  # b1 - b2
    loop = ((a1,), (x,), (a2,), (y,), (a1,))
    assert H.check_path(u, loop, closed=True), [
        (u.inter(loop[i][0], loop[i + 1][0])) for i in range(4)
    ]
    assert H.radius(u, loop, a1) == 1
    steps = H.contract_radius1(u, loop, a1)
    ok, idx = H.verify_certificate(u, loop, _cert(steps))
    assert ok, idx


def test_contract_radius1_rejects_radius2():
    u = zu(2)
    heavy = HClass((1, 2, 0, 0))
    mid = u.solve([(a1, 1), (heavy, 1)])
    loop = ((a1,), (mid,), (heavy,), (mid,), (a1,))
    if H.check_path(u, loop, closed=True) and H.radius(u, loop, a1) > 1:
        with pytest.raises(H.NotApplicable):
            H.contract_radius1(u, loop, a1)


def test_contract_radius1_on_slopes():
    us = make_universe("slope", bound=3)
    fan = ((Slope(1, 0),), (Slope(0, 1),), (Slope(1, 1),), (Slope(1, 0),))
    steps = H.contract_radius1(us, fan, Slope(1, 0))
    assert H.verify_certificate(us, fan, _cert(steps))[0]


# --- escorts and the hexagon ----------------------------------------------------


def test_escort_triple_postconditions():
    u = zu(2)
    p = H.Prover(u)
    loop_curves = [a1, b1, HClass((1, 1, 0, 0))]
    b0, b1e, b2e = H.escort_triple(p, loop_curves)
    assert all(u.inter(b2e, c) == 0 for c in loop_curves)
    assert u.inter(b2e, b0) == 1 and u.inter(b2e, b1e) == 1
    assert u.inter(b0, loop_curves[0]) == 1
    assert u.inter(b1e, loop_curves[1]) == 1


def test_escort_triple_no_room():
    room = Room(SurfaceSpec("finite", genus=2, boundary=0))
    room.ensure(2)
    u = SympZUniverse(room)
    p = H.Prover(u)
    with pytest.raises(NoRoom):
        H.escort_triple(p, [a1, b1])


def test_hex_escorts_spec_example():
    u = zu(2)
    p = H.Prover(u)
    trip = (a1, a2, HClass((1, 0, 1, 0)))
    (c0, c1, c2), hexagon, cert = H.hex_escorts(p, *trip)
    # all nine pattern pairings
    bs = (c0, c1, c2)
    for i in range(3):
        assert u.inter(trip[i], bs[i]) == 1
        assert u.inter(trip[(i + 1) % 3], bs[i]) == 1
        assert u.inter(trip[(i + 2) % 3], bs[i]) == 0
    assert u.inter(c0, c1) == 0 and u.inter(c0, c2) == 0 and u.inter(c1, c2) == 0
    ok, idx = H.verify_certificate(u, hexagon, cert)
    assert ok, idx
    kinds = sorted(s.kind for s in cert.steps if s.op == H.CELL_FILL)
    assert kinds == ["pentagon", "rectangle", "rectangle", "triangle", "triangle", "triangle"]


def test_hex_escorts_rejects_independent_triple():
    u = zu(3)
    p = H.Prover(u)
    with pytest.raises(H.NotApplicable):
        H.hex_escorts(p, S3.basis_a(1), S3.basis_a(2), S3.basis_a(3))


def test_hex_escorts_rejects_meeting_curves():
    u = zu(2)
    p = H.Prover(u)
    with pytest.raises(H.NotApplicable):
        H.hex_escorts(p, a1, b1, a2)


def test_hex_escorts_random_triples():
    rng = random.Random(11)
    done = 0
    while done < 15:
        g = rng.choice((2, 3))
        u = zu(g)
        p = H.Prover(u)
        S = SympSpace(g)
        x, y = S.basis_a(1), S.basis_a(2)
        z = HClass(tuple(a + b for a, b in zip(x.padded(g), y.padded(g))))
        # twist the triple around to vary it, preserving the hypotheses
        pool = [S.basis_a(i) for i in range(1, g + 1)] + [
            S.basis_b(i) for i in range(1, g + 1)
        ]
        trip = [x, y, z]
        for _ in range(rng.randint(0, 4)):
            t = pool[rng.randrange(len(pool))]
            n = rng.choice((-1, 1))
            trip = [u.twist(t, n, c) for c in trip]
        try:
            (c0, c1, c2), hexagon, cert = H.hex_escorts(p, *trip)
        except H.NotApplicable:
            continue
        bs = (c0, c1, c2)
        for i in range(3):
            assert u.inter(trip[i], bs[i]) == 1
            assert u.inter(trip[(i + 1) % 3], bs[i]) == 1
            assert u.inter(trip[(i + 2) % 3], bs[i]) == 0
        assert H.verify_certificate(u, hexagon, cert)[0]
        done += 1


# --- radius-0 and the master contraction ------------------------------------------


def test_sp_radius0_two_segment_loop():
    u = zu(3)
    p = H.Prover(u)
    S = SympSpace(3)
    c, x, y = S.basis_a(1), S.basis_a(2), S.basis_b(2)
    # a c-segment loop: x and y swap back and forth
    loop = (
        tuple(sorted((c, x), key=u.key)),
        tuple(sorted((c, y), key=u.key)),
        tuple(sorted((c, x), key=u.key)),
    )
    steps = H.sp_radius0(p, loop, c)
    assert H.verify_certificate(u, loop, _cert(steps))[0]


def test_contract_radius0_trivial_k1():
    u = zu(2)
    p = H.Prover(u)
    loop = ((a1,),)
    assert H.contract_radius0(p, loop, a1) == []


def test_contract_cell_fast_path():
    u = zu(2)
    x = HClass((1, 1, 0, 0))
    tri = ((a1,), (b1,), (x,), (a1,))
    p = H.Prover(u)
    steps = H.contract(p, tri)
    fills = [s for s in steps if s.op == H.CELL_FILL]
    assert len(fills) == 1 and fills[0].kind == "triangle"
    assert H.verify_certificate(u, tri, _cert(steps))[0]


def test_contract_gamma1_loop():
    u = zu(2)
    p = H.Prover(u)
    w = [a1, b1, HClass((1, 1, 0, 0)), HClass((2, 1, 0, 0))]
    loop = tuple((c,) for c in w) + ((a1,),)
    steps = H.contract(p, loop)
    ok, idx = H.verify_certificate(u, loop, _cert(steps))
    assert ok, idx


def test_contract_radius0_random_multisegment():
    rng = random.Random(12)
    done = 0
    while done < 6:
        g = 5
        u = zu(g)
        p = H.Prover(u)
        loop = walks.random_closed_walk(u, g, 2, rng, steps=5)
        if loop is None:
            continue
        trace = []
        b = p.fresh_pair()[0]
        # bridge manually to make a radius-0 instance about the fresh curve
        steps = H.contract(p, loop)
        ok, idx = H.verify_certificate(u, loop, _cert(steps))
        assert ok, idx
        done += 1


def test_contract_termination_measure():
    rng = random.Random(13)
    u = zu(4)
    p = H.Prover(u)
    loop = walks.random_closed_walk(u, 4, 2, rng, steps=4)
    assert loop is not None
    trace = []
    # run the radius-0 engine directly on a bridged loop to watch the measure
    b = p.fresh_pair()[0]
    k = len(loop[0])
    w0 = p.fresh_fill([b, loop[0][0]], k - 2)
    steps = H.contract(p, loop)
    assert H.verify_certificate(u, loop, _cert(steps))[0]


def test_verify_rejects_tampering():
    u = zu(2)
    x = HClass((1, 1, 0, 0))
    tri = ((a1,), (b1,), (x,), (a1,))
    p = H.Prover(u)
    steps = H.contract(p, tri)
    # corrupt the fill's replacement window
    bad = list(steps)
    s = bad[0]
    bad[0] = H.Step(s.op, s.at, s.old, ((a1,), (a2,)), s.kind)
    ok, idx = H.verify_certificate(u, tri, _cert(bad))
    assert not ok and idx == 0
    # delete a step: replay desynchronizes
    ok, idx = H.verify_certificate(u, tri, _cert(steps[1:]))
    assert not ok


def test_certificate_json_roundtrip():
    u = zu(2)
    x = HClass((1, 1, 0, 0))
    tri = ((a1,), (b1,), (x,), (a1,))
    p = H.Prover(u)
    cert = _cert(H.contract(p, tri))
    blob = cert.to_json()
    back = H.HomotopyCertificate.from_json(blob)
    assert back.steps == cert.steps
    assert H.verify_certificate(u, tri, back)[0]


def test_rotation_wrapper():
    u = zu(2)
    x = HClass((1, 1, 0, 0))
    loop = ((b1,), (x,), (a1,), (b1,))  # triangle based elsewhere
    steps = H.contract_rebased(
        u, loop, 2, lambda vs: H.contract(H.Prover(u), vs)
    )
    assert H.verify_certificate(u, loop, _cert(steps))[0]


def test_connect_no_room_on_finite():
    room = Room(SurfaceSpec("finite", genus=2, boundary=0))
    room.ensure(2)
    u = SympZUniverse(room)
    p = H.Prover(u)
    v = tuple(sorted((a1, a2), key=u.key))
    w = tuple(sorted((b1, b2), key=u.key))
    with pytest.raises(NoRoom):
        H.connect(p, v, w)


def test_termination_trace_segment_counts_decrease():
    # at k = 2 every radius-0 reduction strictly shrinks the decomposition
    rng = random.Random(99)
    u = zu(4)
    p = H.Prover(u)
    loop = walks.random_closed_walk(u, 4, 2, rng, steps=5)
    assert loop is not None
    b = p.fresh_pair()[0]
    k = len(loop[0])
    v0, v1 = loop[0], loop[1]
    shared = sorted(set(v0) & set(v1), key=u.key)[0]
    w0 = p.fresh_fill([b, shared], k - 2)
    s1 = H.segment_connect(p, v0, w0, (shared,))
    s2 = H.segment_connect(p, w0, v1, (shared,))
    y = s1[:-1] + s2
    rw = p.rewriter(loop)
    just = H.sp_radius0(p, tuple(y + [v0]), shared)
    rw.replace(0, 1, y, just)
    trace = []
    steps = H.contract_radius0(p, tuple(rw.path), b, _trace=trace)
    rw.apply_steps(steps)
    ok, idx = H.verify_certificate(u, loop, _cert(rw.steps))
    assert ok, idx
    top = [segs for kk, segs in trace if kk == 2]
    assert all(a > b2 for a, b2 in zip(top, top[1:])), top


def test_contract_word_triangle_fast_path():
    from cutsys.geomcurves import CyclicWord, RibbonSurface

    us = make_universe("word", g=1, boundary=1)
    T = us.surface
    x, y, xy = CyclicWord([1], T), CyclicWord([2], T), CyclicWord([1, 2], T)
    tri = ((x,), (y,), (xy,), (x,))
    p = H.Prover(us)
    steps = H.contract(p, tri)
    assert H.verify_certificate(us, tri, _cert(steps))[0]


def test_curve_graph_reporting():
    from cutsys import complexes as cx

    u = make_universe("sympF2", g=2)
    cg = cx.build_curve_graph(u)
    assert len(cg.vertices) == 15
    assert not cg.cells
    # disjointness degrees: each nonzero vector has 6 orthogonal companions
    assert {cg.degree(v) for v in cg.vertices} == {6}


def test_contract_radius0_rejects_nonzero_radius():
    u = zu(2)
    p = H.Prover(u)
    x = HClass((1, 1, 0, 0))
    tri = ((a1,), (b1,), (x,), (a1,))  # radius 1 about a1, not 0
    with pytest.raises(H.NotApplicable):
        H.contract_radius0(p, tri, a1)


def test_two_segment_radius0_loop():
    u = zu(3)
    p = H.Prover(u)
    S = SympSpace(3)
    A1, A2, B1, B2 = S.basis_a(1), S.basis_a(2), S.basis_b(1), S.basis_b(2)
    v0 = tuple(sorted((A1, A2), key=u.key))
    s1mid = tuple(sorted((A1, B2), key=u.key))
    s1far = tuple(sorted((A1, HClass((0, 0, 1, 1, 0, 0))), key=u.key))
    s2mid = tuple(sorted((A2, B1), key=u.key))
    s2far = tuple(sorted((A2, HClass((1, 1, 0, 0, 0, 0))), key=u.key))
    loop = (v0, s1mid, s1far, v0, s2mid, s2far, v0)
    assert H.check_path(u, loop, closed=True)
    assert H.radius(u, loop, A1) == 0
    segs = H.segment_decomposition(u, loop, A1)
    steps = H.contract_radius0(p, loop, A1)
    ok, idx = H.verify_certificate(u, loop, _cert(steps))
    assert ok, idx


def test_case2_hexagon_route_full_loop():
    # the disjoint candidate sits inside the junction vertex, so the segment
    # reduction rides the hexagon bypass
    u = zu(3)
    S = SympSpace(3)
    A1, A2, A3 = S.basis_a(1), S.basis_a(2), S.basis_a(3)
    B1, B3 = S.basis_b(1), S.basis_b(3)
    a13 = HClass((1, 0, 0, 0, 1, 0))
    z = HClass((0, 1, 0, 1, 0, -1))
    y = HClass((0, 1, 0, 0, 0, 1))
    V = lambda *cs: tuple(sorted(cs, key=u.key))
    loop = (V(A1, A2), V(B1, A2), V(a13, A2), V(a13, z), V(B3, z),
            V(B3, A2), V(A3, A2), V(y, A2), V(A1, A2))
    assert H.check_path(u, loop, closed=True)
    assert H.radius(u, loop, A1) == 0
    p = H.Prover(u)
    steps = H.contract_radius0(p, loop, A1)
    ok, idx = H.verify_certificate(u, loop, _cert(steps))
    assert ok, idx
    kinds = {s.kind for s in steps if s.op == H.CELL_FILL}
    assert "pentagon" in kinds  # the hexagon certificate was spliced in


def test_separating_shadow_trap_recenters():
    # orthogonal pair with imprimitive span at the junction: no geometric
    # counterpart, the engine must dodge by recentering
    u = zu(3)
    S = SympSpace(3)
    A1, A3 = S.basis_a(1), S.basis_a(3)
    B1, B3 = S.basis_b(1), S.basis_b(3)
    a2c = HClass((1, 0, 2, 0, 0, 0))
    a3c = HClass((0, 0, 1, 0, 1, 0))
    z = HClass((0, 2, 0, -1, 0, 1))
    w6 = HClass((0, 0, 1, 0, 0, 1))
    V = lambda *cs: tuple(sorted(cs, key=u.key))
    loop = (V(A1, a3c), V(A1, B3), V(A1, A3), V(B1, A3), V(a2c, A3),
            V(a2c, z), V(a2c, w6), V(a2c, a3c), V(a3c, B1), V(A1, a3c))
    assert H.check_path(u, loop, closed=True)
    assert H.radius(u, loop, A1) == 0
    assert not H._stack_primitive(H.Prover(u), (A1, a2c))
    p = H.Prover(u)
    steps = H.contract_radius0(p, loop, A1)
    ok, idx = H.verify_certificate(u, loop, _cert(steps))
    assert ok, idx


def test_merge_when_next_segment_returns_to_center():
    u = zu(2)
    S = SympSpace(2)
    A1, A2, B1, B2 = S.basis_a(1), S.basis_a(2), S.basis_b(1), S.basis_b(2)
    ab = HClass((1, 1, 0, 0))
    V = lambda *cs: tuple(sorted(cs, key=u.key))
    loop = (V(A1, A2), V(B1, A2), V(ab, A2), V(A1, A2),
            V(A1, B2), V(B1, B2), V(B1, A2), V(A1, A2))
    assert H.check_path(u, loop, closed=True)
    assert H.radius(u, loop, A1) == 0
    p = H.Prover(u)
    steps = H.contract_radius0(p, loop, A1)
    ok, idx = H.verify_certificate(u, loop, _cert(steps))
    assert ok, idx


def test_case2_merge_worker_k3():
    # at k >= 3 with a non-separating triple, the worker merges through a
    # common vertex; every emitted step is validated live by the rewriter
    u = zu(4)
    S = SympSpace(4)
    A1, A2, A3, A4 = (S.basis_a(i) for i in range(1, 5))
    B1, B3 = S.basis_b(1), S.basis_b(3)
    a13 = HClass((1, 0, 0, 0, 1, 0, 0, 0))
    V = lambda *cs: tuple(sorted(cs, key=u.key))
    seg2 = [V(A1, A2, A4), V(B1, A2, A4), V(a13, A2, A4), V(B3, A2, A4), V(A3, A2, A4)]
    assert H.check_path(u, seg2)
    p = H.Prover(u)
    rw = p.rewriter(seg2)
    H._case2(p, rw, A1, A2, A3, 0, len(seg2) - 1)
    assert rw.path[0] == seg2[0] and rw.path[-1] == seg2[-1]
    assert all(A1 in v or A3 in v for v in rw.path)


def test_contract_eight_step_walk_g4_k2():
    rng = random.Random(4242)
    u = zu(4)
    loop = walks.random_closed_walk(u, 4, 2, rng, steps=8, max_len=24)
    assert loop is not None
    p = H.Prover(u)
    steps = H.contract(p, loop)
    ok, idx = H.verify_certificate(u, loop, _cert(steps))
    assert ok, idx
