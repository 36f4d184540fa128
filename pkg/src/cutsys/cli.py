"""Batch front door: build complexes, measure them, contract loops, verify
certificates, and run the rigidity and invariant suites.

Every run is driven by a 64-bit seed and writes canonical JSON (sorted keys,
no timestamps), so identical configurations produce byte-identical reports.
Exit codes: 0 all assertions hold, 1 an assertion failed (first counterexample
in the report), 2 bad usage.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from concurrent.futures import ThreadPoolExecutor

from . import complexes as cx
from . import geomcurves, homotopy, rigidity, walks
from .sympcurves import HClass, SympSpace, pairing, transvect_vec, pairing_vec
from .universe import make_universe


def _dump(obj, out):
    text = json.dumps(obj, sort_keys=True, indent=1)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _universe(args):
    return make_universe(
        args.backend,
        g=args.g,
        bound=getattr(args, "bound", 2),
        word_bound=getattr(args, "word_bound", 12),
        boundary=getattr(args, "boundary", 1),
    )


def cmd_build(args):
    u = _universe(args)
    if args.k == 1 and args.schmutz:
        graph = cx.build_schmutz(u)
    else:
        graph = cx.build_gamma(u, args.k)
    report = graph.to_json()
    _dump(report, args.out)
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(graph.to_dot() + "\n")
    return 0


def cmd_diam(args):
    u = _universe(args)
    if args.backend == "sympF2" and args.implicit:
        if args.k == 1:
            d = cx.f2_gamma1_eccentricity(args.g)
        elif args.k == 2:
            d, _ = cx.f2_gamma_k2_eccentricity(args.g)
        else:
            print("implicit diameter supports k in {1, 2}", file=sys.stderr)
            return 2
    else:
        d = cx.diameter(cx.build_gamma(u, args.k))
    ok = args.k <= d <= 8 * args.k - 4
    _dump(
        {"backend": args.backend, "g": args.g, "k": args.k, "diameter": d,
         "window": [args.k, 8 * args.k - 4], "in_window": ok},
        args.out,
    )
    return 0 if ok else 1


def cmd_homology(args):
    u = _universe(args)
    graph = cx.build_gamma(u, args.k)
    b0, b1 = cx.chain_homology(graph)
    _dump({"backend": args.backend, "g": args.g, "k": args.k, "b0": b0, "b1": b1}, args.out)
    return 0


def _loop_json(loop):
    return [[c.to_json() for c in v] for v in loop]


def _loop_from_json(obj):
    return tuple(tuple(sorted((HClass.from_json(c) for c in v))) for v in obj)


def cmd_contract(args):
    rng = random.Random(args.seed)
    u = make_universe("sympZ", g=args.g)
    loop = walks.random_closed_walk(u, args.g, args.k, rng, steps=args.steps)
    if loop is None:
        print("loop sampling stalled", file=sys.stderr)
        return 1
    prover = homotopy.Prover(u)
    cert = homotopy.HomotopyCertificate(homotopy.contract(prover, loop))
    ok, idx = homotopy.verify_certificate(u, loop, cert)
    report = {
        "g": args.g,
        "k": args.k,
        "seed": args.seed,
        "loop": _loop_json(loop),
        "certificate": cert.to_json(),
        "verified": ok,
    }
    _dump(report, args.out)
    return 0 if ok else 1


def cmd_verify(args):
    with open(args.input) as fh:
        data = json.load(fh)
    loop = _loop_from_json(data["loop"])
    cert = homotopy.HomotopyCertificate.from_json(data["certificate"])
    g = max(c.g for v in loop for c in v)
    u = make_universe("sympZ", g=g)
    ok, idx = homotopy.verify_certificate(u, loop, cert)
    _dump({"verified": ok, "failing_step": idx}, args.out)
    return 0 if ok else 1


def cmd_rigidity(args):
    rng = random.Random(args.seed)
    u = make_universe("sympZ", g=args.g)
    S = SympSpace(args.g)
    pool = [S.basis_a(i) for i in range(1, args.g + 1)] + [
        S.basis_b(i) for i in range(1, args.g + 1)
    ]
    words = []
    for _ in range(args.words):
        n = rng.randint(1, 3)
        factors = tuple(
            (pool[rng.randrange(len(pool))], rng.choice((-2, -1, 1, 2)))
            for _ in range(n)
        )
        words.append(rigidity.TwistWord(factors))
    rep = rigidity.check_phi_psi(u, words, args.g, args.k, rng, curve_samples=args.samples)
    _dump({"suite": "phi-psi", **rep.to_json()}, args.out)
    return 0 if rep.passed else 1


def _props_tasks(args):
    tasks = []

    def twist_identity():
        rng = random.Random(args.seed)
        S = SympSpace(3)
        count = 0
        for _ in range(2000):
            u_ = tuple(rng.randint(-2, 2) for _ in range(6))
            v_ = tuple(rng.randint(-2, 2) for _ in range(6))
            w_ = tuple(rng.randint(-2, 2) for _ in range(6))
            n = rng.randint(-5, 5)
            lhs = pairing_vec(transvect_vec(u_, n, v_), w_)
            rhs = pairing_vec(v_, w_) + n * pairing_vec(u_, v_) * pairing_vec(u_, w_)
            if lhs != rhs:
                return {"name": "twist-identity", "checked": count, "failed": [u_, v_, w_, n]}
            count += 1
        return {"name": "twist-identity", "checked": count, "failed": None}

    def slope_inequality():
        slopes = geomcurves.all_slopes(3)
        count = 0
        for a in slopes:
            for b in slopes:
                for c in slopes:
                    for n in range(-4, 5):
                        lhs = abs(
                            geomcurves.islope(geomcurves.twist_slope(a, n, b), c)
                            - abs(n) * geomcurves.islope(a, b) * geomcurves.islope(a, c)
                        )
                        if lhs > geomcurves.islope(b, c):
                            return {
                                "name": "slope-inequality",
                                "checked": count,
                                "failed": [a.to_json(), b.to_json(), c.to_json(), n],
                            }
                        count += 1
        return {"name": "slope-inequality", "checked": count, "failed": None}

    def schmutz_equality():
        u = make_universe("sympF2", g=2)
        g1 = cx.build_gamma(u, 1)
        sm = cx.build_schmutz(u)
        same = g1.vertices == sm.vertices and set(g1.edges) == set(sm.edges)
        return {"name": "schmutz-identity", "checked": 1, "failed": None if same else "graphs differ"}

    def contract_roundtrip():
        rng = random.Random(args.seed)
        u = make_universe("sympZ", g=3)
        loop = walks.random_closed_walk(u, 3, 2, rng, steps=3)
        if loop is None:
            return {"name": "contract-roundtrip", "checked": 0, "failed": "sampling"}
        prover = homotopy.Prover(u)
        cert = homotopy.HomotopyCertificate(homotopy.contract(prover, loop))
        ok, idx = homotopy.verify_certificate(u, loop, cert)
        return {
            "name": "contract-roundtrip",
            "checked": 1,
            "failed": None if ok else f"step {idx}",
        }

    tasks = [twist_identity, slope_inequality, schmutz_equality, contract_roundtrip]
    return tasks


def cmd_props(args):
    tasks = _props_tasks(args)
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(lambda f: f(), tasks))
    else:
        results = [f() for f in tasks]
    ok = all(r["failed"] is None for r in results)
    _dump({"suites": results, "passed": ok}, args.out)
    return 0 if ok else 1


def make_parser():
    p = argparse.ArgumentParser(
        prog="cutsys",
        description="cut-system complexes: build, measure, contract, verify",
    )
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--seed", type=int, default=0, help="64-bit seed for all randomness")
    shared.add_argument("--out", default=None, help="report file (default: stdout)")
    shared.add_argument("--jobs", type=int, default=1, help="worker pool size")
    sub = p.add_subparsers(dest="command", required=True)

    def common(q, backends=("sympF2", "sympZ", "slope", "word")):
        q.add_argument("--backend", choices=backends, default="sympF2")
        q.add_argument("--g", type=int, default=2)
        q.add_argument("--k", type=int, default=1)
        q.add_argument("--bound", type=int, default=2, help="slope box bound")
        q.add_argument("--word-bound", type=int, default=12, dest="word_bound")
        q.add_argument("--boundary", type=int, default=1)

    q = sub.add_parser("build", parents=[shared], help="build a complex, write JSON and DOT")
    common(q)
    q.add_argument("--schmutz", action="store_true", help="build the Schmutz graph")
    q.add_argument("--dot", default=None, help="also write DOT to this path")
    q.set_defaults(fn=cmd_build)

    q = sub.add_parser("diam", parents=[shared], help="exact diameter with the k..8k-4 window check")
    common(q)
    q.add_argument("--implicit", action="store_true", help="implicit BFS for big F2 graphs")
    q.set_defaults(fn=cmd_diam)

    q = sub.add_parser("homology", parents=[shared], help="Betti numbers of the 2-complex")
    common(q)
    q.set_defaults(fn=cmd_homology)

    q = sub.add_parser("contract", parents=[shared], help="contract a seeded random loop")
    q.add_argument("--g", type=int, default=3)
    q.add_argument("--k", type=int, default=2)
    q.add_argument("--steps", type=int, default=4)
    q.set_defaults(fn=cmd_contract)

    q = sub.add_parser("verify", parents=[shared], help="replay a certificate against its loop")
    q.add_argument("input", help="JSON file with loop and certificate")
    q.set_defaults(fn=cmd_verify)

    q = sub.add_parser("rigidity", parents=[shared], help="induced-map identity suites")
    q.add_argument("--g", type=int, default=3)
    q.add_argument("--k", type=int, default=2)
    q.add_argument("--words", type=int, default=8)
    q.add_argument("--samples", type=int, default=10)
    q.set_defaults(fn=cmd_rigidity)

    q = sub.add_parser("props", parents=[shared], help="invariant property suites")
    q.set_defaults(fn=cmd_props)

    return p


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
