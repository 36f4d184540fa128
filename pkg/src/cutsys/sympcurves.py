"""Homological curve shadows: primitive classes in a symplectic lattice.

A non-separating curve on a closed genus-g surface is modelled by its first
homology class: a primitive integer vector of length 2g, taken mod sign.  The
algebraic pairing |u^T J v| stands in for the geometric intersection number,
transvections stand in for Dehn twists, and "cut system" becomes "primitive
isotropic frame".  Coordinates are interleaved (a1, b1, a2, b2, ...), so a
class extends to any larger genus by zero padding; canonical representatives
drop trailing zero handle-pairs, which makes classes stable under
stabilization.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from . import intlin


class SpaceMismatch(ValueError):
    pass


class NotACutSystem(ValueError):
    pass


@dataclass(frozen=True)
class SympSpace:
    """Standard symplectic lattice of rank 2g with <a_i, b_i> = +1."""

    g: int

    @property
    def rank(self):
        return 2 * self.g

    def basis_a(self, i):
        """Class of the i-th a-curve (1-indexed)."""
        if not 1 <= i <= self.g:
            raise SpaceMismatch(f"no handle {i} at genus {self.g}")
        return HClass._make(tuple(1 if t == 2 * (i - 1) else 0 for t in range(2 * i)))

    def basis_b(self, i):
        if not 1 <= i <= self.g:
            raise SpaceMismatch(f"no handle {i} at genus {self.g}")
        return HClass._make(tuple(1 if t == 2 * i - 1 else 0 for t in range(2 * i)))

    def labels(self):
        out = []
        for i in range(1, self.g + 1):
            out.append(f"a{i}")
            out.append(f"b{i}")
        return out


def pairing_vec(u, v):
    """Signed symplectic pairing of two coordinate vectors (zero-padded)."""
    n = max(len(u), len(v))
    if n % 2:
        raise SpaceMismatch("odd-length coordinate vector")
    s = 0
    for i in range(0, n, 2):
        ua = u[i] if i < len(u) else 0
        ub = u[i + 1] if i + 1 < len(u) else 0
        va = v[i] if i < len(v) else 0
        vb = v[i + 1] if i + 1 < len(v) else 0
        s += ua * vb - ub * va
    return s


def transvect_vec(a, n, b):
    """b + n*<a,b>*a on raw coordinate vectors (no canonicalization)."""
    c = n * pairing_vec(a, b)
    ln = max(len(a), len(b))
    return tuple(
        (b[i] if i < len(b) else 0) + c * (a[i] if i < len(a) else 0) for i in range(ln)
    )


def _canonical(coords):
    coords = list(coords)
    if len(coords) % 2:
        raise ValueError("coordinate vector must have even length")
    while len(coords) > 2 and coords[-1] == 0 and coords[-2] == 0:
        coords = coords[:-2]
    g = 0
    for x in coords:
        g = gcd(g, abs(x))
    if g == 0:
        raise ValueError("class of a non-separating curve must be nonzero")
    if g > 1:
        raise ValueError("imprimitive class is not a simple-curve shadow")
    for x in coords:
        if x > 0:
            break
        if x < 0:
            coords = [-y for y in coords]
            break
    return tuple(coords)


class HClass:
    """Primitive homology class mod sign (shadow of a non-separating curve)."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        object.__setattr__(self, "coords", _canonical(coords))

    @classmethod
    def _make(cls, canonical_coords):
        obj = object.__new__(cls)
        object.__setattr__(obj, "coords", canonical_coords)
        return obj

    @property
    def g(self):
        return len(self.coords) // 2

    def padded(self, g):
        c = self.coords
        if 2 * g < len(c):
            raise SpaceMismatch(f"class needs genus {len(c) // 2}, space has {g}")
        return c + (0,) * (2 * g - len(c))

    def __setattr__(self, *a):
        raise AttributeError("HClass is immutable")

    def __eq__(self, other):
        return isinstance(other, HClass) and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __lt__(self, other):
        return (len(self.coords), self.coords) < (len(other.coords), other.coords)

    def __repr__(self):
        terms = []
        for i, x in enumerate(self.coords):
            if not x:
                continue
            name = ("a" if i % 2 == 0 else "b") + str(i // 2 + 1)
            if x == 1:
                terms.append(f"+{name}")
            elif x == -1:
                terms.append(f"-{name}")
            else:
                terms.append(f"{x:+d}{name}")
        s = "".join(terms)
        return s[1:] if s.startswith("+") else s

    def to_json(self):
        return {"g": self.g, "coords": list(self.coords)}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["coords"])


_PAIR_CACHE = {}


def pairing(u, v):
    """Signed pairing of the canonical representatives of two classes."""
    if isinstance(u, HClass):
        u = u.coords
    if isinstance(v, HClass):
        v = v.coords
    key = (u, v)
    hit = _PAIR_CACHE.get(key)
    if hit is None:
        hit = pairing_vec(u, v)
        _PAIR_CACHE[key] = hit
        if len(_PAIR_CACHE) > 1_000_000:
            _PAIR_CACHE.clear()
    return hit


def inter(u, v):
    """Intersection shadow |<u,v>| (well defined mod sign)."""
    return abs(pairing(u, v))


def transvect(a, n, b):
    """Class of the n-th twist power of b about a."""
    return HClass(transvect_vec(a.coords, n, b.coords))


def stack_rows(classes, g=None):
    classes = list(classes)
    if g is None:
        g = max((c.g for c in classes), default=1)
    return [list(c.padded(g)) for c in classes], g


_CUT_CACHE = {}


def is_cut_shadow(classes, extra=()):
    """Shadow of the cut-system predicate.

    True iff the classes are pairwise distinct and orthogonal, orthogonal to
    every class in `extra` (curves already cut along), and the full stack has
    all Smith invariant factors 1: a primitive frame, hence extendable to a
    symplectic basis.
    """
    classes = list(classes)
    extra = list(extra)
    if not classes:
        raise ValueError("a cut system has at least one curve")
    key = (
        tuple(sorted(c.coords for c in classes)),
        tuple(sorted(c.coords for c in extra)),
    )
    hit = _CUT_CACHE.get(key)
    if hit is not None:
        return hit
    result = _cut_shadow_uncached(classes, extra)
    _CUT_CACHE[key] = result
    if len(_CUT_CACHE) > 200_000:
        _CUT_CACHE.clear()
    return result


def _cut_shadow_uncached(classes, extra):
    if len(set(classes)) != len(classes):
        return False
    for i, u in enumerate(classes):
        for v in classes[i + 1 :]:
            if pairing(u, v) != 0:
                return False
        for f in extra:
            if pairing(u, f) != 0:
                return False
        if u in extra:
            return False
    rows, _ = stack_rows(classes + extra)
    return intlin.is_primitive_stack(rows)


def _pairing_row(vec, n):
    """Row r with r . x = <vec, x> for all x of length n."""
    row = [0] * n
    for i in range(0, n, 2):
        va = vec[i] if i < len(vec) else 0
        vb = vec[i + 1] if i + 1 < len(vec) else 0
        row[i] = -vb
        row[i + 1] = va
    return row


def _form_of(gram):
    def form(u, v):
        s = 0
        for i, ui in enumerate(u):
            if ui:
                gi = gram[i]
                for j, vj in enumerate(v):
                    if vj:
                        s += ui * gi[j] * vj
        return s

    return form


def _standard_symplectic_basis(gram):
    """Basis vectors (in gram coordinates) on which the form is standard J.

    gram must be antisymmetric and unimodular; raises otherwise.
    """
    n = len(gram)
    if n == 0:
        return []
    form = _form_of(gram)
    x = [1 if i == 0 else 0 for i in range(n)]
    row = [gram[0][j] for j in range(n)]
    y = intlin.solve_integer([row], [1])
    if y is None:
        raise NotACutSystem("reduced form is not unimodular")
    rows = [
        [sum(x[i] * gram[i][j] for i in range(n)) for j in range(n)],
        [sum(y[i] * gram[i][j] for i in range(n)) for j in range(n)],
    ]
    comp = intlin.kernel_basis(rows)
    sub = [[form(u, v) for v in comp] for u in comp]
    rest = _standard_symplectic_basis(sub)
    out = [x, y]
    for vec in rest:
        out.append([sum(c * b[i] for c, b in zip(vec, comp)) for i in range(n)])
    return out


def reduce(space, isotropic):
    """Cut the space along a primitive isotropic frame.

    Returns (SympSpace of genus g - m, projection).  The projection maps a
    class orthogonal to the frame to its image in the symplectic complement,
    expressed in a standard basis; it returns None when the image is zero or
    imprimitive (the shadow of a curve that separates the cut surface).
    """
    g = space.g
    isotropic = list(isotropic)
    m = len(isotropic)
    if not is_cut_shadow(isotropic):
        raise NotACutSystem("reduce requires a cut-system shadow")
    if any(c.g > g for c in isotropic):
        raise SpaceMismatch("frame does not fit in the space")
    n = 2 * g
    cs = [list(c.padded(g)) for c in isotropic]
    # dual classes e_i with <c_i, e_j> = delta_ij and <e_k, e_j> = 0
    duals = []
    for i in range(m):
        rows = [_pairing_row(c, n) for c in cs] + [_pairing_row(e, n) for e in duals]
        rhs = [1 if j == i else 0 for j in range(m)] + [0] * len(duals)
        sol = intlin.solve_integer(rows, rhs)
        assert sol is not None, "primitive frame always has duals"
        duals.append(sol)
    rows = [_pairing_row(v, n) for v in cs + duals]
    wbasis = intlin.kernel_basis(rows)
    assert len(wbasis) == n - 2 * m
    gram = [
        [pairing_vec(u, v) for v in wbasis] for u in wbasis
    ]
    std = _standard_symplectic_basis(gram)  # vectors in W-coordinates
    # columns: express a W-vector (ambient coords) in the wbasis
    wcols = [[wbasis[j][i] for j in range(len(wbasis))] for i in range(n)]
    # change to the standard basis: solve std^T * new = old
    stdcols = [[std[j][i] for j in range(len(std))] for i in range(len(std))]
    red = SympSpace(g - m)

    def project(cls):
        v = list(cls.padded(g))
        for c in cs:
            if pairing_vec(v, c) != 0:
                raise NotACutSystem("class is not orthogonal to the frame")
        w = v[:]
        for c, e in zip(cs, duals):
            alpha = pairing_vec(v, e)
            w = [a - alpha * b for a, b in zip(w, c)]
        coords = intlin.solve_integer(wcols, w)
        assert coords is not None
        if not any(coords):
            return None
        new = intlin.solve_integer(stdcols, coords)
        assert new is not None
        if intlin.vec_gcd(new) != 1:
            return None
        return HClass(new)

    return red, project


def solve_pairings(space, constraints, orthogonal=(), forbid=()):
    """Find a primitive class x with <x, u_i> = t_i for every (u_i, t_i).

    `orthogonal` adds <x, f> = 0 constraints.  Returns None when the linear
    system has no integer solution; when every solution found is imprimitive,
    small kernel perturbations are searched for a primitive representative.
    """
    g = space.g
    rows, rhs = [], []
    for u, t in constraints:
        vec = u.padded(g) if isinstance(u, HClass) else u
        rows.append(_pairing_row(vec, 2 * g))
        rhs.append(t)
    for f in orthogonal:
        vec = f.padded(g) if isinstance(f, HClass) else f
        rows.append(_pairing_row(vec, 2 * g))
        rhs.append(0)
    if not rows:
        return space.basis_a(1)
    sol = intlin.solve_integer(rows, rhs)
    if sol is None:
        return None
    forbid = set(forbid)
    if intlin.vec_gcd(sol) == 1:
        c = HClass(sol)
        if c not in forbid:
            return c
    kb = intlin.kernel_basis(rows)
    for radius in (1, 2, 3):
        for vec in _box_walk(len(kb), radius):
            cand = sol[:]
            for coef, b in zip(vec, kb):
                if coef:
                    cand = [x + coef * y for x, y in zip(cand, b)]
            if any(cand) and intlin.vec_gcd(cand) == 1:
                c = HClass(cand)
                if c not in forbid:
                    return c
    return None


def _box_walk(dim, radius):
    for i in range(dim):
        for s in (radius, -radius):
            vec = [0] * dim
            vec[i] = s
            yield vec
    for i in range(dim):
        for j in range(i + 1, dim):
            for si in (radius, -radius):
                for sj in (radius, -radius):
                    vec = [0] * dim
                    vec[i], vec[j] = si, sj
                    yield vec


# --- F2 classes ------------------------------------------------------------


def f2_pairing(u, v, g):
    """Symplectic pairing mod 2 of two bitmask vectors."""
    s = 0
    for i in range(g):
        ua = (u >> (2 * i)) & 1
        ub = (u >> (2 * i + 1)) & 1
        va = (v >> (2 * i)) & 1
        vb = (v >> (2 * i + 1)) & 1
        s ^= (ua & vb) ^ (ub & va)
    return s


def f2_transvect(a, b, g):
    """Twist action mod 2: b + <a,b> a."""
    return b ^ (a if f2_pairing(a, b, g) else 0)


def f2_is_cut(classes, g):
    """Pairwise orthogonal, nonzero, and linearly independent over F2."""
    cl = list(classes)
    for i, u in enumerate(cl):
        if u == 0:
            return False
        for v in cl[i + 1 :]:
            if f2_pairing(u, v, g):
                return False
    basis = []
    for u in cl:
        x = u
        for b in basis:
            x = min(x, x ^ b)
        if x == 0:
            return False
        basis.append(x)
        basis.sort(reverse=True)
    return True
