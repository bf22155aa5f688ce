"""Buchberger engine over sparse vectors of a free module F_p[x]^r.

A vector is a dict mapping a term ``(position, exponents)`` to a coefficient
in ``1..p-1``.  Ideals are handled as the rank-one case (position 0).  The
caller supplies ``key``, a function from a term to a tuple of ints whose
lexicographic comparison is the monomial (or module) order.
"""

import heapq


def _neg(k):
    return tuple(-x for x in k)


def _divides(a, b):
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def lead(vec, key):
    return max(vec, key=key)


def make_monic(vec, key, p):
    lt = max(vec, key=key)
    c = vec[lt]
    if c == 1:
        return dict(vec), lt
    inv = pow(c, -1, p)
    return {t: v * inv % p for t, v in vec.items()}, lt


def add_scaled(acc, vec, c, p):
    """acc += c * vec in place (c an int)."""
    for t, v in vec.items():
        nv = (acc.get(t, 0) + c * v) % p
        if nv:
            acc[t] = nv
        else:
            acc.pop(t, None)
    return acc


def shift_vec(vec, shift, c, p):
    """Return c * x^shift * vec."""
    out = {}
    for (pos, e), v in vec.items():
        out[(pos, tuple(a + s for a, s in zip(e, shift)))] = v * c % p
    return out


class Reducer:
    """Indexed set of monic basis vectors used as reducers."""

    __slots__ = ("by_pos", "items")

    def __init__(self, items=()):
        self.by_pos = {}
        self.items = []
        for lt, vec in items:
            self.add(lt, vec)

    def add(self, lt, vec):
        self.items.append((lt, vec))
        self.by_pos.setdefault(lt[0], []).append((lt[1], lt, vec))

    def find(self, term):
        pos, m = term
        for lm, lt, vec in self.by_pos.get(pos, ()):
            if _divides(lm, m):
                return lm, lt, vec
        return None


def normal_form(vec, reducer, key, p, full=True, stop=None):
    """Reduce ``vec`` by ``reducer``.

    With ``full`` every term is reduced; otherwise reduction stops at the first
    irreducible leading term.  ``stop(term)`` returning true halts reduction at
    that term, leaving it and all smaller terms untouched.
    """
    if not isinstance(reducer, Reducer):
        reducer = Reducer(reducer)
    work = dict(vec)
    heap = [(_neg(key(t)), t) for t in work]
    heapq.heapify(heap)
    rem = {}
    while heap:
        _, t = heapq.heappop(heap)
        c = work.get(t)
        if c is None:
            continue
        if stop is not None and stop(t):
            rem.update(work)
            return rem
        hit = reducer.find(t)
        if hit is None:
            del work[t]
            rem[t] = c
            if not full:
                rem.update(work)
                return rem
            continue
        lm, lt, g = hit
        del work[t]
        m = t[1]
        shift = tuple(b - a for a, b in zip(lm, m))
        for gt, gc in g.items():
            if gt == lt:
                continue
            nt = (gt[0], tuple(a + s for a, s in zip(gt[1], shift)))
            old = work.get(nt)
            nc = ((old or 0) - c * gc) % p
            if nc:
                if old is None:
                    heapq.heappush(heap, (_neg(key(nt)), nt))
                work[nt] = nc
            elif old is not None:
                del work[nt]
    return rem


def _spoly(li, gi, lj, gj, lcm, p):
    si = tuple(a - b for a, b in zip(lcm, li[1]))
    sj = tuple(a - b for a, b in zip(lcm, lj[1]))
    out = shift_vec(gi, si, 1, p)
    for (pos, e), v in gj.items():
        t = (pos, tuple(a + s for a, s in zip(e, sj)))
        nv = (out.get(t, 0) - v) % p
        if nv:
            out[t] = nv
        else:
            out.pop(t, None)
    return out


def groebner(vecs, key, p, product_criterion=True):
    """Reduced Groebner basis of the submodule generated by ``vecs``.

    Normal selection strategy (smallest lcm first) with the product and chain
    criteria.  The product criterion is only sound for rank one and callers
    must switch it off for modules.  Output is sorted by increasing lead term.
    """
    basis = []
    red = Reducer()
    pairs = []
    pending = set()
    counter = 0

    def insert(v):
        nonlocal counter
        v = normal_form(v, red, key, p, full=False)
        if not v:
            return
        v, lt = make_monic(v, key, p)
        idx = len(basis)
        for j, (lj, _) in enumerate(basis):
            if lj[0] != lt[0]:
                continue
            lcm = tuple(max(a, b) for a, b in zip(lj[1], lt[1]))
            if product_criterion and all(a == 0 or b == 0 for a, b in zip(lj[1], lt[1])):
                continue
            counter += 1
            heapq.heappush(pairs, (key((lt[0], lcm)), counter, j, idx))
            pending.add((j, idx))
        basis.append((lt, v))
        red.add(lt, v)

    for v in vecs:
        if v:
            insert(dict(v))

    while pairs:
        _, _, i, j = heapq.heappop(pairs)
        pending.discard((i, j))
        li, gi = basis[i]
        lj, gj = basis[j]
        pos = li[0]
        lcm = tuple(max(a, b) for a, b in zip(li[1], lj[1]))
        skip = False
        for k, (lk, _) in enumerate(basis):
            if k == i or k == j or lk[0] != pos or not _divides(lk[1], lcm):
                continue
            if (min(i, k), max(i, k)) in pending or (min(j, k), max(j, k)) in pending:
                continue
            skip = True
            break
        if skip:
            continue
        insert(_spoly(li, gi, lj, gj, lcm, p))

    return reduce_basis(basis, key, p)


def reduce_basis(basis, key, p):
    """Minimalise and interreduce a Groebner basis given as (lead, vec) pairs."""
    keep = []
    for idx, (lt, v) in enumerate(basis):
        redundant = False
        for jdx, (lo, _) in enumerate(basis):
            if jdx == idx or lo[0] != lt[0] or not _divides(lo[1], lt[1]):
                continue
            if lo[1] != lt[1] or jdx < idx:
                redundant = True
                break
        if not redundant:
            keep.append((lt, v))
    out = []
    for idx, (lt, v) in enumerate(keep):
        others = Reducer(x for jdx, x in enumerate(keep) if jdx != idx)
        r = normal_form(v, others, key, p)
        r, nlt = make_monic(r, key, p)
        out.append((nlt, r))
    out.sort(key=lambda item: key(item[0]))
    return out
