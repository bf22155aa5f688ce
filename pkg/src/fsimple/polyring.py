"""Exact multivariate polynomials over F_p and Groebner-basis ideal operations."""

from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from itertools import combinations

from . import _gb
from .errors import (
    ContextMismatchError,
    NotGradedError,
    UnitIdealError,
    ZeroDivisorError,
)

MAX_PRIME = 2**31


def is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


# ---------------------------------------------------------------- orders


def _grevlex_key(e):
    return (sum(e),) + tuple(-x for x in reversed(e))


def _lex_key(e):
    return tuple(e)


@dataclass(frozen=True)
class MonomialOrder:
    """``grevlex``, ``lex`` or ``block`` (grevlex inside each block).

    For block orders ``blocks`` lists the block sizes; earlier blocks dominate.
    """

    name: str = "grevlex"
    blocks: tuple = ()

    def __post_init__(self):
        if self.name not in ("grevlex", "lex", "block"):
            raise ValueError(f"unknown monomial order {self.name!r}")
        if self.name == "block" and not self.blocks:
            raise ValueError("block order needs block sizes")

    def keyfunc(self, nvars):
        return _keyfunc(self, nvars)

    def __str__(self):
        if self.name == "block":
            return "block(" + ",".join(map(str, self.blocks)) + ")"
        return self.name


@lru_cache(maxsize=None)
def _keyfunc(order, nvars):
    if order.name == "grevlex":
        return _grevlex_key
    if order.name == "lex":
        return _lex_key
    if sum(order.blocks) != nvars:
        raise ValueError("block sizes must add up to the number of variables")
    cuts = []
    start = 0
    for b in order.blocks:
        cuts.append((start, start + b))
        start += b

    def key(e):
        out = ()
        for a, b in cuts:
            part = e[a:b]
            out += (sum(part),) + tuple(-x for x in reversed(part))
        return out

    return key


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


# ---------------------------------------------------------------- context


@dataclass(frozen=True)
class RingContext:
    """The polynomial ring F_p[vars] with a fixed monomial order."""

    p: int
    vars: tuple
    order: MonomialOrder = GREVLEX

    def __post_init__(self):
        if not isinstance(self.p, int) or not (2 <= self.p < MAX_PRIME) or not is_prime(self.p):
            raise ValueError(f"{self.p} is not a prime in [2, 2^31)")
        object.__setattr__(self, "vars", tuple(self.vars))
        if len(self.vars) < 1:
            raise ValueError("a ring needs at least one variable")
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("variable names must be unique")
        if isinstance(self.order, str):
            object.__setattr__(self, "order", MonomialOrder(self.order))
        self.order.keyfunc(len(self.vars))

    @property
    def n(self):
        return len(self.vars)

    @property
    def key(self):
        return self.order.keyfunc(self.n)

    def term_key(self):
        k = self.key
        return lambda t: k(t[1])

    def module_key(self):
        k = self.key
        return lambda t: (-t[0],) + k(t[1])

    def zero(self):
        return Poly(self, {})

    def one(self):
        return Poly(self, {(0,) * self.n: 1})

    def constant(self, c):
        c %= self.p
        return Poly(self, {(0,) * self.n: c} if c else {})

    def var(self, name):
        if isinstance(name, int):
            i = name
        else:
            i = self.vars.index(name) if name in self.vars else None
            if i is None:
                raise KeyError(name)
        e = [0] * self.n
        e[i] = 1
        return Poly(self, {tuple(e): 1})

    def gens(self):
        return [self.var(i) for i in range(self.n)]

    def monomial(self, exps, c=1):
        return Poly(self, {tuple(exps): c % self.p} if c % self.p else {})

    def poly(self, text):
        from .parsing import parse_poly

        return parse_poly(self, text)

    def polys(self, text):
        from .parsing import parse_poly_list

        return parse_poly_list(self, text)

    def ideal(self, *gens):
        out = []
        for g in gens:
            if isinstance(g, str):
                out.extend(self.polys(g))
            elif isinstance(g, int):
                out.append(self.constant(g))
            else:
                out.append(g)
        return Ideal(self, out)

    def with_order(self, order):
        return RingContext(self.p, self.vars, order)

    def describe(self):
        return {"p": self.p, "vars": list(self.vars), "order": str(self.order)}


def _check_ctx(*objs):
    ctx = None
    for o in objs:
        c = o.ctx
        if ctx is None:
            ctx = c
        elif c != ctx:
            raise ContextMismatchError("objects live in different ring contexts")
    return ctx


# ---------------------------------------------------------------- polynomials


class Poly:
    """Polynomial over F_p: a dict from exponent tuples to nonzero coefficients.

    Treated as immutable once built.
    """

    __slots__ = ("ctx", "terms", "_lt", "_hash")

    def __init__(self, ctx, terms):
        self.ctx = ctx
        self.terms = terms
        self._lt = None
        self._hash = None

    @classmethod
    def from_terms(cls, ctx, items):
        p = ctx.p
        acc = {}
        for e, c in items:
            c = (acc.get(e, 0) + c) % p
            if c:
                acc[e] = c
            else:
                acc.pop(e, None)
        return cls(ctx, acc)

    # -- basic predicates
    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_coeff(self):
        return self.terms.get((0,) * self.ctx.n, 0)

    def __len__(self):
        return len(self.terms)

    # -- ordering
    def lead(self):
        """(exponents, coefficient) of the leading term."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        if self._lt is None:
            e = max(self.terms, key=self.ctx.key)
            self._lt = (e, self.terms[e])
        return self._lt

    def lead_monomial(self):
        return self.lead()[0]

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: self.ctx.key(t[0]), reverse=True)

    def degree(self, weights=None):
        if not self.terms:
            return -1
        if weights is None:
            return max(sum(e) for e in self.terms)
        return max(sum(w * a for w, a in zip(weights, e)) for e in self.terms)

    def degree_in(self, i):
        return max((e[i] for e in self.terms), default=-1)

    def is_homogeneous(self, weights=None):
        if not self.terms:
            return True
        w = weights or (1,) * self.ctx.n
        degs = {sum(a * b for a, b in zip(w, e)) for e in self.terms}
        return len(degs) == 1

    def variables(self):
        return {i for e in self.terms for i, a in enumerate(e) if a}

    # -- arithmetic
    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.ctx != self.ctx:
                raise ContextMismatchError("polynomials from different contexts")
            return other
        if isinstance(other, int):
            return self.ctx.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.ctx.p
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = (out.get(e, 0) + c) % p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Poly(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        p = self.ctx.p
        return Poly(self.ctx, {e: p - c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        p = self.ctx.p
        c %= p
        if not c:
            return self.ctx.zero()
        return Poly(self.ctx, {e: v * c % p for e, v in self.terms.items()})

    def mul_term(self, exps, c=1):
        p = self.ctx.p
        c %= p
        if not c:
            return self.ctx.zero()
        return Poly(self.ctx, {tuple(a + b for a, b in zip(e, exps)): v * c % p for e, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(other.terms) > len(self.terms):
            a, b = other, self
        else:
            a, b = self, other
        p = self.ctx.p
        out = {}
        for e2, c2 in b.terms.items():
            for e1, c1 in a.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = (out.get(e, 0) + c1 * c2) % p
        return Poly(self.ctx, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = self.ctx.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def frobenius(self, q):
        """Return self^q; over F_p this only rescales exponents."""
        return Poly(self.ctx, {tuple(q * a for a in e): c for e, c in self.terms.items()})

    def monic(self):
        if not self.terms:
            return self
        return self.scale(pow(self.lead()[1], -1, self.ctx.p))

    def derivative(self, i):
        p = self.ctx.p
        out = {}
        for e, c in self.terms.items():
            a = e[i]
            if a % p == 0:
                continue
            ne = e[:i] + (a - 1,) + e[i + 1 :]
            out[ne] = c * a % p
        return Poly(self.ctx, out)

    def substitute(self, images, target=None):
        """Replace variable i by ``images[i]`` (polynomials in ``target``)."""
        target = target or (images[0].ctx if images else self.ctx)
        cache = {}

        def power(i, a):
            k = (i, a)
            if k not in cache:
                cache[k] = images[i] ** a
            return cache[k]

        out = target.zero()
        for e, c in self.terms.items():
            t = target.constant(c)
            for i, a in enumerate(e):
                if a:
                    t = t * power(i, a)
            out = out + t
        return out

    def rename(self, target, perm):
        """Move exponents into ``target`` via an index map (perm[i] = new index of var i)."""
        n = target.n
        out = {}
        for e, c in self.terms.items():
            ne = [0] * n
            for i, a in enumerate(e):
                if a:
                    ne[perm[i]] = a
            out[tuple(ne)] = c
        return Poly(target, out)

    def divide_exact(self, f):
        """Return q with q*f == self; raise ValueError if f does not divide self."""
        if f.is_zero():
            raise ZeroDivisorError("division by zero polynomial")
        fe, fc = f.lead()
        inv = pow(fc, -1, self.ctx.p)
        r = self
        q = {}
        key = self.ctx.key
        while r.terms:
            re_, rc = r.lead()
            d = tuple(a - b for a, b in zip(re_, fe))
            if any(x < 0 for x in d):
                raise ValueError("not an exact division")
            c = rc * inv % self.ctx.p
            q[d] = c
            r = r - f.mul_term(d, c)
        return Poly(self.ctx, q)

    # -- comparison / hashing
    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ctx.constant(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # -- printing
    def to_str(self):
        if not self.terms:
            return "0"
        p = self.ctx.p
        names = self.ctx.vars
        parts = []
        for e, c in self.sorted_terms():
            sc = c if c <= p // 2 else c - p
            mono = "*".join(
                (names[i] if a == 1 else f"{names[i]}^{a}") for i, a in enumerate(e) if a
            )
            sign = "-" if sc < 0 else "+"
            ac = abs(sc)
            if not mono:
                body = str(ac)
            elif ac == 1:
                body = mono
            else:
                body = f"{ac}*{mono}"
            parts.append((sign, body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    __str__ = to_str

    def __repr__(self):
        return f"Poly({self.to_str()!r})"

    # -- engine bridge
    def as_vec(self, pos=0):
        return {(pos, e): c for e, c in self.terms.items()}

    @classmethod
    def from_vec(cls, ctx, vec):
        return cls(ctx, {e: c for (_, e), c in vec.items()})


# ---------------------------------------------------------------- ideals


class Ideal:
    """Ideal given by generators, with a lazily computed reduced Groebner basis."""

    __slots__ = ("ctx", "gens", "_gb")

    def __init__(self, ctx, gens=(), gb=None):
        self.ctx = ctx
        gens = tuple(g for g in gens)
        for g in gens:
            if g.ctx != ctx:
                raise ContextMismatchError("generator from a different context")
        self.gens = tuple(g for g in gens if not g.is_zero())
        self._gb = tuple(gb) if gb is not None else None

    @property
    def gb(self):
        if self._gb is None:
            self._gb = _groebner_polys(self.ctx, self.gens)
        return self._gb

    def is_unit(self):
        return any(g.is_constant() and not g.is_zero() for g in self.gb)

    def is_zero(self):
        return not self.gens

    def reduce(self, f):
        return reduce(f, self.gb, self.ctx) if self.gb else f

    def contains(self, f):
        if isinstance(f, Ideal):
            return all(self.contains(g) for g in f.gens)
        if f.ctx != self.ctx:
            raise ContextMismatchError("element from a different context")
        if f.is_zero():
            return True
        if not self.gens:
            return False
        return self.reduce(f).is_zero()

    __contains__ = contains

    def __add__(self, other):
        if isinstance(other, Poly):
            other = Ideal(self.ctx, [other])
        _check_ctx(self, other)
        return Ideal(self.ctx, self.gens + other.gens)

    def __mul__(self, other):
        if isinstance(other, Poly):
            return Ideal(self.ctx, [g * other for g in self.gens])
        _check_ctx(self, other)
        return Ideal(self.ctx, [a * b for a in self.gens for b in other.gens])

    def __pow__(self, k):
        out = Ideal(self.ctx, [self.ctx.one()])
        for _ in range(k):
            out = Ideal(self.ctx, minimal_generators(out * self))
        return out

    def __eq__(self, other):
        if not isinstance(other, Ideal):
            return NotImplemented
        return self.ctx == other.ctx and self.gb == other.gb

    def __hash__(self):
        return hash(self.gb)

    def __le__(self, other):
        return other.contains(self)

    def standard_monomials(self, limit=100000):
        """Monomials outside the lead-term ideal; the ideal must be zero-dimensional."""
        leads = [g.lead_monomial() for g in self.gb]
        n = self.ctx.n
        if not self.gens:
            raise ValueError("zero ideal has infinitely many standard monomials")
        for i in range(n):
            if not any(m[i] > 0 and sum(m) == m[i] for m in leads):
                raise ValueError("ideal is not zero-dimensional")
        out = []
        stack = [(0,) * n]
        seen = {stack[0]}
        while stack:
            m = stack.pop()
            if any(all(a <= b for a, b in zip(lm, m)) for lm in leads):
                continue
            out.append(m)
            if len(out) > limit:
                raise ValueError("too many standard monomials")
            for i in range(n):
                nm = m[:i] + (m[i] + 1,) + m[i + 1 :]
                if nm not in seen:
                    seen.add(nm)
                    stack.append(nm)
        out.sort(key=self.ctx.key)
        return out

    def __repr__(self):
        return "Ideal(" + ", ".join(g.to_str() for g in self.gens) + ")"

    def to_strs(self, use_gb=False):
        return [g.to_str() for g in (self.gb if use_gb else self.gens)]


# ---------------------------------------------------------------- operations


def _groebner_polys(ctx, polys):
    vecs = [f.as_vec() for f in polys if not f.is_zero()]
    if not vecs:
        return ()
    out = _gb.groebner(vecs, ctx.term_key(), ctx.p, product_criterion=True)
    return tuple(Poly.from_vec(ctx, v) for _, v in out)


def reduce(f, G, ctx=None):
    """Normal form of ``f`` modulo the polynomials ``G``."""
    ctx = ctx or f.ctx
    if f.ctx != ctx or any(g.ctx != ctx for g in G):
        raise ContextMismatchError("mixed contexts in reduce")
    if f.is_zero():
        return f
    key = ctx.term_key()
    red = _gb.Reducer()
    for g in G:
        if g.is_zero():
            continue
        v, lt = _gb.make_monic(g.as_vec(), key, ctx.p)
        red.add(lt, v)
    return Poly.from_vec(ctx, _gb.normal_form(f.as_vec(), red, key, ctx.p))


def groebner(I, ctx=None):
    """Return ``I`` with its reduced Groebner basis filled in."""
    if ctx is not None and ctx != I.ctx:
        raise ContextMismatchError("ideal is not in the given context")
    I.gb
    return I


def ideal_membership(f, I):
    return I.contains(f)


def minimal_generators(I_or_gens):
    """Drop generators lying in the ideal of the others (greedy, by degree)."""
    gens = list(I_or_gens.gens if isinstance(I_or_gens, Ideal) else I_or_gens)
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        return []
    ctx = gens[0].ctx
    gens.sort(key=lambda g: (g.degree(), ctx.key(g.lead_monomial())))
    kept = []
    for g in gens:
        if kept and Ideal(ctx, kept).contains(g):
            continue
        kept.append(g)
    return kept


def _extend_ctx(ctx, new_names, front=True):
    names = list(new_names)
    base = list(ctx.vars)
    while any(nm in base for nm in names):
        names = [nm + "_" for nm in names]
    if front:
        allv = names + base
        order = MonomialOrder("block", (len(names), len(base)))
    else:
        allv = base + names
        order = MonomialOrder("block", (len(base), len(names)))
    return RingContext(ctx.p, tuple(allv), order)


def eliminate(I, vars_to_elim):
    """Generators of I intersected with the subring on the remaining variables."""
    ctx = I.ctx
    idx = []
    for v in vars_to_elim:
        i = v if isinstance(v, int) else ctx.vars.index(v)
        idx.append(i)
    if not idx:
        return Ideal(ctx, I.gb)
    rest = [i for i in range(ctx.n) if i not in idx]
    new_vars = [ctx.vars[i] for i in idx] + [ctx.vars[i] for i in rest]
    blocks = (len(idx), len(rest)) if rest else (len(idx),)
    ectx = RingContext(ctx.p, tuple(new_vars), MonomialOrder("block", blocks))
    perm = {old: new for new, old in enumerate(idx + rest)}
    moved = [g.rename(ectx, perm) for g in I.gens]
    G = _groebner_polys(ectx, moved)
    k = len(idx)
    back = {new: old for old, new in perm.items()}
    keep = [g.rename(ctx, back) for g in G if all(not any(e[:k]) for e in g.terms)]
    return Ideal(ctx, keep)


def intersect(I, J):
    ctx = _check_ctx(I, J)
    if not I.gens or not J.gens:
        return Ideal(ctx, [])
    ectx = _extend_ctx(ctx, ["t"], front=True)
    perm = {i: i + 1 for i in range(ctx.n)}
    t = ectx.var(0)
    gens = [t * g.rename(ectx, perm) for g in I.gens]
    gens += [(ectx.one() - t) * g.rename(ectx, perm) for g in J.gens]
    G = _groebner_polys(ectx, gens)
    back = {i + 1: i for i in range(ctx.n)}
    keep = [g for g in G if all(e[0] == 0 for e in g.terms)]
    return Ideal(ctx, [Poly(ctx, {e[1:]: c for e, c in g.terms.items()}) for g in keep])


def colon(I, f):
    """(I : f) for a polynomial f, or (I : J) for an ideal J."""
    if isinstance(f, Ideal):
        _check_ctx(I, f)
        if not f.gens:
            raise ZeroDivisorError("colon by the zero ideal")
        out = None
        for g in f.gens:
            c = colon(I, g)
            out = c if out is None else intersect(out, c)
        return out
    _check_ctx(I, f)
    if f.is_zero():
        raise ZeroDivisorError("colon by zero")
    if not I.gens:
        return Ideal(I.ctx, [])
    K = intersect(I, Ideal(I.ctx, [f]))
    return Ideal(I.ctx, [g.divide_exact(f) for g in K.gb])


def saturate(I, f, max_steps=50):
    cur = I
    for _ in range(max_steps):
        nxt = colon(cur, f)
        if nxt == cur:
            return cur
        cur = nxt
    return cur


def radical_membership(f, I):
    """Rabinowitsch test: f in sqrt(I) iff 1 in I + (1 - s f)."""
    ctx = I.ctx
    ectx = _extend_ctx(ctx, ["s"], front=False)
    perm = {i: i for i in range(ctx.n)}
    s = ectx.var(ctx.n)
    gens = [g.rename(ectx, perm) for g in I.gens]
    gens.append(ectx.one() - s * f.rename(ectx, perm))
    return Ideal(ectx, gens).is_unit()


def _independent_dim(leads, n):
    supports = [frozenset(i for i, a in enumerate(m) if a) for m in leads]
    for k in range(n, -1, -1):
        for S in combinations(range(n), k):
            Sset = frozenset(S)
            if not any(sup <= Sset for sup in supports):
                return k
    return -1


def krull_dimension(I):
    """dim R/I from maximal independent sets of the lead-term ideal."""
    if I.is_unit():
        raise UnitIdealError("the unit ideal has no Krull dimension")
    if not I.gens:
        return I.ctx.n
    return _independent_dim([g.lead_monomial() for g in I.gb], I.ctx.n)


def codimension(I):
    return I.ctx.n - krull_dimension(I)


def grading_weights(polys, ctx=None):
    """Positive integer weights making every polynomial homogeneous, or None.

    Tries the standard grading first and then solves a small linear program.
    """
    polys = [f for f in polys if not f.is_zero()]
    if not polys:
        n = ctx.n if ctx is not None else 1
        return (1,) * n
    ctx = polys[0].ctx
    n = ctx.n
    if all(f.is_homogeneous() for f in polys):
        return (1,) * n
    rows = []
    for f in polys:
        es = list(f.terms)
        for e in es[1:]:
            rows.append([a - b for a, b in zip(e, es[0])])
    if not rows:
        return (1,) * n
    from scipy.optimize import linprog

    res = linprog(
        c=[1] * n,
        A_eq=rows,
        b_eq=[0] * len(rows),
        bounds=[(1, None)] * n,
        method="highs",
    )
    if res.status != 0:
        return None
    fr = [Fraction(x).limit_denominator(10000) for x in res.x]
    den = 1
    for x in fr:
        den = den * x.denominator // _gcd(den, x.denominator)
    w = [int(x * den) for x in fr]
    g = 0
    for x in w:
        g = _gcd(g, x)
    w = tuple(x // g for x in w)
    if any(x <= 0 for x in w) or not all(f.is_homogeneous(w) for f in polys):
        return None
    return w


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def is_graded(I):
    return grading_weights(I.gens, I.ctx) is not None


def require_graded(I):
    w = grading_weights(I.gens, I.ctx)
    if w is None:
        raise NotGradedError("input is not homogeneous for any positive weight vector")
    return w


def lift_to_generators(f, gens):
    """Coefficients h with sum h_i * gens_i == f, or None if f is not in the ideal."""
    from .modgb import NO_LIFT, ModuleMatrix, lift

    ctx = f.ctx
    if f.is_zero():
        return [ctx.zero() for _ in gens]
    if not gens:
        return None
    A = ModuleMatrix(ctx, [[g for g in gens]])
    B = ModuleMatrix(ctx, [[f]])
    X = lift(B, A)
    if X is NO_LIFT:
        return None
    return [X.entries[i][0] for i in range(len(gens))]
