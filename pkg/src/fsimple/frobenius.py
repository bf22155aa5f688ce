"""Frobenius powers, roots, preimages and Frobenius closure of ideals.

Large exponents are handled without ever forming J^[q] + I from scratch for
every q: ``FrobeniusTower`` computes normal forms of z^(p^e) modulo
K_e = J^[p^e] + I recursively, using K_{e-1}^[p] ⊆ K_e, and ``LinearFrame``
moves a linear system of parameters onto coordinate variables so that the
bracket powers become monomial.
"""

from dataclasses import dataclass, field

from . import _gb, linalg
from .errors import ExponentOverflowError, ContextMismatchError
from .polyring import Ideal, MonomialOrder, Poly, RingContext, eliminate

EXPONENT_CAP = 2**31 - 1


@dataclass(frozen=True)
class FrobeniusExponent:
    """The exponent e together with q = p^e (bounded by ``cap``)."""

    p: int
    e: int
    cap: int = EXPONENT_CAP

    def __post_init__(self):
        if self.e < 0:
            raise ValueError("Frobenius exponent must be non-negative")
        if self.p ** self.e > self.cap:
            raise ExponentOverflowError(f"q = {self.p}^{self.e} exceeds the exponent cap {self.cap}")

    @property
    def q(self):
        return self.p ** self.e

    def check_degree(self, degree):
        if degree > 0 and self.q * degree > self.cap:
            raise ExponentOverflowError(
                f"q * degree = {self.q} * {degree} exceeds the exponent cap {self.cap}"
            )


def _exponent(ctx, e):
    if isinstance(e, FrobeniusExponent):
        if e.p != ctx.p:
            raise ContextMismatchError("Frobenius exponent for a different characteristic")
        return e
    return FrobeniusExponent(ctx.p, e)


# ---------------------------------------------------------------- powers and roots


def frobenius_power(I, e):
    """I^[q]: generators raised to the q-th power."""
    fe = _exponent(I.ctx, e)
    if fe.e == 0:
        return Ideal(I.ctx, I.gens)
    fe.check_degree(max((g.degree() for g in I.gens), default=0))
    return Ideal(I.ctx, [g.frobenius(fe.q) for g in I.gens])


def root_vec(vec, q):
    """Frobenius root pieces of an engine vector: one vector per residue class."""
    buckets = {}
    for (pos, ex), c in vec.items():
        r = tuple(a % q for a in ex)
        b = buckets.setdefault(r, {})
        b[(pos, tuple(a // q for a in ex))] = c
    return [buckets[r] for r in sorted(buckets)]


def frobenius_root(I, e):
    """I^[1/q]: the smallest ideal J with I ⊆ J^[q].

    Each generator is split over the basis {x^a : 0 <= a_i < q} of R over R^q;
    coefficients in F_p are their own q-th roots.
    """
    ctx = I.ctx
    fe = _exponent(ctx, e)
    if fe.e == 0:
        return Ideal(ctx, I.gens)
    gens = []
    for g in I.gens:
        for piece in root_vec(g.as_vec(), fe.q):
            gens.append(Poly.from_vec(ctx, piece))
    return Ideal(ctx, gens)


def frobenius_preimage(K, e):
    """{z : z^q ∈ K}, by eliminating x from K + (u_i - x_i^q)."""
    ctx = K.ctx
    fe = _exponent(ctx, e)
    if fe.e == 0 or not K.gens:
        return Ideal(ctx, K.gens)
    if K.is_unit():
        return Ideal(ctx, [ctx.one()])
    n = ctx.n
    names = list(ctx.vars) + [v + "__u" for v in ctx.vars]
    ectx = RingContext(ctx.p, tuple(names), MonomialOrder("block", (n, n)))
    ident = {i: i for i in range(n)}
    gens = [g.rename(ectx, ident) for g in K.gens]
    for i in range(n):
        gens.append(ectx.var(n + i) - ectx.var(i) ** fe.q)
    E = eliminate(Ideal(ectx, gens), list(range(n)))
    back = {n + i: i for i in range(n)}
    out = []
    for g in E.gens:
        out.append(Poly(ctx, {ex[n:]: c for ex, c in g.terms.items()}))
    return Ideal(ctx, out)


# ---------------------------------------------------------------- coordinate frames


class LinearFrame:
    """Coordinates in which given linear forms s_1..s_d become variables.

    Frame variables are (u_1..u_{n-d}, s_1..s_d) where the u are original
    variables completing the s to a basis of linear forms; the order is a
    block order with the u block first.  ``identity`` frames keep the ring.
    """

    def __init__(self, ctx, forms=None):
        self.ctx = ctx
        self.forms = list(forms or [])
        n = ctx.n
        if not self.forms:
            self.fctx = ctx
            self._to = None
            self._from = None
            self.d = 0
            return
        rows = [self._linear_row(f) for f in self.forms]
        if rows is None or any(r is None for r in rows):
            raise ValueError("frame forms must be homogeneous linear")
        chosen = []
        basis = [dict(enumerate(r)) for r in rows]
        for i in range(n):
            trial = basis + [{i: 1}]
            if linalg.rank([{k: v for k, v in b.items() if v} for b in trial], ctx.p) == len(trial):
                basis.append({i: 1})
                chosen.append(i)
        if len(chosen) + len(rows) != n:
            raise ValueError("frame forms are linearly dependent")
        self.d = len(rows)
        names = [ctx.vars[i] for i in chosen]
        for j, f in enumerate(self.forms):
            var = self._as_variable(f)
            names.append(ctx.vars[var] if var is not None else f"s{j + 1}_")
        k = len(chosen)
        order = MonomialOrder("block", (k, self.d)) if k and self.d else MonomialOrder("grevlex")
        self.fctx = RingContext(ctx.p, tuple(names), order)
        # frame coordinate vector = M x
        M = [[int(i == c) for i in range(n)] for c in chosen] + rows
        Minv = linalg.inverse(M, ctx.p)
        fv = self.fctx.gens()
        self._to = [
            sum((fv[j].scale(Minv[i][j]) for j in range(n) if Minv[i][j]), self.fctx.zero())
            for i in range(n)
        ]
        xs = ctx.gens()
        self._from = [xs[c] for c in chosen] + [f for f in self.forms]

    def _linear_row(self, f):
        row = [0] * self.ctx.n
        for ex, c in f.terms.items():
            if sum(ex) != 1:
                return None
            row[ex.index(1)] = c
        return row

    def _as_variable(self, f):
        if len(f.terms) == 1:
            ex, c = next(iter(f.terms.items()))
            if c == 1 and sum(ex) == 1:
                return ex.index(1)
        return None

    @classmethod
    def for_forms(cls, ctx, forms):
        """Frame when ``forms`` are independent linear forms, else the identity frame."""
        try:
            return cls(ctx, forms)
        except ValueError:
            return cls(ctx)

    @property
    def is_identity(self):
        return self._to is None

    def to_frame(self, f):
        if self._to is None:
            return f
        return f.substitute(self._to, self.fctx)

    def from_frame(self, g):
        if self._from is None:
            return g
        return g.substitute(self._from, self.ctx)

    def param_vars(self):
        """Frame variables carrying the forms (indices into fctx)."""
        n = self.fctx.n
        return list(range(n - self.d, n))


# ---------------------------------------------------------------- tower of normal forms


class FrobeniusTower:
    """Normal forms of f^(p^e) modulo K_e = J^[p^e] + I, in a fixed ring.

    ``J`` and ``I`` are lists of polynomials in the tower's ring.
    """

    def __init__(self, ctx, J, I):
        self.ctx = ctx
        self.J = [g for g in J if not g.is_zero()]
        self.I = [g for g in I if not g.is_zero()]
        self.key = ctx.term_key()
        self._red = {}
        self._gb = {}
        self._cache = {}

    def gb(self, e):
        if e not in self._gb:
            q = self.ctx.p ** e
            gens = [g.frobenius(q) for g in self.J] + list(self.I)
            self._gb[e] = Ideal(self.ctx, gens).gb
        return self._gb[e]

    def reducer(self, e):
        if e not in self._red:
            red = _gb.Reducer()
            for g in self.gb(e):
                v, lt = _gb.make_monic(g.as_vec(), self.key, self.ctx.p)
                red.add(lt, v)
            self._red[e] = red
        return self._red[e]

    def is_unit(self, e):
        return any(g.is_constant() for g in self.gb(e))

    def nf(self, e, f):
        if f.is_zero():
            return f
        return Poly.from_vec(self.ctx, _gb.normal_form(f.as_vec(), self.reducer(e), self.key, self.ctx.p))

    def power_nf(self, e, f):
        """NF_{K_e}(f^(p^e))."""
        k = (e, f)
        hit = self._cache.get(k)
        if hit is not None:
            return hit
        if e == 0:
            out = self.nf(0, f)
        else:
            prev = self.power_nf(e - 1, f)
            out = self.nf(e, prev.frobenius(self.ctx.p))
        self._cache[k] = out
        return out

    def member(self, e, f):
        """Whether f^(p^e) ∈ K_e."""
        return self.power_nf(e, f).is_zero()

    def preimage_subspace(self, e, basis, multiplier=None):
        """Subspace of span(basis) whose elements z satisfy multiplier * z^q ∈ K_e.

        ``basis`` holds polynomials; returns a basis of the subspace as
        polynomials.  Valid because z -> z^q is F_p-linear.
        """
        cols = []
        for b in basis:
            acc = self.ctx.zero()
            for ex, c in b.terms.items():
                acc = acc + self.power_nf(e, Poly(self.ctx, {ex: 1})).scale(c)
            if multiplier is not None:
                acc = self.nf(e, multiplier * acc)
            cols.append(acc.terms)
        out = []
        for dep in linalg.kernel(cols, self.ctx.p):
            z = self.ctx.zero()
            for j, c in sorted(dep.items()):
                z = z + basis[j].scale(c)
            out.append(z)
        return _echelon_polys(out, self.ctx)


def _echelon_polys(polys, ctx):
    """Canonical basis (reduced echelon form) of the span of ``polys``."""
    key = ctx.key
    rows = [dict(f.terms) for f in polys if not f.is_zero()]
    p = ctx.p
    out = []
    while rows:
        lead = max((m for r in rows for m in r), key=key)
        piv = next(r for r in rows if lead in r)
        rows.remove(piv)
        inv = pow(piv[lead], -1, p)
        piv = {m: c * inv % p for m, c in piv.items()}
        new_rows = []
        for r in rows:
            c = r.get(lead)
            if c:
                linalg._axpy(r, piv, -c, p)
            if r:
                new_rows.append(r)
        rows = new_rows
        for o in out:
            c = o.get(lead)
            if c:
                linalg._axpy(o, piv, -c, p)
        out.append(piv)
    return [Poly(ctx, r) for r in out]


# ---------------------------------------------------------------- closure chains


@dataclass
class ClosureChain:
    """Ascending chain C_0 ⊆ C_1 ⊆ ... approximating a Frobenius closure."""

    levels: list = field(default_factory=list)  # (e, Ideal)
    stabilized_at: object = None
    capped: bool = False
    window: int = 2

    @property
    def last(self):
        return self.levels[-1][1]

    def is_ascending(self):
        return all(b.contains(a) for (_, a), (_, b) in zip(self.levels, self.levels[1:]))


@dataclass
class FrobeniusWitness:
    """Outcome of a Frobenius closure membership probe.

    ``e`` is the least witnessing exponent, or None when no level up to
    ``e_max`` contains z; ``refutations`` lists the probed exponents whose
    normal form of z^q modulo J^[q] + I was nonzero.
    """

    e: object
    e_max: int
    refutations: list = field(default_factory=list)

    @property
    def found(self):
        return self.e is not None

    def describe(self):
        if self.found:
            return f"In(e={self.e})"
        return f"NotUpTo({self.e_max})"


def _frame_for(J, I):
    """Frame on the linear forms underlying J's generators (pure powers allowed)."""
    forms = []
    for g in J.gens:
        if len(g.terms) == 1:
            ex, c = next(iter(g.terms.items()))
            support = [i for i, a in enumerate(ex) if a]
            if len(support) == 1 and c == 1:
                forms.append(J.ctx.var(support[0]))
                continue
        forms.append(g)
    return LinearFrame.for_forms(J.ctx, forms)


class ClosureSetup:
    """Shared frame, tower and finite quotient data for probing J inside R/I."""

    def __init__(self, J, I, frame=None):
        if J.ctx != I.ctx:
            raise ContextMismatchError("J and I in different contexts")
        self.ctx = J.ctx
        self.J = J
        self.I = I
        self.frame = frame or _frame_for(J, I)
        fr = self.frame
        fJ = [fr.to_frame(g) for g in J.gens]
        fI = [fr.to_frame(g) for g in I.gens]
        self.tower = FrobeniusTower(fr.fctx, fJ, fI)
        self.B = Ideal(fr.fctx, fJ + fI)
        self._std = None

    def standard_basis(self):
        """Standard monomials of J + I in the frame, or None if R/(J+I) is infinite."""
        if self._std is None:
            try:
                mons = self.B.standard_monomials()
            except ValueError:
                self._std = False
                return None
            self._std = [Poly(self.frame.fctx, {m: 1}) for m in mons]
        return self._std or None

    def back(self, f):
        return self.frame.from_frame(f)


def frobenius_membership(z, J, I, e_max=6, setup=None):
    """Smallest e <= e_max with z^q ∈ J^[q] + I."""
    setup = setup or ClosureSetup(J, I)
    fz = setup.frame.to_frame(z)
    refutations = []
    for e in range(e_max + 1):
        FrobeniusExponent(z.ctx.p, e)
        if setup.tower.member(e, fz):
            return FrobeniusWitness(e, e_max, refutations)
        refutations.append(e)
    return FrobeniusWitness(None, e_max, refutations)


def frobenius_closure(J, I, e_max=6, window=2, setup=None):
    """Chain C_e = {z : z^q ∈ J^[q] + I}, e = 0..e_max, with stabilization window."""
    ctx = J.ctx
    setup = setup or ClosureSetup(J, I)
    std = setup.standard_basis()
    chain = ClosureChain(window=window)
    same = 0
    prev_sig = None
    for e in range(e_max + 1):
        FrobeniusExponent(ctx.p, e)
        if std is not None:
            extra = setup.tower.preimage_subspace(e, std)
            gens = list(J.gens) + list(I.gens) + [setup.back(z) for z in extra]
            level = Ideal(ctx, gens)
        else:
            level = frobenius_preimage(frobenius_power(J, e) + I, e)
        sig = level.gb
        chain.levels.append((e, level))
        if prev_sig is not None and sig == prev_sig:
            same += 1
        else:
            same = 0
        prev_sig = sig
        if same >= window - 1 and e >= 1:
            chain.stabilized_at = e - same
            return chain
    chain.capped = True
    return chain
