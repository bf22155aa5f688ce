"""Submodules of free modules: Groebner bases, syzygies, lifts, resolutions, Ext.

Matrices act on column vectors; the columns of a presentation matrix are the
relations.  The module order is position-over-term with the ring's monomial
order inside each position, lower positions dominating.
"""

from . import _gb
from .errors import ContextMismatchError, RankMismatchError, TruncatedResolutionError, NotGradedError
from .polyring import Ideal, Poly, codimension, grading_weights, minimal_generators


class FreeModuleElement:
    """Fixed-rank vector of polynomials."""

    __slots__ = ("ctx", "components")

    def __init__(self, ctx, components):
        self.ctx = ctx
        self.components = tuple(components)
        for c in self.components:
            if c.ctx != ctx:
                raise ContextMismatchError("component from a different context")

    @property
    def rank(self):
        return len(self.components)

    @classmethod
    def from_vec(cls, ctx, vec, rank):
        comps = [dict() for _ in range(rank)]
        for (pos, e), c in vec.items():
            comps[pos][e] = c
        return cls(ctx, [Poly(ctx, d) for d in comps])

    def to_vec(self):
        out = {}
        for i, c in enumerate(self.components):
            for e, v in c.terms.items():
                out[(i, e)] = v
        return out

    def is_zero(self):
        return all(c.is_zero() for c in self.components)

    def __add__(self, other):
        self._check(other)
        return FreeModuleElement(self.ctx, [a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other):
        self._check(other)
        return FreeModuleElement(self.ctx, [a - b for a, b in zip(self.components, other.components)])

    def scale(self, f):
        return FreeModuleElement(self.ctx, [f * a for a in self.components])

    def _check(self, other):
        if other.rank != self.rank:
            raise RankMismatchError("rank mismatch")

    def __eq__(self, other):
        return isinstance(other, FreeModuleElement) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        return "(" + ", ".join(c.to_str() for c in self.components) + ")"


class ModuleMatrix:
    """``nrows x ncols`` matrix of polynomials; columns are images of basis vectors."""

    __slots__ = ("ctx", "nrows", "ncols", "entries")

    def __init__(self, ctx, entries, nrows=None, ncols=None):
        self.ctx = ctx
        self.entries = [list(r) for r in entries]
        self.nrows = len(self.entries) if nrows is None else nrows
        if ncols is None:
            ncols = len(self.entries[0]) if self.entries else 0
        self.ncols = ncols
        if len(self.entries) != self.nrows or any(len(r) != self.ncols for r in self.entries):
            raise RankMismatchError("ragged matrix")
        for r in self.entries:
            for x in r:
                if x.ctx != ctx:
                    raise ContextMismatchError("matrix entry from a different context")

    # -- constructors
    @classmethod
    def zero(cls, ctx, nrows, ncols):
        return cls(ctx, [[ctx.zero() for _ in range(ncols)] for _ in range(nrows)], nrows, ncols)

    @classmethod
    def identity(cls, ctx, n):
        m = cls.zero(ctx, n, n)
        for i in range(n):
            m.entries[i][i] = ctx.one()
        return m

    @classmethod
    def from_columns(cls, ctx, nrows, cols):
        """Build from column vectors given as engine dicts or FreeModuleElements."""
        m = cls.zero(ctx, nrows, len(cols))
        for j, col in enumerate(cols):
            if isinstance(col, FreeModuleElement):
                for i, c in enumerate(col.components):
                    m.entries[i][j] = c
                continue
            per = {}
            for (pos, e), c in col.items():
                per.setdefault(pos, {})[e] = c
            for pos, d in per.items():
                m.entries[pos][j] = Poly(ctx, d)
        return m

    @classmethod
    def row(cls, ctx, polys):
        return cls(ctx, [list(polys)], 1, len(polys))

    # -- access
    def column(self, j):
        return FreeModuleElement(self.ctx, [self.entries[i][j] for i in range(self.nrows)])

    def column_vec(self, j, offset=0):
        out = {}
        for i in range(self.nrows):
            for e, c in self.entries[i][j].terms.items():
                out[(i + offset, e)] = c
        return out

    def columns(self):
        return [self.column(j) for j in range(self.ncols)]

    def is_zero(self):
        return all(x.is_zero() for r in self.entries for x in r)

    # -- algebra
    def __mul__(self, other):
        if isinstance(other, Poly):
            return ModuleMatrix(self.ctx, [[x * other for x in r] for r in self.entries], self.nrows, self.ncols)
        if self.ncols != other.nrows:
            raise RankMismatchError(f"cannot compose {self.nrows}x{self.ncols} with {other.nrows}x{other.ncols}")
        if self.ctx != other.ctx:
            raise ContextMismatchError("matrices from different contexts")
        ctx = self.ctx
        out = []
        for i in range(self.nrows):
            row = []
            for j in range(other.ncols):
                acc = ctx.zero()
                for k in range(self.ncols):
                    a = self.entries[i][k]
                    if a.is_zero():
                        continue
                    b = other.entries[k][j]
                    if b.is_zero():
                        continue
                    acc = acc + a * b
                row.append(acc)
            out.append(row)
        return ModuleMatrix(ctx, out, self.nrows, other.ncols)

    def __add__(self, other):
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise RankMismatchError("shape mismatch")
        return ModuleMatrix(
            self.ctx,
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)],
            self.nrows,
            self.ncols,
        )

    def __neg__(self):
        return ModuleMatrix(self.ctx, [[-a for a in r] for r in self.entries], self.nrows, self.ncols)

    def __sub__(self, other):
        return self + (-other)

    def transpose(self):
        return ModuleMatrix(
            self.ctx,
            [[self.entries[i][j] for i in range(self.nrows)] for j in range(self.ncols)],
            self.ncols,
            self.nrows,
        )

    T = property(transpose)

    def hstack(self, other):
        if self.nrows != other.nrows:
            raise RankMismatchError("row count mismatch")
        return ModuleMatrix(
            self.ctx, [r + s for r, s in zip(self.entries, other.entries)], self.nrows, self.ncols + other.ncols
        )

    def vstack(self, other):
        if self.ncols != other.ncols:
            raise RankMismatchError("column count mismatch")
        return ModuleMatrix(self.ctx, self.entries + other.entries, self.nrows + other.nrows, self.ncols)

    def select_columns(self, idx):
        return ModuleMatrix(self.ctx, [[r[j] for j in idx] for r in self.entries], self.nrows, len(idx))

    def select_rows(self, idx):
        return ModuleMatrix(self.ctx, [list(self.entries[i]) for i in idx], len(idx), self.ncols)

    def frobenius(self, q):
        return ModuleMatrix(self.ctx, [[x.frobenius(q) for x in r] for r in self.entries], self.nrows, self.ncols)

    def map_entries(self, fn, ctx=None):
        return ModuleMatrix(ctx or self.ctx, [[fn(x) for x in r] for r in self.entries], self.nrows, self.ncols)

    def __eq__(self, other):
        return (
            isinstance(other, ModuleMatrix)
            and (self.nrows, self.ncols) == (other.nrows, other.ncols)
            and self.entries == other.entries
        )

    def to_strs(self):
        return [[x.to_str() for x in r] for r in self.entries]

    def __repr__(self):
        return f"ModuleMatrix({self.to_strs()})"


# ---------------------------------------------------------------- Groebner layer


class SubmoduleBasis:
    """Reduced Groebner basis of a submodule of R^rank (POT order)."""

    def __init__(self, ctx, rank, vecs):
        self.ctx = ctx
        self.rank = rank
        self.key = ctx.module_key()
        vecs = [v for v in vecs if v]
        self.basis = _gb.groebner(vecs, self.key, ctx.p, product_criterion=False) if vecs else []
        self._reducer = _gb.Reducer(self.basis)

    def normal_form(self, vec):
        if not vec:
            return {}
        return _gb.normal_form(vec, self._reducer, self.key, self.ctx.p)

    def contains(self, vec):
        if isinstance(vec, FreeModuleElement):
            vec = vec.to_vec()
        return not self.normal_form(vec)

    def elements(self):
        return [FreeModuleElement.from_vec(self.ctx, v, self.rank) for _, v in self.basis]

    def signature(self):
        """Hashable canonical form (reduced GBs are unique)."""
        return tuple(tuple(sorted(v.items())) for _, v in self.basis)

    def __eq__(self, other):
        return isinstance(other, SubmoduleBasis) and self.rank == other.rank and self.signature() == other.signature()

    def __hash__(self):
        return hash(self.signature())

    def __len__(self):
        return len(self.basis)


def _as_vecs(gens):
    out = []
    rank = None
    for g in gens:
        if isinstance(g, FreeModuleElement):
            if rank is None:
                rank = g.rank
            elif g.rank != rank:
                raise RankMismatchError("generators of different ranks")
            out.append(g.to_vec())
        else:
            out.append(dict(g))
    return out, rank


def module_groebner(gens, ctx=None, rank=None):
    """Reduced module Groebner basis of the span of ``gens``."""
    if isinstance(gens, ModuleMatrix):
        ctx = gens.ctx
        return SubmoduleBasis(ctx, gens.nrows, [gens.column_vec(j) for j in range(gens.ncols)])
    gens = list(gens)
    vecs, r = _as_vecs(gens)
    if ctx is None:
        if not gens:
            raise ValueError("need a context for an empty generator list")
        ctx = gens[0].ctx
    return SubmoduleBasis(ctx, rank if rank is not None else (r or 0), vecs)


def image_basis(M):
    return module_groebner(M)


def same_image(A, B):
    """Whether two matrices with equal row count have the same column span."""
    if A.nrows != B.nrows:
        raise RankMismatchError("row count mismatch")
    return image_basis(A) == image_basis(B)


def _augmented_basis(M):
    """GB of the columns of [M; Id]: tracks how each element is built from columns."""
    ctx = M.ctx
    r, s = M.nrows, M.ncols
    vecs = []
    for j in range(s):
        v = M.column_vec(j)
        v[(r + j, (0,) * ctx.n)] = 1
        vecs.append(v)
    return SubmoduleBasis(ctx, r + s, vecs)


def syzygies(M):
    """Matrix whose columns generate the kernel of M (acting on column vectors)."""
    ctx = M.ctx
    r, s = M.nrows, M.ncols
    if s == 0:
        return ModuleMatrix.zero(ctx, 0, 0)
    aug = _augmented_basis(M)
    cols = []
    for _, v in aug.basis:
        if all(pos >= r for pos, _ in v):
            cols.append({(pos - r, e): c for (pos, e), c in v.items()})
    return ModuleMatrix.from_columns(ctx, s, cols) if cols else ModuleMatrix.zero(ctx, s, 0)


class NoLift:
    """Returned by ``lift`` when some column is outside the image."""

    def __bool__(self):
        return False

    def __repr__(self):
        return "NoLift"


NO_LIFT = NoLift()


def lift(B, A):
    """X with A*X == B, or ``NO_LIFT`` when B's columns are not in the image of A."""
    if A.nrows != B.nrows:
        raise RankMismatchError("target ranks differ")
    ctx = A.ctx
    r, s = A.nrows, A.ncols
    if B.ncols == 0:
        return ModuleMatrix.zero(ctx, s, 0)
    if s == 0:
        return ModuleMatrix.zero(ctx, 0, B.ncols) if B.is_zero() else NO_LIFT
    aug = _augmented_basis(A)
    p = ctx.p
    cols = []
    for j in range(B.ncols):
        rem = aug.normal_form(B.column_vec(j))
        if any(pos < r for pos, _ in rem):
            return NO_LIFT
        cols.append({(pos - r, e): (-c) % p for (pos, e), c in rem.items()})
    return ModuleMatrix.from_columns(ctx, s, cols)


def lift_or_raise(B, A, what="lift"):
    from .errors import InternalError

    X = lift(B, A)
    if X is NO_LIFT:
        raise InternalError(f"{what}: expected a lift to exist")
    return X


# ---------------------------------------------------------------- presented modules


class PresentedModule:
    """Cokernel of ``presentation``: R^s -> R^r."""

    def __init__(self, presentation):
        self.presentation = presentation
        self.ctx = presentation.ctx

    @classmethod
    def quotient(cls, I):
        """R/I as a cyclic module."""
        return cls(ModuleMatrix.row(I.ctx, list(I.gens)))

    @property
    def rank(self):
        return self.presentation.nrows

    def relations(self):
        return image_basis(self.presentation)

    def is_zero(self):
        if self.rank == 0:
            return True
        rel = self.relations()
        one = (0,) * self.ctx.n
        return all(rel.contains({(i, one): 1}) for i in range(self.rank))

    def annihilator(self):
        return annihilator(self)

    def frobenius(self, q):
        return PresentedModule(self.presentation.frobenius(q))

    def isomorphic_to(self, other):
        """Test the identity-on-generators isomorphism: equal relation modules."""
        return self.rank == other.rank and self.relations() == other.relations()

    def __repr__(self):
        return f"PresentedModule(rank={self.rank}, relations={self.presentation.ncols})"


class ModuleMap:
    """Map coker(P_src) -> coker(P_tgt) given by a matrix between free covers."""

    def __init__(self, source, target, matrix, check=True):
        if matrix.nrows != target.rank or matrix.ncols != source.rank:
            raise RankMismatchError("map matrix has the wrong shape")
        self.source = source
        self.target = target
        self.matrix = matrix
        if check and not self.well_defined():
            raise ValueError("matrix does not carry source relations into target relations")

    def well_defined(self):
        img = self.matrix * self.source.presentation
        rel = self.target.relations()
        return all(rel.contains(img.column_vec(j)) for j in range(img.ncols))

    def kernel_generators(self):
        """Columns (in the source free cover) generating the kernel."""
        M = self.matrix.hstack(self.target.presentation)
        S = syzygies(M)
        return S.select_rows(range(self.matrix.ncols))

    def is_injective(self):
        K = self.kernel_generators()
        rel = self.source.relations()
        return all(rel.contains(K.column_vec(j)) for j in range(K.ncols))


def annihilator(M):
    """Ann_R(coker P) as an ideal."""
    ctx = M.ctx
    P = M.presentation
    r = P.nrows
    if r == 0:
        return Ideal(ctx, [ctx.one()])
    out = None
    for i in range(r):
        ei = ModuleMatrix.zero(ctx, r, 1)
        ei.entries[i][0] = ctx.one()
        S = syzygies(P.hstack(ei))
        gens = [S.entries[P.ncols][j] for j in range(S.ncols)]
        J = Ideal(ctx, gens)
        if out is None:
            out = J
        else:
            from .polyring import intersect

            out = intersect(out, J)
    return out


# ---------------------------------------------------------------- trimming


def _unit_entry(P):
    one = (0,) * P.ctx.n
    for j in range(P.ncols):
        for i in range(P.nrows):
            x = P.entries[i][j]
            if len(x.terms) == 1 and one in x.terms:
                return i, j
    return None


def trim(M):
    """Remove generators killed by unit relations.

    Returns ``(N, to_old, to_new)``: ``to_old`` maps generators of N into the old
    free cover and ``to_new`` maps old generators onto N, so that both induce
    mutually inverse isomorphisms.
    """
    ctx = M.ctx
    P = M.presentation
    r = P.nrows
    to_old = ModuleMatrix.identity(ctx, r)
    to_new = ModuleMatrix.identity(ctx, r)
    while True:
        hit = _unit_entry(P)
        if hit is None:
            break
        a, b = hit
        u = P.entries[a][b].constant_coeff()
        inv = pow(u, -1, ctx.p)
        keep = [i for i in range(P.nrows) if i != a]
        # generator a equals -(1/u) * sum_{i != a} P[i][b] gen_i
        expr = [(-P.entries[i][b]).scale(inv) for i in keep]
        # new presentation: substitute gen_a in every other relation
        cols = []
        for j in range(P.ncols):
            if j == b:
                continue
            paj = P.entries[a][j]
            col = [P.entries[i][j] + paj * expr[k] for k, i in enumerate(keep)]
            cols.append(col)
        newP = ModuleMatrix(ctx, [[c[k] for c in cols] for k in range(len(keep))], len(keep), len(cols))
        proj = ModuleMatrix.zero(ctx, len(keep), P.nrows)
        for k, i in enumerate(keep):
            proj.entries[k][i] = ctx.one()
            proj.entries[k][a] = expr[k]
        incl = ModuleMatrix.zero(ctx, P.nrows, len(keep))
        for k, i in enumerate(keep):
            incl.entries[i][k] = ctx.one()
        to_new = proj * to_new
        to_old = to_old * incl
        P = newP
    P = _drop_zero_columns(P)
    return PresentedModule(P), to_old, to_new


def _drop_zero_columns(P):
    keep = [j for j in range(P.ncols) if not all(P.entries[i][j].is_zero() for i in range(P.nrows))]
    seen = set()
    idx = []
    for j in keep:
        sig = tuple(P.entries[i][j] for i in range(P.nrows))
        if sig not in seen:
            seen.add(sig)
            idx.append(j)
    return P.select_columns(idx)


# ---------------------------------------------------------------- resolutions


def column_degrees(M, row_degrees, weights):
    """Weighted degree of each column (from its leading nonzero entry)."""
    out = []
    for j in range(M.ncols):
        deg = 0
        for i in range(M.nrows):
            x = M.entries[i][j]
            if not x.is_zero():
                deg = x.degree(weights) + row_degrees[i]
                break
        out.append(deg)
    return out


def minimize_columns(M, row_degrees, weights):
    """Greedy minimal generating subset of the columns, by increasing degree."""
    degs = column_degrees(M, row_degrees, weights)
    key = M.ctx.module_key()
    order = sorted(
        range(M.ncols),
        key=lambda j: (degs[j], _neg_key(key, M.column_vec(j))),
    )
    kept = []
    for j in order:
        v = M.column_vec(j)
        if not v:
            continue
        if kept:
            basis = SubmoduleBasis(M.ctx, M.nrows, [M.column_vec(k) for k in kept])
            if basis.contains(v):
                continue
        kept.append(j)
    kept.sort(key=lambda j: (degs[j], _neg_key(key, M.column_vec(j))))
    return M.select_columns(kept), [degs[j] for j in kept]


def _neg_key(key, vec):
    return tuple(-x for x in key(max(vec, key=key)))


class Resolution:
    """Free resolution F_0 <- F_1 <- ... with differentials ``maps[k]``: F_{k+1} -> F_k."""

    def __init__(self, maps, ranks, degrees, weights, minimal, ctx=None):
        self.ctx = ctx if ctx is not None else (maps[0].ctx if maps else None)
        self.maps = maps
        self.ranks = ranks
        self.degrees = degrees
        self.weights = weights
        self.minimal = minimal

    def __len__(self):
        return len(self.maps)

    @property
    def length(self):
        return len(self.maps)

    def differential(self, k):
        """d_k: F_k -> F_{k-1} for k >= 1 (zero matrix past the end)."""
        if 1 <= k <= len(self.maps):
            return self.maps[k - 1]
        return ModuleMatrix.zero(self.ctx, self.rank(k - 1), self.rank(k))

    def rank(self, k):
        return self.ranks[k] if 0 <= k < len(self.ranks) else 0

    def frobenius(self, q):
        return Resolution([d.frobenius(q) for d in self.maps], list(self.ranks),
                          [[q * x for x in ds] for ds in self.degrees], self.weights, self.minimal, self.ctx)


def free_resolution(M, max_length=None, weights=None):
    """Resolution of a presented module (or R/I for an Ideal).

    For graded input (some positive weight vector makes the presentation
    homogeneous) each step keeps a minimal generating set, so the length is
    the projective dimension.  Raises TruncatedResolutionError past ``max_length``.
    """
    if isinstance(M, Ideal):
        M = PresentedModule.quotient(M)
    ctx = M.ctx
    if max_length is None:
        max_length = ctx.n + 1
    P = M.presentation
    if weights is None:
        weights = grading_weights([x for r in P.entries for x in r], ctx)
    graded = weights is not None
    w = weights or (1,) * ctx.n
    row_degs = [0] * P.nrows
    d, degs = minimize_columns(P, row_degs, w)
    maps = []
    ranks = [P.nrows]
    degrees = [row_degs]
    while d.ncols:
        if len(maps) >= max_length:
            raise TruncatedResolutionError(
                f"resolution did not terminate within {max_length} steps", partial=maps
            )
        maps.append(d)
        ranks.append(d.ncols)
        degrees.append(degs)
        S = syzygies(d)
        d, degs = minimize_columns(S, degs, w)
    return Resolution(maps, ranks, degrees, weights, graded, ctx)


def projective_dimension(M, **kw):
    return free_resolution(M, **kw).length


def is_cohen_macaulay(I):
    """Graded Cohen-Macaulay test: projective dimension of R/I equals codim I."""
    w = grading_weights(I.gens, I.ctx)
    if w is None:
        raise NotGradedError("Cohen-Macaulay test needs homogeneous input (for some positive weights)")
    res = free_resolution(I, weights=w)
    return res.length == codimension(I)


# ---------------------------------------------------------------- Ext


class ExtData:
    """Ext^i(M, R) with the data needed for functoriality.

    ``kernel`` columns live in F_i^* and generate ker(d_{i+1}^T); ``image`` is
    d_i^T; ``module`` presents the quotient on the columns of ``kernel``.
    """

    def __init__(self, i, module, kernel, image):
        self.i = i
        self.module = module
        self.kernel = kernel
        self.image = image


def relations_mod_image(K, D):
    """Presentation of span(K) + im(D) modulo im(D), on the columns of K."""
    ctx = K.ctx
    if K.ncols == 0:
        return ModuleMatrix.zero(ctx, 0, 0)
    S = syzygies(K.hstack(D)) if D.ncols else syzygies(K)
    return S.select_rows(range(K.ncols))


def ext_data(res, i, trim_result=True):
    ctx = res.ctx
    r_i = res.rank(i)
    if r_i == 0:
        return ExtData(i, PresentedModule(ModuleMatrix.zero(ctx, 0, 0)), ModuleMatrix.zero(ctx, 0, 0),
                       ModuleMatrix.zero(ctx, 0, 0))
    up = res.differential(i + 1).transpose()  # F_i^* -> F_{i+1}^*
    if up.nrows == 0 or up.is_zero():
        K = ModuleMatrix.identity(ctx, r_i)
    else:
        K = syzygies(up)
    D = res.differential(i).transpose() if i >= 1 else ModuleMatrix.zero(ctx, r_i, 0)
    P = relations_mod_image(K, D)
    mod = PresentedModule(P)
    if trim_result:
        mod, to_old, _ = trim(mod)
        K = K * to_old
    return ExtData(i, mod, K, D)


def ext_module(M, i, res=None):
    """Ext^i_R(M, R) as a trimmed presentation."""
    if res is None:
        res = free_resolution(M)
    return ext_data(res, i).module
