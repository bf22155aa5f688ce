"""Sparse linear algebra over F_p.

Vectors are dicts from hashable row labels to nonzero residues.  Used for
Frobenius preimages and tight-closure subspaces, where the unknowns are
coefficients over a finite monomial basis.
"""


def _axpy(acc, vec, c, p):
    for k, v in vec.items():
        nv = (acc.get(k, 0) + c * v) % p
        if nv:
            acc[k] = nv
        else:
            acc.pop(k, None)


class Echelon:
    """Incremental echelon form that also tracks how each row was combined.

    ``combo`` dicts map caller labels to coefficients, so that
    ``sum(combo[j] * input_j) == reduced vector`` at all times.
    """

    def __init__(self, p):
        self.p = p
        self.pivots = []  # (row label, normalized vec, combo)

    def reduce(self, vec, combo=None):
        p = self.p
        v = dict(vec)
        cb = dict(combo or {})
        for r, w, wc in self.pivots:
            c = v.get(r)
            if c:
                _axpy(v, w, -c, p)
                _axpy(cb, wc, -c, p)
        return v, cb

    def add(self, vec, label):
        """Insert a vector; return its dependency combo if it reduces to zero."""
        v, cb = self.reduce(vec, {label: 1})
        if not v:
            return cb
        r = min(v)
        inv = pow(v[r], -1, self.p)
        v = {k: x * inv % self.p for k, x in v.items()}
        cb = {k: x * inv % self.p for k, x in cb.items()}
        self.pivots.append((r, v, cb))
        return None

    @property
    def rank(self):
        return len(self.pivots)


def kernel(columns, p):
    """Basis of {a : sum_j a_j columns[j] == 0} as dicts j -> a_j."""
    ech = Echelon(p)
    out = []
    for j, col in enumerate(columns):
        dep = ech.add(col, j)
        if dep is not None:
            out.append(dep)
    return out


def rank(vectors, p):
    ech = Echelon(p)
    for j, v in enumerate(vectors):
        ech.add(v, j)
    return ech.rank


def solve(columns, target, p):
    """Coefficients a with sum a_j columns[j] == target, or None."""
    ech = Echelon(p)
    for j, col in enumerate(columns):
        ech.add(col, j)
    v, cb = ech.reduce(target)
    if v:
        return None
    return {j: c for j, c in cb.items()}


def intersect_spans(A, B, p):
    """Basis of span(A) ∩ span(B) for lists of sparse vectors."""
    if not A or not B:
        return []
    cols = list(A) + [{k: (-x) % p for k, x in b.items()} for b in B]
    out = Echelon(p)
    basis = []
    for dep in kernel(cols, p):
        vec = {}
        for j, c in dep.items():
            if j < len(A):
                _axpy(vec, A[j], c, p)
        if vec and out.add(vec, len(basis)) is None:
            basis.append(vec)
    return basis


def inverse(matrix, p):
    """Inverse of a square matrix over F_p (list of lists), or None if singular."""
    n = len(matrix)
    a = [[x % p for x in row] + [int(i == j) for j in range(n)] for i, row in enumerate(matrix)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = pow(a[col][col], -1, p)
        a[col] = [x * inv % p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                c = a[r][col]
                a[r] = [(x - c * y) % p for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]
