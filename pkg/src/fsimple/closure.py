"""Tight closure of parameter ideals in A = R/I.

Test elements come from Jacobian minors.  Membership in J^* is probed level
by level (a Pi_1 condition), so results separate Certified facts (explicit
refutations, integral dependence equations) from Heuristic bounded probes.
"""

from dataclasses import dataclass, field
from itertools import combinations

from .caps import DEFAULT_CAPS
from .errors import HypothesisError, NoTestElementFound, NotGradedError, UnitIdealError, UnsupportedError
from .frobenius import ClosureSetup, LinearFrame, FrobeniusExponent, frobenius_membership
from .polyring import (
    Ideal,
    Poly,
    colon,
    grading_weights,
    intersect,
    krull_dimension,
    lift_to_generators,
    minimal_generators,
    radical_membership,
)

CERTIFIED = "Certified"
HEURISTIC = "Heuristic"


class QuotientRing:
    """A = R/I with dimension data and the user's domain assertion."""

    def __init__(self, I, asserted_domain=False):
        if I.is_unit():
            raise UnitIdealError("A = R/I needs a proper ideal")
        self.ctx = I.ctx
        self.I = I
        self.asserted_domain = asserted_domain
        self.dim = krull_dimension(I)
        self.codim = self.ctx.n - self.dim
        self._cm = None

    def require_domain(self):
        if not self.asserted_domain:
            raise HypothesisError("this construction needs A to be a domain; assert it explicitly")

    def cohen_macaulay(self):
        """(is_cm, route); graded input uses resolution length, otherwise Ext vanishing."""
        if self._cm is None:
            self._cm = cohen_macaulay_status(self.I)
        return self._cm

    def hypotheses(self):
        cm, route = self.cohen_macaulay()
        return {"domain_asserted": self.asserted_domain, "cohen_macaulay": cm, "cm_route": route}


def cohen_macaulay_status(I):
    from .modgb import ext_module, free_resolution, is_cohen_macaulay
    from .errors import TruncatedResolutionError

    n = I.ctx.n
    c = n - krull_dimension(I)
    if not I.gens:
        return True, "regular"
    if grading_weights(I.gens, I.ctx) is not None:
        return is_cohen_macaulay(I), "resolution_length"
    # Ext^i(R/I, R) vanishes for i != c exactly when R/I is Cohen-Macaulay at every prime
    try:
        res = free_resolution(I, max_length=2 * n + 2)
    except TruncatedResolutionError:
        return False, "undetermined"
    for i in range(res.length + 1):
        if i != c and not ext_module(I, i, res=res).is_zero():
            return False, "ext_vanishing"
    return True, "ext_vanishing"


# ---------------------------------------------------------------- Jacobian data


def _det(rows):
    n = len(rows)
    if n == 0:
        return None
    if n == 1:
        return rows[0][0]
    out = None
    for j in range(n):
        a = rows[0][j]
        if a.is_zero():
            continue
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        d = _det(minor)
        term = a * d if j % 2 == 0 else -(a * d)
        out = term if out is None else out + term
    return out if out is not None else rows[0][0].ctx.zero()


def jacobian_minors(I, c=None):
    ctx = I.ctx
    if c is None:
        c = ctx.n - krull_dimension(I) if I.gens else 0
    if c == 0:
        return [ctx.one()]
    gens = list(I.gens)
    jac = [[g.derivative(i) for i in range(ctx.n)] for g in gens]
    minors = []
    for rows in combinations(range(len(gens)), c):
        for cols in combinations(range(ctx.n), c):
            m = _det([[jac[r][k] for k in cols] for r in rows])
            if not m.is_zero():
                minors.append(m)
    return minors


def jacobian_ideal(I):
    """Ideal of c x c minors of the Jacobian matrix (c = codim), plus I."""
    return Ideal(I.ctx, jacobian_minors(I) + list(I.gens))


@dataclass
class TestElement:
    element: Poly
    provenance: str

    def power(self, k):
        return self.element ** k


def find_test_element(A):
    """Jacobian minor of least degree with nonzero image in A (ties: largest, monic)."""
    if A.I.is_zero():
        return TestElement(A.ctx.one(), "regular ring")
    cands = []
    for m in jacobian_minors(A.I, A.codim):
        r = A.I.reduce(m)
        if not r.is_zero():
            cands.append(r.monic())
    if not cands:
        raise NoTestElementFound("every Jacobian minor lies in I")
    key = A.ctx.key
    best = min(cands, key=lambda f: (f.degree(), tuple(-x for x in key(f.lead_monomial())),
                                     tuple(tuple(-x for x in key(m)) for m, _ in f.sorted_terms())))
    return TestElement(best, "Jacobian minor, reduced modulo I")


# ---------------------------------------------------------------- parameter systems


class ParameterSystem:
    """Elements x_1..x_d of R whose images form a system of parameters of A."""

    def __init__(self, A, elements, t=1, check=True):
        self.A = A
        self.elements = list(elements)
        self.t = t
        if check:
            if len(self.elements) != A.dim:
                raise HypothesisError(f"need {A.dim} parameters, got {len(self.elements)}")
            if not is_parameter_system(A, self.elements):
                raise HypothesisError("elements do not form a system of parameters at the origin")

    @property
    def ideal(self):
        return self.power_ideal(self.t)

    def power_ideal(self, t):
        return Ideal(self.A.ctx, [x**t for x in self.elements])

    def with_t(self, t):
        return ParameterSystem(self.A, self.elements, t, check=False)

    def frame(self):
        return LinearFrame.for_forms(self.A.ctx, self.elements)

    def setup(self, t=None):
        t = self.t if t is None else t
        return ClosureSetup(self.power_ideal(t), self.A.I, frame=self.frame())

    def to_strs(self):
        return [x.to_str() for x in self.elements]


def is_parameter_system(A, elements):
    ctx = A.ctx
    K = A.I + Ideal(ctx, list(elements))
    if K.is_unit():
        return False
    if krull_dimension(K) != 0:
        return False
    return all(radical_membership(v, K) for v in ctx.gens())


def _candidate_forms(ctx):
    xs = ctx.gens()
    yield from xs
    for i, j in combinations(range(ctx.n), 2):
        yield xs[i] + xs[j]
    for i, j in combinations(range(ctx.n), 2):
        yield xs[i] - xs[j]
    for i, j, k in combinations(range(ctx.n), 3):
        yield xs[i] + xs[j] + xs[k]


def find_parameter_system(A):
    """First system of parameters in a fixed enumeration of small linear forms."""
    d = A.dim
    if d == 0:
        return ParameterSystem(A, [], check=False)
    forms = list(_candidate_forms(A.ctx))
    from . import linalg

    for combo in combinations(forms, d):
        rows = []
        for f in combo:
            rows.append({ex.index(1): c for ex, c in f.terms.items()})
        if linalg.rank(rows, A.ctx.p) < d:
            continue
        if is_parameter_system(A, combo):
            return ParameterSystem(A, list(combo), check=False)
    raise UnsupportedError("no system of parameters among small linear forms")


# ---------------------------------------------------------------- certificates


@dataclass
class ClosureCertificate:
    """Membership verdict for one element in J^F, J^* or the integral closure."""

    kind: str  # FrobeniusClosure | TightClosure | IntegralClosure
    verdict: str  # In | NotIn | InUpTo | NotUpTo
    confidence: str
    e: object = None
    bound: object = None
    witness: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "kind": self.kind,
            "verdict": self.verdict,
            "confidence": self.confidence,
            "e": self.e,
            "bound": self.bound,
            "witness": self.witness,
        }


def frobenius_certificate(z, J, I, e_max, setup=None):
    w = frobenius_membership(z, J, I, e_max, setup=setup)
    if w.found:
        return ClosureCertificate("FrobeniusClosure", "In", CERTIFIED, e=w.e,
                                  witness={"e": w.e, "refuted": list(w.refutations)})
    return ClosureCertificate("FrobeniusClosure", "NotUpTo", HEURISTIC, bound=e_max,
                              witness={"refuted": list(w.refutations)})


def integral_membership(z, J, A, degree_cap=4, power=1):
    """Search an equation z^k = sum_i a_i z^(k-i) mod I with a_i in (J^power)^i."""
    ctx = A.ctx
    Jp = J if power == 1 else J**power
    if not Jp.gens:
        return ClosureCertificate("IntegralClosure", "NotIn", CERTIFIED, witness={"reason": "zero ideal"})
    if not radical_membership(z, Jp + A.I):
        return ClosureCertificate(
            "IntegralClosure", "NotIn", CERTIFIED,
            witness={"reason": "not in the radical of J + I", "radical_refutation": z.to_str()},
        )
    powers = [Ideal(ctx, [ctx.one()])]
    for k in range(1, degree_cap + 1):
        powers.append(Ideal(ctx, minimal_generators(powers[-1] * Jp)))
        gens, slots = [], []
        for i in range(1, k + 1):
            zi = z ** (k - i)
            for g in powers[i].gens:
                gens.append(g * zi)
                slots.append((i, g))
        nI = len(gens)
        gens += list(A.I.gens)
        if not Ideal(ctx, gens).contains(z**k):
            continue
        coeffs = lift_to_generators(z**k, gens)
        if coeffs is None:
            continue
        a = [ctx.zero() for _ in range(k + 1)]
        for h, (i, g) in zip(coeffs[:nI], slots):
            a[i] = a[i] + h * g
        return ClosureCertificate(
            "IntegralClosure", "In", CERTIFIED, e=k,
            witness={
                "degree": k,
                "element": z.to_str(),
                "ideal": [g.to_str() for g in Jp.gens],
                "coefficients": [a[i].to_str() for i in range(1, k + 1)],
            },
        )
    return ClosureCertificate("IntegralClosure", "NotUpTo", HEURISTIC, bound=degree_cap)


def check_integral_equation(z, J_gens, coeffs, I):
    """Replay: z^k - sum a_i z^(k-i) ∈ I and a_i ∈ J^i."""
    ctx = z.ctx
    k = len(coeffs)
    J = Ideal(ctx, J_gens)
    expr = z**k
    for i, a in enumerate(coeffs, start=1):
        if not (J**i).contains(a):
            return False
        expr = expr - a * z ** (k - i)
    return I.contains(expr)


def tight_certificate_by_integral(z, sop, A, caps=DEFAULT_CAPS):
    """z ∈ closure of J^d (d generators) lies in J^* (tight Briancon-Skoda)."""
    J = sop.ideal
    d = max(1, len(J.gens))
    cert = integral_membership(z, J, A, caps.integral_cap, power=d)
    if cert.verdict == "In":
        return ClosureCertificate("TightClosure", "In", CERTIFIED, e=0,
                                  witness={"integral_dependence": cert.witness, "power_of_J": d})
    return None


def tight_membership(z, sop, A, c, caps=DEFAULT_CAPS, setup=None):
    """Probe c^k z^q ∈ J^[q] + I for e = 0..e_max, k = 1..power_cap."""
    J = sop.ideal
    setup = setup or sop.setup()
    if (J + A.I).contains(z):
        return ClosureCertificate("TightClosure", "In", CERTIFIED, e=0, witness={"in_ideal": True})
    fz = setup.frame.to_frame(z)
    fc = setup.frame.to_frame(c.element)
    tower = setup.tower
    powers_used = []
    for e in range(caps.e_max + 1):
        FrobeniusExponent(A.ctx.p, e)
        h = tower.power_nf(e, fz)
        ok = None
        for k in range(1, caps.power_cap + 1):
            if tower.nf(e, fc**k * h).is_zero():
                ok = k
                break
        if ok is None:
            return ClosureCertificate(
                "TightClosure", "NotIn", CERTIFIED, e=e,
                witness={"test_element": c.element.to_str(), "power": caps.power_cap, "e": e},
            )
        powers_used.append(ok)
    return ClosureCertificate("TightClosure", "InUpTo", HEURISTIC, bound=caps.e_max,
                              witness={"test_element": c.element.to_str(), "powers": powers_used})


@dataclass
class TightClosureResult:
    ideal: Ideal
    extra: list  # basis of the part outside J + I (polynomials in R)
    confidence: str
    levels: list  # (e, dimension of the surviving subspace)
    power: int
    certificates: list  # (element, ClosureCertificate)
    collapsed: bool
    stabilized_at: object = None

    @property
    def equals_parameter_ideal(self):
        return not self.extra


def tight_closure_ideal(sop, A, c, caps=DEFAULT_CAPS, setup=None):
    """J^* for a parameter ideal, as J + I plus a finite-dimensional correction.

    The correction is the intersection over e of the subspaces
    {z : c^k z^q ∈ J^[q] + I} of the span of standard monomials of J + I.
    """
    setup = setup or sop.setup()
    std = setup.standard_basis()
    if std is None:
        raise HypothesisError("J + I must have finite colength")
    k = caps.power_cap
    fc = setup.frame.to_frame(c.element) ** k
    V = list(std)
    levels = []
    same = 0
    certs = {}

    def certify(vs):
        for v in vs:
            z = setup.back(v)
            if z not in certs:
                certs[z] = tight_certificate_by_integral(z, sop, A, caps)
            if certs[z] is None:
                return False
        return True

    # probes are cheap next to certification, so run every level up to e_max
    collapsed = False
    stabilized = None
    for e in range(caps.e_max + 1):
        FrobeniusExponent(A.ctx.p, e)
        newV = setup.tower.preimage_subspace(e, V, multiplier=fc)
        levels.append((e, len(newV)))
        same = same + 1 if e >= 1 and len(newV) == len(V) else 0
        V = newV
        if not V:
            collapsed = True
            stabilized = e
            break
        if stabilized is None and same >= caps.window - 1 and e >= 1:
            stabilized = e - same
    extra = [setup.back(v) for v in V]
    ideal = Ideal(A.ctx, list(sop.ideal.gens) + list(A.I.gens) + extra)
    certificates = []
    if collapsed:
        confidence = CERTIFIED
    elif certify(V):
        confidence = CERTIFIED
        certificates = [(z, certs[z]) for z in extra]
    else:
        confidence = HEURISTIC
        certificates = [(z, certs[z]) for z in extra if certs.get(z) is not None]
    return TightClosureResult(ideal, extra, confidence, levels, k, certificates, collapsed, stabilized)


# ---------------------------------------------------------------- test ideal and F-rationality


def _check_cm(A):
    cm, route = A.cohen_macaulay()
    if not cm:
        raise HypothesisError(
            f"A must be Cohen-Macaulay for the parameter test ideal (checked via {route})"
        )
    return route


@dataclass
class ParameterTestResult:
    ideal: Ideal
    confidence: str
    stabilized_at: object
    chain: list  # (t, Ideal) running intersections
    tight: dict  # t -> TightClosureResult


def parameter_test_ideal(A, sop, caps=DEFAULT_CAPS, c=None, tight_cache=None):
    """Running intersection over t of (J_t + I) : J_t^*, with stabilization window."""
    _check_cm(A)
    c = c or find_test_element(A)
    tight_cache = {} if tight_cache is None else tight_cache
    running = None
    chain = []
    same = 0
    confidence = CERTIFIED
    stabilized = None
    for t in range(1, caps.t_max + 1):
        st = sop.with_t(t)
        if t not in tight_cache:
            tight_cache[t] = tight_closure_ideal(st, A, c, caps)
        T = tight_cache[t]
        if T.confidence != CERTIFIED:
            confidence = HEURISTIC
        base = st.ideal + A.I
        col = colon(base, T.ideal) if T.extra else Ideal(A.ctx, [A.ctx.one()])
        new = col if running is None else intersect(running, col)
        new = Ideal(A.ctx, list(new.gb) + list(A.I.gens))
        if running is not None and new == running:
            same += 1
        else:
            same = 0
        running = new
        chain.append((t, running))
        if same >= caps.window - 1 and t >= 2:
            stabilized = t - same
            break
    if stabilized is None and confidence == CERTIFIED:
        confidence = HEURISTIC
    return ParameterTestResult(running, confidence, stabilized, chain, tight_cache)


@dataclass
class FRationalVerdict:
    answer: str  # Yes | No | Inconclusive
    confidence: str
    witness: object = None  # (z, t, certificate) for No
    probes: list = field(default_factory=list)  # (t, TightClosureResult)


def is_f_rational(A, sop, caps=DEFAULT_CAPS, c=None, tight_cache=None):
    """Probe J_t^* = J_t for t = 1..t_max."""
    A.require_domain()
    _check_cm(A)
    c = c or find_test_element(A)
    tight_cache = {} if tight_cache is None else tight_cache
    probes = []
    all_certified = True
    for t in range(1, caps.t_max + 1):
        st = sop.with_t(t)
        if t not in tight_cache:
            tight_cache[t] = tight_closure_ideal(st, A, c, caps)
        T = tight_cache[t]
        probes.append((t, T))
        for z, cert in T.certificates:
            if cert is not None and cert.verdict == "In":
                return FRationalVerdict("No", CERTIFIED, (z, t, cert), probes)
        if T.extra:
            return FRationalVerdict("Inconclusive", HEURISTIC, None, probes)
        if T.confidence != CERTIFIED:
            all_certified = False
    return FRationalVerdict("Yes", CERTIFIED if all_certified else HEURISTIC, None, probes)
