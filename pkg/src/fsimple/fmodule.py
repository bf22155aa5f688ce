"""Roots of H^c_I(R): the canonical module, the root map and D-simplicity.

H^c_I(R) is never built.  It is represented by the ladder
omega -> F^*omega -> F^2*omega -> ..., where omega = Ext^c(R/I, R) and the
maps are induced by R/I^[q] -> R/I.  Simplicity is decided from tight and
Frobenius closures of parameter ideals.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .caps import DEFAULT_CAPS, Caps
from .closure import (
    CERTIFIED,
    HEURISTIC,
    QuotientRing,
    find_parameter_system,
    find_test_element,
    frobenius_certificate,
    is_f_rational,
    parameter_test_ideal,
    tight_certificate_by_integral,
)
from .errors import HypothesisError, InternalError, TruncatedResolutionError, UnsupportedError
from .frobenius import FrobeniusExponent, root_vec
from .modgb import (
    NO_LIFT,
    ModuleMap,
    ModuleMatrix,
    PresentedModule,
    SubmoduleBasis,
    ext_data,
    free_resolution,
    lift,
)
from .polyring import Ideal, RingContext, codimension, grading_weights

SIMPLE = "Simple"
NOT_SIMPLE = "NotSimple"
INCONCLUSIVE = "Inconclusive"


def canonical_module(I, res=None):
    """omega = Ext^c(R/I, R) as a trimmed presentation."""
    if I.is_unit():
        raise HypothesisError("canonical module of the zero ring")
    res = res or free_resolution(I)
    return ext_data(res, codimension(I)).module


@dataclass
class RootLadder:
    """omega with beta: omega -> F^{e*} omega, presented on free covers."""

    I: Ideal
    e: FrobeniusExponent
    base: PresentedModule
    target: PresentedModule  # F^{e*} base: entries raised to the q-th power
    beta: ModuleMap
    kernel: ModuleMatrix  # generators of omega inside F_c^*
    injective: bool
    graded: bool

    @property
    def q(self):
        return self.e.q

    @property
    def matrix(self):
        return self.beta.matrix


def _chain_map(res, q, upto):
    """Lift of the identity R -> R to F(res) -> res, degrees 0..upto."""
    ctx = res.ctx
    phi = ModuleMatrix.identity(ctx, res.rank(0))
    maps = [phi]
    for k in range(1, upto + 1):
        d = res.differential(k)
        rhs = phi * d.frobenius(q)
        nxt = lift(rhs, d)
        if nxt is NO_LIFT:
            raise InternalError(f"chain map does not lift in homological degree {k}")
        maps.append(nxt)
        phi = nxt
    return maps


def root_map(I, e=1, res=None):
    """beta^e: Ext^c(R/I, R) -> Ext^c(R/I^[q], R) = F^{e*} Ext^c(R/I, R)."""
    ctx = I.ctx
    fe = e if isinstance(e, FrobeniusExponent) else FrobeniusExponent(ctx.p, e)
    q = fe.q
    graded = grading_weights(I.gens, ctx) is not None
    res = res or free_resolution(I)
    c = codimension(I)
    data = ext_data(res, c)
    base = data.module
    K, D = data.kernel, data.image
    phis = _chain_map(res, q, c)
    phi_c = phis[c]
    FK = K.frobenius(q)
    FD = D.frobenius(q)
    img = phi_c.transpose() * K
    X = lift(img, FK.hstack(FD))
    if X is NO_LIFT:
        raise InternalError("root map does not factor through the Frobenius kernel")
    B = X.select_rows(range(K.ncols))
    target = base.frobenius(q)
    beta = ModuleMap(base, target, B, check=True)
    return RootLadder(I, fe, base, target, beta, K, beta.is_injective(), graded)


def beta_equals(ladder, matrix):
    """Whether ``matrix`` induces the same map as beta (difference lands in relations)."""
    diff = ladder.matrix - matrix
    rel = ladder.target.relations()
    return all(rel.contains(diff.column_vec(j)) for j in range(diff.ncols))


# ---------------------------------------------------------------- descent


@dataclass
class DescentResult:
    generators: ModuleMatrix  # columns generate N inside the free cover of omega
    basis: SubmoduleBasis
    proper: bool
    steps: list  # (i, number of GB elements)
    stable: bool

    def coefficient_ideal(self, I):
        """For cyclic omega: N as an ideal of R containing I."""
        if self.generators.nrows != 1:
            raise UnsupportedError("coefficient ideal is only defined for cyclic omega")
        return Ideal(I.ctx, [self.generators.entries[0][j] for j in range(self.generators.ncols)] + list(I.gens))


def _module_root(M, q):
    """Columns of the smallest L with span(M) ⊆ L^[q]."""
    pieces = []
    for j in range(M.ncols):
        pieces.extend(root_vec(M.column_vec(j), q))
    return ModuleMatrix.from_columns(M.ctx, M.nrows, pieces) if pieces else ModuleMatrix.zero(M.ctx, M.nrows, 0)


def descent_step(ladder, N):
    """(beta N)^[1/q] + relations: the smallest N' with beta(N) ⊆ F^*N'."""
    P = ladder.base.presentation
    BN = ladder.matrix * N
    R = _module_root(BN, ladder.q)
    return R.hstack(P)


def root_descent(ladder, max_steps=20):
    """Descend from omega along N -> (beta N)^[1/q] + relations until stable."""
    if not ladder.injective:
        raise HypothesisError("root descent needs an injective root map")
    ctx = ladder.base.ctx
    r = ladder.base.rank
    N = ModuleMatrix.identity(ctx, r)
    full = SubmoduleBasis(ctx, r, [N.column_vec(j) for j in range(r)])
    cur = full
    steps = [(0, len(cur))]
    for i in range(1, max_steps + 1):
        nxt_gens = descent_step(ladder, N)
        nxt = SubmoduleBasis(ctx, r, [nxt_gens.column_vec(j) for j in range(nxt_gens.ncols)])
        if not all(cur.contains(v) for _, v in nxt.basis):
            raise InternalError("descent chain is not descending")
        steps.append((i, len(nxt)))
        if nxt == cur:
            gens = ModuleMatrix.from_columns(ctx, r, [v for _, v in cur.basis])
            return DescentResult(gens, cur, cur != full, steps, True)
        cur = nxt
        N = ModuleMatrix.from_columns(ctx, r, [v for _, v in cur.basis])
    gens = ModuleMatrix.from_columns(ctx, r, [v for _, v in cur.basis])
    return DescentResult(gens, cur, cur != full, steps, False)


def descent_is_sound(ladder, result):
    """N ⊆ base, beta(N) ⊆ F^*N and one more step fixes N."""
    N = result.generators
    BN = ladder.matrix * N
    FN = N.frobenius(ladder.q).hstack(ladder.target.presentation)
    target = SubmoduleBasis(N.ctx, N.nrows, [FN.column_vec(j) for j in range(FN.ncols)])
    if not all(target.contains(BN.column_vec(j)) for j in range(BN.ncols)):
        return False
    again = descent_step(ladder, N)
    nb = SubmoduleBasis(N.ctx, N.nrows, [again.column_vec(j) for j in range(again.ncols)])
    return nb == result.basis


# ---------------------------------------------------------------- simplicity


@dataclass
class SimplicityVerdict:
    verdict: str
    route: object
    confidence: str
    witness: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)  # replayable facts
    transcript: list = field(default_factory=list)
    bounds: dict = field(default_factory=dict)
    hypotheses: dict = field(default_factory=dict)
    cross_check: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "route": self.route,
            "confidence": self.confidence,
            "witness": self.witness,
            "bounds": self.bounds,
            "hypotheses": self.hypotheses,
            "cross_check": self.cross_check,
        }


def _strs(polys):
    return [f.to_str() for f in polys]


def tight_witnesses(T, st, A, c):
    """Replayable facts behind one tight closure computation."""
    out = []
    J = _strs(st.ideal.gens)
    if T.collapsed:
        out.append({
            "kind": "tight_collapse",
            "J": J,
            "parameters": st.to_strs(),
            "I": _strs(A.I.gens),
            "test_element": c.element.to_str(),
            "power": T.power,
            "e": T.levels[-1][0],
        })
    for z, cert in T.certificates:
        if cert is None:
            continue
        w = cert.witness["integral_dependence"]
        out.append({
            "kind": "integral_dependence",
            "z": w["element"],
            "J": w["ideal"],
            "I": _strs(A.I.gens),
            "coefficients": w["coefficients"],
        })
    return out


def frobenius_witnesses(z, st, A, cert):
    out = []
    base = {"z": z.to_str(), "J": _strs(st.ideal.gens), "I": _strs(A.I.gens), "parameters": st.to_strs()}
    for e in cert.witness.get("refuted", []):
        out.append(dict(base, kind="frobenius_refutation", e=e))
    if cert.verdict == "In":
        out.append(dict(base, kind="frobenius_in", e=cert.e))
    return out


def _descent_cross_check(A, caps):
    try:
        ladder = root_map(A.I, caps.ladder_e)
        if not ladder.injective:
            return {"descent": "skipped", "reason": "root map not injective"}
        res = root_descent(ladder, caps.descent_steps)
        return {"descent": "proper" if res.proper else "full", "steps": len(res.steps) - 1, "stable": res.stable}
    except (TruncatedResolutionError, UnsupportedError) as exc:
        return {"descent": "skipped", "reason": str(exc)}


def dsimplicity(A, caps=DEFAULT_CAPS, sop=None, c=None, cross_check=True):
    """Decide D-simplicity of H^c_I(R) at the origin."""
    A.require_domain()
    cm, cm_route = A.cohen_macaulay()
    c = c or find_test_element(A)
    sop = sop or find_parameter_system(A)
    hyp = {
        "domain_asserted": True,
        "cohen_macaulay": cm,
        "cm_route": cm_route,
        "graded_model": "graded data interpreted at the origin",
        "test_element": c.element.to_str(),
        "parameters": sop.to_strs(),
    }
    bounds = {"e_max": caps.e_max, "t_max": caps.t_max, "window": caps.window}
    tight_cache = {}
    transcript = []
    witnesses = []
    cross = _descent_cross_check(A, caps) if cross_check else {}

    def finish(verdict, route, confidence, witness=None):
        if not cm and verdict == SIMPLE:
            transcript.append({"note": "not Cohen-Macaulay: the only-if direction is unavailable, leaning Simple"})
            verdict, confidence = INCONCLUSIVE, HEURISTIC
        out = SimplicityVerdict(verdict, route, confidence, witness or {}, witnesses, transcript, bounds, hyp, cross)
        return out

    # (1) F-rational shortcut
    if cm:
        fr = is_f_rational(A, sop, caps, c=c, tight_cache=tight_cache)
        for t, T in fr.probes:
            transcript.append({"step": "tight", "t": t, "levels": T.levels, "extra": _strs(T.extra),
                               "confidence": T.confidence})
        transcript.append({"step": "f_rational", "answer": fr.answer, "confidence": fr.confidence})
        if fr.answer == "Yes":
            for t, T in fr.probes:
                witnesses.extend(tight_witnesses(T, sop.with_t(t), A, c))
            return finish(SIMPLE, "FRational", fr.confidence)

    # (2) compare J_t^* with J_t^F
    from .closure import tight_closure_ideal

    all_in_frobenius = True
    frob_in = []
    largest_e = 0
    for t in range(1, caps.t_max + 1):
        st = sop.with_t(t)
        if t not in tight_cache:
            tight_cache[t] = tight_closure_ideal(st, A, c, caps)
            T = tight_cache[t]
            transcript.append({"step": "tight", "t": t, "levels": T.levels, "extra": _strs(T.extra),
                               "confidence": T.confidence})
        T = tight_cache[t]
        setup = st.setup()
        certs = dict((z, ct) for z, ct in T.certificates)
        for z in T.extra:
            fcert = frobenius_certificate(z, st.ideal, A.I, caps.e_max, setup=setup)
            transcript.append({"step": "frobenius", "t": t, "z": z.to_str(), "result": fcert.verdict,
                               "e": fcert.e, "refuted": fcert.witness.get("refuted", [])})
            tcert = certs.get(z)
            if tcert is None and T.confidence != CERTIFIED:
                tcert = tight_certificate_by_integral(z, st, A, caps)
            if fcert.verdict == "In":
                largest_e = max(largest_e, fcert.e)
                frob_in.append({"z": z.to_str(), "J": _strs(st.ideal.gens), "t": t, "e": fcert.e})
                witnesses.extend(frobenius_witnesses(z, st, A, fcert))
                continue
            all_in_frobenius = False
            if tcert is not None and tcert.verdict == "In":
                witnesses.extend(tight_witnesses(T, st, A, c))
                if tcert not in [ct for _, ct in T.certificates]:
                    w = tcert.witness["integral_dependence"]
                    witnesses.append({"kind": "integral_dependence", "z": w["element"], "J": w["ideal"],
                                      "I": _strs(A.I.gens), "coefficients": w["coefficients"]})
                witnesses.extend(frobenius_witnesses(z, st, A, fcert))
                witness = {
                    "z": z.to_str(),
                    "J": _strs(st.ideal.gens),
                    "t": t,
                    "tight": tcert.to_dict(),
                    "frobenius": fcert.to_dict(),
                }
                out = finish(NOT_SIMPLE, "WitnessPair", CERTIFIED, witness)
                _check_cross(out)
                return out
        if T.extra:
            witnesses.extend(tight_witnesses(T, st, A, c))
    if all_in_frobenius:
        transcript.append({"largest_frobenius_exponent": largest_e})
        out = finish(SIMPLE, "JStarEqualsJF", HEURISTIC, {"frobenius_in": frob_in})
        _check_cross(out, frobenius_found=cm and largest_e > 0)
        return out
    return finish(INCONCLUSIVE, None, HEURISTIC)


def _check_cross(verdict, frobenius_found=False):
    """For CM A, a parameter ideal that is not Frobenius closed forces a proper descent."""
    cc = verdict.cross_check
    if frobenius_found and cc.get("descent") == "full":
        raise InternalError("Frobenius closure witness found but minimal-root descent did not drop")


# ---------------------------------------------------------------- L(A, R) and components


def l_generator(A, caps=DEFAULT_CAPS, c=None, sop=None, tight_cache=None):
    """Generator of L(A, R) inside H^c_I(R) in terms of the root generator eta."""
    A.require_domain()
    omega = canonical_module(A.I)
    if omega.rank != 1:
        raise UnsupportedError("omega is not cyclic; an ideal embedding is not implemented")
    c = c or find_test_element(A)
    sop = sop or find_parameter_system(A)
    pt = parameter_test_ideal(A, sop, caps, c=c, tight_cache=tight_cache)
    tau = pt.ideal
    f = A.I.gens[0] if len(A.I.gens) == 1 else None
    if tau.is_unit():
        elem = A.ctx.one()
        gen = "eta"
    else:
        elem = None
        for k in range(1, caps.power_cap + 1):
            if tau.contains(c.element**k):
                elem = c.element**k
                break
        if elem is None:
            raise InternalError("test element power not found in the parameter test ideal")
        gen = f"({elem.to_str()})*eta"
    out = {
        "generator": gen,
        "element": elem.to_str(),
        "tau": [g.to_str() for g in tau.gb],
        "confidence": pt.confidence,
    }
    if f is not None:
        out["fraction"] = f"({elem.to_str()})/({f.to_str()})"
    return out


def _component_job(args):
    p, names, order, gens, caps_dict = args
    ctx = RingContext(p, tuple(names), order)
    P = Ideal(ctx, [ctx.poly(g) for g in gens])
    A = QuotientRing(P, asserted_domain=True)
    v = dsimplicity(A, Caps(**caps_dict))
    return v


def components_mode(primes, caps=DEFAULT_CAPS, jobs=1):
    """Per-component simplicity for L(A, R) = sum over minimal primes."""
    if not primes:
        raise HypothesisError("need at least one prime")
    codims = {codimension(P) for P in primes}
    if len(codims) != 1:
        raise HypothesisError("components must have the same codimension (equidimensional input)")
    ctx = primes[0].ctx
    args = [
        (ctx.p, list(ctx.vars), ctx.order, [g.to_str() for g in P.gens], caps.to_dict()) for P in primes
    ]
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            verdicts = list(pool.map(_component_job, args))
    else:
        verdicts = [_component_job(a) for a in args]
    return {
        "components": verdicts,
        "summands": len(primes),
        "verdicts": [v.verdict for v in verdicts],
    }
