"""Re-check the witnesses recorded in a report."""

from ..closure import check_integral_equation
from ..frobenius import ClosureSetup, LinearFrame
from ..polyring import Ideal, MonomialOrder, RingContext, radical_membership

DIRECT_LIMIT = 25  # above this q, membership is replayed through the normal-form tower


def ring_from_report(ring):
    order = ring.get("order", "grevlex")
    if order.startswith("block("):
        blocks = tuple(int(b) for b in order[len("block("):-1].split(","))
        mo = MonomialOrder("block", blocks)
    else:
        mo = MonomialOrder(order)
    return RingContext(ring["p"], tuple(ring["vars"]), mo)


def _ideal(ctx, strs):
    return Ideal(ctx, [ctx.poly(s) for s in strs])


def _setup(ctx, w, J, I):
    frame = None
    if w.get("parameters"):
        frame = LinearFrame.for_forms(ctx, [ctx.poly(s) for s in w["parameters"]])
    return ClosureSetup(J, I, frame=frame)


def _frobenius_member(ctx, w, z, J, I, e, multiplier=None):
    q = ctx.p**e
    if q <= DIRECT_LIMIT:
        K = Ideal(ctx, [g.frobenius(q) for g in J.gens] + list(I.gens))
        f = z.frobenius(q) if multiplier is None else multiplier * z.frobenius(q)
        return K.contains(f)
    setup = _setup(ctx, w, J, I)
    fz = setup.frame.to_frame(z)
    h = setup.tower.power_nf(e, fz)
    if multiplier is not None:
        h = setup.tower.nf(e, setup.frame.to_frame(multiplier) * h)
    return h.is_zero()


def _check_tight_collapse(ctx, w):
    I = _ideal(ctx, w["I"])
    J = _ideal(ctx, w["J"])
    c = ctx.poly(w["test_element"]) ** w["power"]
    setup = _setup(ctx, w, J, I)
    std = setup.standard_basis()
    if std is None:
        return False
    V = list(std)
    fc = setup.frame.to_frame(c)
    for e in range(w["e"] + 1):
        V = setup.tower.preimage_subspace(e, V, multiplier=fc)
    return not V


def check_witness(ctx, w):
    """Recompute one witness; return True when it still holds."""
    kind = w["kind"]
    if kind == "gb":
        I = _ideal(ctx, w["ideal"])
        return [g.to_str() for g in Ideal(ctx, I.gens).gb] == w["gb"]
    if kind == "membership":
        return _ideal(ctx, w["ideal"]).contains(ctx.poly(w["f"])) == w["member"]
    if kind in ("frobenius_in", "frobenius_refutation"):
        z = ctx.poly(w["z"])
        member = _frobenius_member(ctx, w, z, _ideal(ctx, w["J"]), _ideal(ctx, w["I"]), w["e"])
        return member if kind == "frobenius_in" else not member
    if kind == "tight_refutation":
        z = ctx.poly(w["z"])
        c = ctx.poly(w["test_element"]) ** w["power"]
        return not _frobenius_member(ctx, w, z, _ideal(ctx, w["J"]), _ideal(ctx, w["I"]), w["e"], multiplier=c)
    if kind == "tight_collapse":
        return _check_tight_collapse(ctx, w)
    if kind == "integral_dependence":
        z = ctx.poly(w["z"])
        coeffs = [ctx.poly(s) for s in w["coefficients"]]
        return check_integral_equation(z, [ctx.poly(s) for s in w["J"]], coeffs, _ideal(ctx, w["I"]))
    if kind == "radical_refutation":
        K = _ideal(ctx, w["J"]) + _ideal(ctx, w["I"])
        return not radical_membership(ctx.poly(w["z"]), K)
    raise ValueError(f"unknown witness kind {kind!r}")


def replay_report(report):
    """Return a list of (index, kind, ok) for every witness in ``report``."""
    ctx = ring_from_report(report["ring"])
    out = []
    for i, w in enumerate(report.get("witnesses", [])):
        try:
            ok = check_witness(ctx, w)
        except Exception as exc:  # a witness that cannot be re-parsed fails
            ok = False
            w = dict(w, error=str(exc))
        out.append((i, w["kind"], ok))
    return out
