"""``fsimple`` command: run one command on a session script and report."""

import argparse
import hashlib
import json
import logging
import sys
import time

from .. import __version__
from ..caps import Caps
from ..closure import (
    QuotientRing,
    ParameterSystem,
    find_parameter_system,
    find_test_element,
    integral_membership,
    is_f_rational,
    parameter_test_ideal,
    tight_certificate_by_integral,
    tight_closure_ideal,
    tight_membership,
)
from ..errors import FSimpleError
from ..fmodule import components_mode, dsimplicity, l_generator, tight_witnesses, frobenius_witnesses
from ..frobenius import frobenius_closure, frobenius_membership, frobenius_power, frobenius_root
from ..modgb import ext_data, annihilator
from ..polyring import Ideal, codimension, krull_dimension
from .cache import Cache, cached_gb, cached_resolution
from .replay import replay_report
from .script import parse_script

COMMANDS = (
    "gb", "dim", "ext", "fpower", "froot", "fclosure", "tight", "testelt",
    "ptau", "frational", "dsimple", "lgen", "components",
)
INCONCLUSIVE = "Inconclusive"


def _strs(polys):
    return [f.to_str() for f in polys]


class Outcome:
    def __init__(self, verdict, result, route=None, confidence=None, witnesses=(), transcript=(), hypotheses=None):
        self.verdict = verdict
        self.result = result
        self.route = route
        self.confidence = confidence
        self.witnesses = list(witnesses)
        self.transcript = list(transcript)
        self.hypotheses = hypotheses or {}


# ---------------------------------------------------------------- helpers


def _quotient(script, args, cache, need_domain=False):
    name = script.ideal_name(args.ideal)
    I = cached_gb(cache, script.ideal(name))
    A = QuotientRing(I, asserted_domain=script.is_domain(name))
    if need_domain:
        A.require_domain()
    return name, A


def _sop(script, args, A):
    elems = script.parameters(args.params) if args.params or script.params else None
    if elems is None:
        return find_parameter_system(A)
    return ParameterSystem(A, elems)


def _elem(script, args):
    return script.ctx.poly(args.elem) if args.elem else None


# ---------------------------------------------------------------- commands


def cmd_gb(script, args, caps, cache):
    name = script.ideal_name(args.ideal)
    I = cached_gb(cache, script.ideal(name))
    gb = _strs(I.gb)
    w = {"kind": "gb", "ideal": _strs(I.gens), "gb": gb}
    return Outcome("Done", {"ideal": name, "gb": gb}, witnesses=[w])


def cmd_dim(script, args, caps, cache):
    name = script.ideal_name(args.ideal)
    I = cached_gb(cache, script.ideal(name))
    d = krull_dimension(I)
    return Outcome("Done", {"ideal": name, "dim": d, "codim": script.ctx.n - d})


def cmd_ext(script, args, caps, cache):
    name = script.ideal_name(args.ideal)
    I = cached_gb(cache, script.ideal(name))
    res = cached_resolution(cache, I)
    i = args.index if args.index is not None else codimension(I)
    data = ext_data(res, i)
    M = data.module
    result = {
        "ideal": name,
        "index": i,
        "resolution_ranks": res.ranks,
        "generators": M.rank,
        "presentation": M.presentation.to_strs(),
        "zero": M.is_zero(),
    }
    if M.rank:
        result["annihilator"] = _strs(annihilator(M).gb)
    return Outcome("Done", result)


def cmd_fpower(script, args, caps, cache):
    name = script.ideal_name(args.ideal)
    J = frobenius_power(script.ideal(name), args.e)
    return Outcome("Done", {"ideal": name, "e": args.e, "q": script.ctx.p**args.e, "generators": _strs(J.gens)})


def cmd_froot(script, args, caps, cache):
    name = script.ideal_name(args.ideal)
    J = frobenius_root(script.ideal(name), args.e)
    return Outcome("Done", {"ideal": name, "e": args.e, "root": _strs(J.gb)})


def _closure_J(script, args):
    if args.params:
        return Ideal(script.ctx, script.parameters(args.params))
    if script.params:
        return Ideal(script.ctx, next(iter(script.params.values())))
    raise FSimpleError("this command needs a parameter system or ideal J (use --params)")


def cmd_fclosure(script, args, caps, cache):
    name = script.ideal_name(args.ideal)
    I = cached_gb(cache, script.ideal(name))
    J = _closure_J(script, args)
    z = _elem(script, args)
    base = {"J": _strs(J.gens), "I": _strs(I.gens), "parameters": _strs(J.gens)}
    if z is not None:
        w = frobenius_membership(z, J, I, caps.e_max)
        wits = [dict(base, kind="frobenius_refutation", z=z.to_str(), e=e) for e in w.refutations]
        if w.found:
            wits.append(dict(base, kind="frobenius_in", z=z.to_str(), e=w.e))
            return Outcome("In", {"z": z.to_str(), "e": w.e}, confidence="Certified", witnesses=wits)
        return Outcome("NotUpTo", {"z": z.to_str(), "e_max": caps.e_max, "refuted": w.refutations},
                       confidence="Heuristic", witnesses=wits)
    chain = frobenius_closure(J, I, caps.e_max, caps.window)
    levels = [{"e": e, "gb": _strs(L.gb)} for e, L in chain.levels]
    result = {"levels": levels, "stabilized_at": chain.stabilized_at, "capped": chain.capped,
              "closure": _strs(chain.last.gb)}
    verdict = "Stabilized" if chain.stabilized_at is not None else INCONCLUSIVE
    return Outcome(verdict, result, confidence="Heuristic")


def cmd_tight(script, args, caps, cache):
    name, A = _quotient(script, args, cache)
    sop = _sop(script, args, A)
    c = find_test_element(A)
    z = _elem(script, args)
    hyp = {"domain_asserted": A.asserted_domain, "test_element": c.element.to_str(), "parameters": sop.to_strs()}
    if z is not None:
        cert = tight_membership(z, sop, A, c, caps)
        wits = []
        if cert.verdict == "NotIn":
            wits.append({"kind": "tight_refutation", "z": z.to_str(), "J": _strs(sop.ideal.gens),
                         "I": _strs(A.I.gens), "test_element": c.element.to_str(),
                         "power": cert.witness["power"], "e": cert.e, "parameters": sop.to_strs()})
        result = {"z": z.to_str(), "certificate": cert.to_dict()}
        if cert.verdict == "InUpTo" and A.asserted_domain:
            up = tight_certificate_by_integral(z, sop, A, caps)
            if up is not None:
                w = up.witness["integral_dependence"]
                wits.append({"kind": "integral_dependence", "z": w["element"], "J": w["ideal"],
                             "I": _strs(A.I.gens), "coefficients": w["coefficients"]})
                result["upgrade"] = up.to_dict()
                return Outcome("In", result, confidence="Certified", witnesses=wits, hypotheses=hyp)
        return Outcome(cert.verdict, result, confidence=cert.confidence, witnesses=wits, hypotheses=hyp)
    T = tight_closure_ideal(sop, A, c, caps)
    result = {
        "J": _strs(sop.ideal.gens),
        "tight_closure": _strs(T.ideal.gb),
        "extra": _strs(T.extra),
        "levels": T.levels,
        "power": T.power,
        "stabilized_at": T.stabilized_at,
    }
    verdict = "Equal" if not T.extra else "Larger"
    return Outcome(verdict, result, confidence=T.confidence, witnesses=tight_witnesses(T, sop, A, c),
                   hypotheses=hyp)


def cmd_testelt(script, args, caps, cache):
    name, A = _quotient(script, args, cache)
    c = find_test_element(A)
    return Outcome("Done", {"ideal": name, "test_element": c.element.to_str(), "provenance": c.provenance})


def cmd_ptau(script, args, caps, cache):
    name, A = _quotient(script, args, cache)
    sop = _sop(script, args, A)
    c = find_test_element(A)
    pt = parameter_test_ideal(A, sop, caps, c=c)
    wits = []
    for t, T in sorted(pt.tight.items()):
        wits.extend(tight_witnesses(T, sop.with_t(t), A, c))
    result = {
        "tau": _strs(pt.ideal.gb),
        "chain": [{"t": t, "gb": _strs(L.gb)} for t, L in pt.chain],
        "stabilized_at": pt.stabilized_at,
    }
    return Outcome("Done", result, confidence=pt.confidence, witnesses=wits, hypotheses=A.hypotheses())


def cmd_frational(script, args, caps, cache):
    name, A = _quotient(script, args, cache, need_domain=True)
    sop = _sop(script, args, A)
    c = find_test_element(A)
    fr = is_f_rational(A, sop, caps, c=c)
    wits = []
    for t, T in fr.probes:
        wits.extend(tight_witnesses(T, sop.with_t(t), A, c))
    result = {"probes": [{"t": t, "levels": T.levels, "extra": _strs(T.extra)} for t, T in fr.probes]}
    if fr.witness is not None:
        z, t, cert = fr.witness
        result["witness"] = {"z": z.to_str(), "t": t, "certificate": cert.to_dict()}
    return Outcome(fr.answer, result, confidence=fr.confidence, witnesses=wits, hypotheses=A.hypotheses())


def cmd_dsimple(script, args, caps, cache):
    name, A = _quotient(script, args, cache, need_domain=True)
    sop = _sop(script, args, A) if (args.params or script.params) else None
    v = dsimplicity(A, caps, sop=sop)
    return Outcome(v.verdict, v.to_dict(), route=v.route, confidence=v.confidence, witnesses=v.witnesses,
                   transcript=v.transcript, hypotheses=v.hypotheses)


def cmd_lgen(script, args, caps, cache):
    name, A = _quotient(script, args, cache, need_domain=True)
    sop = _sop(script, args, A) if (args.params or script.params) else None
    out = l_generator(A, caps, sop=sop)
    return Outcome("Done", out, confidence=out["confidence"], hypotheses=A.hypotheses())


def cmd_components(script, args, caps, cache):
    names = args.ideals.split(",") if args.ideals else list(script.ideals)
    primes = [script.ideal(n.strip()) for n in names]
    out = components_mode(primes, caps, jobs=args.jobs)
    comps = []
    wits = []
    for n, v in zip(names, out["components"]):
        comps.append(dict(v.to_dict(), ideal=n.strip()))
        wits.extend(v.witnesses)
    verdict = INCONCLUSIVE if INCONCLUSIVE in out["verdicts"] else "Done"
    result = {"components": comps, "summands": out["summands"], "verdicts": out["verdicts"]}
    return Outcome(verdict, result, witnesses=wits, hypotheses={"primes_supplied_by_user": True})


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


# ---------------------------------------------------------------- report assembly


def input_hash(text, command, args):
    relevant = {
        "command": command,
        "ideal": args.ideal,
        "params": args.params,
        "elem": args.elem,
        "index": args.index,
        "ideals": args.ideals,
    }
    blob = text + "\n" + json.dumps(relevant, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def build_report(script, command, args, caps, outcome, elapsed, cache_status):
    return {
        "version": __version__,
        "input_hash": input_hash(script.text, command, args),
        "command": command,
        "ring": script.ctx.describe(),
        "verdict": outcome.verdict,
        "route": outcome.route,
        "confidence": outcome.confidence,
        "result": outcome.result,
        "witnesses": outcome.witnesses,
        "transcript": outcome.transcript,
        "caps": caps.to_dict(),
        "hypotheses": outcome.hypotheses,
        "timings": {"elapsed_seconds": round(elapsed, 6), "cache": cache_status},
    }


def dumps(report):
    return json.dumps(report, sort_keys=True, indent=2, default=str)


def run(text, command, args):
    """Parse, dispatch and return (report, exit code)."""
    if command not in HANDLERS:
        raise FSimpleError(f"unknown command {command!r}; choose from {', '.join(COMMANDS)}")
    script = parse_script(text)
    caps = Caps(e_max=args.emax, t_max=args.tmax, window=args.window, ladder_e=args.e)
    cache = Cache.from_flags(args.cache_dir, args.no_cache)
    start = time.perf_counter()
    outcome = HANDLERS[command](script, args, caps, cache)
    elapsed = time.perf_counter() - start
    report = build_report(script, command, args, caps, outcome, elapsed, cache.status())
    code = 2 if outcome.verdict == INCONCLUSIVE else 0
    return report, code


def _human(report):
    lines = [f"command: {report['command']}", f"verdict: {report['verdict']}"]
    if report.get("route"):
        lines.append(f"route: {report['route']}")
    if report.get("confidence"):
        lines.append(f"confidence: {report['confidence']}")
    for k, v in sorted(report["result"].items()):
        if k in ("verdict", "route", "confidence"):
            continue
        lines.append(f"{k}: {json.dumps(v, sort_keys=True, default=str)}")
    return "\n".join(lines)


def build_parser():
    ap = argparse.ArgumentParser(prog="fsimple", description=__doc__)
    ap.add_argument("script", nargs="?", help="session script file ('-' for stdin)")
    ap.add_argument("command", nargs="?", help=f"one of: {', '.join(COMMANDS)}")
    ap.add_argument("--ideal", help="ideal name (default: first declared)")
    ap.add_argument("--params", help="parameter system name")
    ap.add_argument("--elem", help="element to test, e.g. 'y'")
    ap.add_argument("--index", type=int, help="Ext index for 'ext' (default: codim)")
    ap.add_argument("--ideals", help="comma-separated prime names for 'components'")
    ap.add_argument("--emax", type=int, default=6)
    ap.add_argument("--tmax", type=int, default=4)
    ap.add_argument("--window", type=int, default=2)
    ap.add_argument("--e", type=int, default=1, help="Frobenius exponent for ladders and fpower/froot")
    ap.add_argument("--json", action="store_true", help="print the JSON report")
    ap.add_argument("--cache-dir", help="cache directory (else $FSIMPLE_CACHE_DIR)")
    ap.add_argument("--no-cache", action="store_true")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--replay", metavar="REPORT", help="re-check every witness in a JSON report")
    return ap


def _replay(path, out):
    with open(path, encoding="utf-8") as fh:
        try:
            report = json.load(fh)
        except ValueError as exc:
            raise FSimpleError(f"{path} is not a JSON report ({exc})") from exc
    if not isinstance(report, dict) or "ring" not in report:
        raise FSimpleError(f"{path} is not a JSON report (no ring)")
    results = replay_report(report)
    bad = 0
    for i, kind, ok in results:
        print(f"witness {i} {kind}: {'ok' if ok else 'FAILED'}", file=out)
        bad += not ok
    print(f"replayed {len(results)} witnesses, {bad} failed", file=out)
    return 1 if bad else 0


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.replay:
            return _replay(args.replay, sys.stdout)
        if not args.script or not args.command:
            ap.error("need SCRIPT and COMMAND (or --replay)")
        if args.script == "-":
            text = sys.stdin.read()
        else:
            with open(args.script, encoding="utf-8") as fh:
                text = fh.read()
        report, code = run(text, args.command, args)
    except FSimpleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(dumps(report) if args.json else _human(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
