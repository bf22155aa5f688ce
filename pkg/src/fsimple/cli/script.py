"""Session script parser.

Grammar, one statement per line, ``#`` starts a comment::

    ring <p> <var> ... [order=grevlex|lex]
    ideal <name> = <poly>, ...
    params <name> = <poly>, ...
    assert domain <name>
"""

import re
from dataclasses import dataclass, field

from ..errors import ScriptError
from ..parsing import ExprParser, tokenize
from ..polyring import MAX_PRIME, Ideal, MonomialOrder, RingContext, is_prime

_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9']*")
_ASSIGN = re.compile(r"^(\s*)(ideal|params)(\s+)([^\s=]+)(\s*)=(\s*)")


@dataclass
class SessionScript:
    ctx: RingContext
    ideals: dict = field(default_factory=dict)  # name -> Ideal, in declaration order
    params: dict = field(default_factory=dict)  # name -> list of Poly
    domains: set = field(default_factory=set)
    text: str = ""

    def ideal(self, name=None):
        if name is None:
            if not self.ideals:
                raise ScriptError("script declares no ideal")
            return next(iter(self.ideals.values()))
        if name not in self.ideals:
            raise ScriptError(f"no ideal named {name!r}")
        return self.ideals[name]

    def ideal_name(self, name=None):
        if name is not None:
            self.ideal(name)
            return name
        if not self.ideals:
            raise ScriptError("script declares no ideal")
        return next(iter(self.ideals))

    def parameters(self, name=None):
        if name is None:
            return next(iter(self.params.values())) if self.params else None
        if name not in self.params:
            raise ScriptError(f"no parameter system named {name!r}")
        return self.params[name]

    def is_domain(self, name):
        return name in self.domains


class _Syntax:
    """Stand-in value used to check expression syntax before a ring exists."""

    def __add__(self, other):
        return self

    __radd__ = __sub__ = __rsub__ = __mul__ = __rmul__ = __add__

    def __neg__(self):
        return self

    def __pow__(self, k):
        return self


class _SyntaxCtx:
    def constant(self, c):
        return _Syntax()

    def var(self, name):
        return _Syntax()


def _strip_comment(line):
    i = line.find("#")
    return line if i < 0 else line[:i]


def _parse_ring(line, lineno):
    words = [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", line)]
    if len(words) < 3:
        raise ScriptError("ring needs a prime and at least one variable", lineno, len(line.rstrip()) + 1)
    ptxt, pcol = words[1]
    if not ptxt.isdigit():
        raise ScriptError(f"expected a prime, got {ptxt!r}", lineno, pcol)
    p = int(ptxt)
    if not (2 <= p < MAX_PRIME) or not is_prime(p):
        raise ScriptError(f"{p} is not prime", lineno, pcol)
    names = []
    order = "grevlex"
    for w, col in words[2:]:
        if w.startswith("order="):
            order = w[len("order="):]
            if order not in ("grevlex", "lex"):
                raise ScriptError(f"unknown order {order!r}", lineno, col)
            continue
        if not _NAME.fullmatch(w):
            raise ScriptError(f"invalid variable name {w!r}", lineno, col)
        if w in names:
            raise ScriptError(f"duplicate variable {w!r}", lineno, col)
        names.append(w)
    if not names:
        raise ScriptError("ring needs at least one variable", lineno, len(line.rstrip()) + 1)
    return RingContext(p, tuple(names), MonomialOrder(order))


def parse_script(text):
    """Parse a session script, raising ScriptError with line and column."""
    ctx = None
    script = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        stripped = line.lstrip()
        col0 = len(line) - len(stripped) + 1
        keyword = stripped.split()[0]
        if keyword == "ring":
            if ctx is not None:
                raise ScriptError("only one ring per script", lineno, col0)
            ctx = _parse_ring(line, lineno)
            script = SessionScript(ctx, text=text)
            continue
        if keyword in ("ideal", "params"):
            m = _ASSIGN.match(line)
            if m is None:
                raise ScriptError(f"expected '{keyword} <name> = <poly>, ...'", lineno, col0)
            name = m.group(4)
            name_col = m.start(4) + 1
            if not _NAME.fullmatch(name):
                raise ScriptError(f"invalid name {name!r}", lineno, name_col)
            offset = m.end()
            expr = line[offset:]
            if not expr.strip():
                raise ScriptError("expected a polynomial list", lineno, len(line) + 1)
            target = ctx if ctx is not None else _SyntaxCtx()
            polys = ExprParser(target, tokenize(expr, lineno, offset), lineno).parse_list()
            if ctx is None:
                raise ScriptError("declare the ring before ideals", lineno, col0)
            if name in script.ideals or name in script.params:
                raise ScriptError(f"duplicate name {name!r}", lineno, name_col)
            if keyword == "ideal":
                script.ideals[name] = Ideal(ctx, polys)
            else:
                script.params[name] = polys
            continue
        if keyword == "assert":
            words = [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", line)]
            if len(words) != 3 or words[1][0] != "domain":
                raise ScriptError("expected 'assert domain <name>'", lineno, col0)
            if script is None:
                raise ScriptError("declare the ring before assertions", lineno, col0)
            name, col = words[2]
            if name not in script.ideals:
                raise ScriptError(f"no ideal named {name!r}", lineno, col)
            script.domains.add(name)
            continue
        raise ScriptError(f"unknown statement {keyword!r}", lineno, col0)
    if script is None:
        raise ScriptError("script declares no ring", 1, 1)
    return script
