"""Text syntax for formulas.

Grammar, loosest binding first::

    formula  := quant | iff
    quant    := ('forall' | 'exists') binder (',' binder)* '.' formula
    binder   := NAME ':' INT ['nonempty']      second-order
              | NAME ['in' NAME]               first-order
    iff      := imp ['<->' imp]
    imp      := or ['->' imp]                  right associative
    or       := and ('|' and)*
    and      := unary ('&' unary)*
    unary    := '~' unary | quant | primary
    primary  := '(' formula ')' | 'true' | 'false'
              | NAME '(' NAME (',' NAME)* ')' | NAME
              | NAME ('=' | '!=' | '<') NAME

``x < y`` is the atom ``<(x, y)``.  A quantifier body extends as far to the
right as possible.  ``%`` starts a comment.
"""

from __future__ import annotations

import re

from ..errors import ParseError
from .formula import (
    FALSE,
    TRUE,
    And,
    Atom,
    Const,
    Eq,
    Exists,
    ExistsSO,
    Forall,
    ForallSO,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    forall_nonempty,
    fresh_name,
    variables,
)

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*)
  | (?P<op><->|->|!=|[~&|().,:=<])
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)

KEYWORDS = {"forall", "exists", "in", "nonempty", "true", "false"}


def _tokenize(text):
    out = []
    pos = 0
    line, col0 = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - col0 + 1)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            out.append((kind, m.group(), line, m.start() - col0 + 1))
        chunk = m.group()
        if "\n" in chunk:
            line += chunk.count("\n")
            col0 = m.start() + chunk.rindex("\n") + 1
        pos = m.end()
    out.append(("eof", "", line, pos - col0 + 1))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        _, v, ln, col = tok or self.peek()
        raise ParseError(f"{msg}, got {v or 'end of input'!r}", ln, col)

    def expect(self, value):
        tok = self.peek()
        if tok[1] != value or tok[0] == "name" and value not in KEYWORDS:
            self.error(f"expected {value!r}")
        return self.take()

    def name(self):
        tok = self.peek()
        if tok[0] != "name" or tok[1] in KEYWORDS:
            self.error("expected a name")
        return self.take()[1]

    def formula(self):
        if self.peek()[1] in ("forall", "exists") and self.peek()[0] == "name":
            return self.quant()
        return self.iff()

    def quant(self):
        kind = self.take()[1]
        binders = [self.binder()]
        while self.peek()[1] == ",":
            self.take()
            binders.append(self.binder())
        self.expect(".")
        body = self.formula()
        for var, arity, extra in reversed(binders):
            if arity is None:
                if extra is None:
                    body = (Forall if kind == "forall" else Exists)(var, body)
                elif kind == "forall":
                    body = Forall(var, Implies(Atom(extra, (var,)), body))
                else:
                    body = Exists(var, And((Atom(extra, (var,)), body)))
            elif extra == "nonempty":
                if kind == "forall":
                    body = forall_nonempty(var, body)
                else:
                    w = fresh_name("x", variables(body) | {var})
                    body = ExistsSO(var, arity, And((Exists(w, Atom(var, (w,))), body)))
            else:
                body = (ForallSO if kind == "forall" else ExistsSO)(var, arity, body)
        return body

    def binder(self):
        var = self.name()
        if self.peek()[1] == ":":
            self.take()
            tok = self.take()
            if tok[0] != "int":
                self.error("expected an arity", tok)
            arity = int(tok[1])
            extra = None
            if self.peek()[1] == "nonempty":
                self.take()
                if arity != 1:
                    self.error("'nonempty' needs a unary variable")
                extra = "nonempty"
            return var, arity, extra
        if self.peek()[1] == "in" and self.peek()[0] == "name":
            self.take()
            return var, None, self.name()
        return var, None, None

    def iff(self):
        left = self.imp()
        if self.peek()[1] == "<->":
            self.take()
            return Iff(left, self.imp())
        return left

    def imp(self):
        left = self.or_()
        if self.peek()[1] == "->":
            self.take()
            return Implies(left, self.imp_or_quant())
        return left

    def imp_or_quant(self):
        if self.peek()[1] in ("forall", "exists"):
            return self.quant()
        return self.imp()

    def or_(self):
        parts = [self.and_()]
        while self.peek()[1] == "|":
            self.take()
            parts.append(self.and_())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def and_(self):
        parts = [self.unary()]
        while self.peek()[1] == "&":
            self.take()
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self):
        tok = self.peek()
        if tok[1] == "~":
            self.take()
            return Not(self.unary())
        if tok[0] == "name" and tok[1] in ("forall", "exists"):
            return self.quant()
        return self.primary()

    def primary(self):
        tok = self.peek()
        if tok[1] == "(" and tok[0] == "op":
            self.take()
            f = self.formula()
            self.expect(")")
            return f
        if tok[0] == "name" and tok[1] == "true":
            self.take()
            return TRUE
        if tok[0] == "name" and tok[1] == "false":
            self.take()
            return FALSE
        name = self.name()
        nxt = self.peek()[1]
        if nxt == "(":
            self.take()
            args = [self.name()]
            while self.peek()[1] == ",":
                self.take()
                args.append(self.name())
            self.expect(")")
            return Atom(name, tuple(args))
        if nxt in ("=", "!=", "<"):
            self.take()
            other = self.name()
            if nxt == "=":
                return Eq(name, other)
            if nxt == "!=":
                return Not(Eq(name, other))
            return Atom("<", (name, other))
        return Atom(name, ())


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    if p.peek()[0] != "eof":
        p.error("unexpected trailing input")
    return f


# -- printing ------------------------------------------------------------------

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}


def format_formula(phi: Formula) -> str:
    """Fully parenthesized where needed; ``parse_formula`` reads it back."""

    def atom_str(f):
        if f.rel == "<" and len(f.args) == 2:
            return f"{f.args[0]} < {f.args[1]}"
        if not f.args:
            return f.rel
        return f"{f.rel}({','.join(f.args)})"

    def go(f, ctx):
        if isinstance(f, Const):
            return "true" if f.value else "false"
        if isinstance(f, Atom):
            return atom_str(f)
        if isinstance(f, Eq):
            return f"{f.left} = {f.right}"
        if isinstance(f, Not):
            if isinstance(f.body, Eq):
                return f"{f.body.left} != {f.body.right}"
            return "~" + go(f.body, 5)
        if isinstance(f, (Exists, Forall, ExistsSO, ForallSO)):
            word = "exists" if isinstance(f, (Exists, ExistsSO)) else "forall"
            binder = f.var if isinstance(f, (Exists, Forall)) else f"{f.var}:{f.arity}"
            s = f"{word} {binder} . {go(f.body, 0)}"
            return f"({s})" if ctx > 0 else s
        prec = _PREC[type(f)]
        if isinstance(f, (And, Or)):
            sep = " & " if isinstance(f, And) else " | "
            s = sep.join(go(p, prec + 1) for p in f.parts)
        elif isinstance(f, Implies):
            s = f"{go(f.left, prec + 1)} -> {go(f.right, prec)}"
        else:
            s = f"{go(f.left, prec + 1)} <-> {go(f.right, prec + 1)}"
        return f"({s})" if ctx > prec else s

    return go(phi, 0)
