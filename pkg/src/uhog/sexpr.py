"""S-expression syntax for types and terms.

Core forms::

    (var x T) (con NAME T) (app M N) (lam (x T) M) (eq M N)
    (pair M N) (p1 M) (p2 M) (word "car")

Sugar accepted on input and produced by the pretty printer: ``true``,
``false``, ``star``, ``(and A B)``, ``(or A B)``, ``(imp A B)``,
``(not A)``, ``(exists (x T) B)``, ``(forall (x T) B)``, ``(iota P)``,
``(ite X Y C)``, store instructions ``(setref S V)``, ``(deref S)``,
``(unset S)``, ``(assert A)``, ``(refute A)``, ``(test A)``, and bare
names for variables bound by an enclosing lambda.  In rule patterns,
symbols starting with ``?`` are metavariables.
"""
from __future__ import annotations

import itertools
from contextvars import ContextVar
from dataclasses import dataclass, field

from . import words
from .terms import (FALSE, STAR, TRUE, AND, OR, IMP, NOT, App, Con, Eq, Lam, MVar,
                    Pair, Proj1, Proj2, Term, Var, head_args, ite_con, iota_con,
                    quant_con, typecheck, IllTyped, compose)
from .types import (DEFAULT_SORTS, T, Fun, Prod, Sorts, TMeta, Type, fun, show_type)


class SexprError(ValueError):
    def __init__(self, msg, line=None, col=None):
        self.msg, self.line, self.col = msg, line, col
        where = f"{line}:{col}: " if line is not None else ""
        super().__init__(where + msg)


@dataclass(frozen=True)
class Sym:
    name: str
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class Str:
    value: str
    line: int = 0
    col: int = 0


@dataclass
class SList:
    items: list
    line: int = 0
    col: int = 0


def tokenize(text: str, line0: int = 1, col0: int = 1):
    """Yield ('(' | ')' | 'sym' | 'str', value, line, col)."""
    i, line, col = 0, line0, col0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == ";" and text.startswith(";;", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch in "()":
            yield ch, ch, line, col
            i += 1
            col += 1
            continue
        if ch == '"':
            j = i + 1
            buf = []
            while j < n and text[j] != '"':
                if text[j] == "\\" and j + 1 < n:
                    j += 1
                    buf.append({"n": "\n", "t": "\t"}.get(text[j], text[j]))
                else:
                    buf.append(text[j])
                j += 1
            if j >= n:
                raise SexprError("unterminated string", line, col)
            yield "str", "".join(buf), line, col
            col += j + 1 - i
            i = j + 1
            continue
        j = i
        while j < n and not text[j].isspace() and text[j] not in '()"':
            j += 1
        yield "sym", text[i:j], line, col
        col += j - i
        i = j


def read_all(text: str, line0: int = 1, col0: int = 1) -> list:
    stack: list = [SList([])]
    for kind, val, line, col in tokenize(text, line0, col0):
        if kind == "(":
            stack.append(SList([], line, col))
        elif kind == ")":
            if len(stack) == 1:
                raise SexprError("unbalanced ')'", line, col)
            done = stack.pop()
            stack[-1].items.append(done)
        elif kind == "str":
            stack[-1].items.append(Str(val, line, col))
        else:
            stack[-1].items.append(Sym(val, line, col))
    if len(stack) != 1:
        top = stack[-1]
        raise SexprError("unbalanced '('", top.line, top.col)
    return stack[0].items


def read_one(text: str):
    items = read_all(text)
    if len(items) != 1:
        raise SexprError(f"expected one expression, found {len(items)}")
    return items[0]


def _pos(x):
    return getattr(x, "line", None), getattr(x, "col", None)


# -- types ------------------------------------------------------------------

def parse_type(x, sorts: Sorts = DEFAULT_SORTS, patterns: bool = False) -> Type:
    if isinstance(x, str):
        x = read_one(x)
    if isinstance(x, Sym):
        if patterns and x.name.startswith("?"):
            return TMeta(x.name)
        try:
            return sorts.resolve(x.name)
        except ValueError as exc:
            raise SexprError(str(exc), *_pos(x)) from None
    if isinstance(x, SList) and x.items and isinstance(x.items[0], Sym):
        op, args = x.items[0].name, x.items[1:]
        if op in ("->", "*") and len(args) >= 2:
            ts = [parse_type(a, sorts, patterns) for a in args]
            out = ts[-1]
            for a in reversed(ts[:-1]):
                out = Fun(a, out) if op == "->" else Prod(a, out)
            return out
    raise SexprError("malformed type", *_pos(x))


# -- terms -----------------------------------------------------------------

@dataclass
class Env:
    """Named constants and term macros visible to the reader."""
    sorts: Sorts = DEFAULT_SORTS
    consts: dict = field(default_factory=dict)
    macros: dict = field(default_factory=dict)
    patterns: bool = False

    @property
    def c(self) -> Type:
        return self.sorts.resolve("c")

    @property
    def s(self) -> Type:
        return self.sorts.resolve("s")


_meta_counter = itertools.count()

KEYWORDS = {"var", "con", "app", "lam", "eq", "pair", "p1", "p2", "word", "and", "or",
            "imp", "not", "exists", "forall", "iota", "ite", "setref", "deref", "unset",
            "assert", "refute", "test", "compose", "id"}

INSTRUCTIONS = {"assert": "Assert", "refute": "Refute", "test": "Test"}


def _type_of(term: Term, env: Env) -> Type:
    try:
        return typecheck(term)
    except (IllTyped, TypeError, RecursionError):
        if env.patterns:
            return TMeta(f"?_{next(_meta_counter)}")
        raise


def parse_term(x, env: Env | None = None, scope: tuple = ()) -> Term:
    env = env or Env()
    if isinstance(x, str):
        x = read_one(x)
    try:
        return _term(x, env, scope)
    except IllTyped as exc:
        raise SexprError(str(exc), *_pos(x)) from None


def _binder(x, env):
    if not (isinstance(x, SList) and len(x.items) == 2 and isinstance(x.items[0], Sym)):
        raise SexprError("binder must be (name TYPE)", *_pos(x))
    return x.items[0].name, parse_type(x.items[1], env.sorts, env.patterns)


def _term(x, env: Env, scope: tuple) -> Term:
    if isinstance(x, Str):
        raise SexprError("bare string; use (word \"...\")", *_pos(x))
    if isinstance(x, Sym):
        name = x.name
        for vname, vty in reversed(scope):
            if vname == name:
                return Var(vname, vty)
        if env.patterns and name.startswith("?"):
            return MVar(name)
        if name == "true":
            return TRUE
        if name == "false":
            return FALSE
        if name == "star":
            return STAR
        if name in env.consts:
            return env.consts[name]
        if name in env.macros:
            return env.macros[name]
        raise SexprError(f"unbound symbol {name!r}", *_pos(x))
    if not isinstance(x, SList) or not x.items:
        raise SexprError("empty form", *_pos(x))
    head, args = x.items[0], x.items[1:]
    op = head.name if isinstance(head, Sym) else None
    in_scope = op is not None and any(v == op for v, _ in scope)
    if op in KEYWORDS and not in_scope:
        return _form(op, args, x, env, scope)
    # generic application (f a b ...)
    out = _term(head, env, scope)
    for a in args:
        out = App(out, _term(a, env, scope))
    return out


def _arity(x, args, *ns):
    if len(args) not in ns:
        raise SexprError(f"wrong number of arguments to {x.items[0].name}", *_pos(x))


def _form(op, args, x, env: Env, scope):
    sub = lambda a: _term(a, env, scope)
    if op == "var":
        _arity(x, args, 2)
        name = args[0].name
        if env.patterns and name.startswith("?") and not isinstance(args[1], (SList, Sym)):
            pass
        return Var(name, parse_type(args[1], env.sorts, env.patterns))
    if op == "con":
        _arity(x, args, 2)
        name = args[0].name if isinstance(args[0], Sym) else args[0].value
        return Con(name, parse_type(args[1], env.sorts, env.patterns))
    if op == "app":
        if len(args) < 2:
            raise SexprError("app needs a function and arguments", *_pos(x))
        out = sub(args[0])
        for a in args[1:]:
            out = App(out, sub(a))
        return out
    if op in ("lam", "exists", "forall"):
        if len(args) < 2:
            raise SexprError(f"{op} needs binders and a body", *_pos(x))
        binders = [_binder(b, env) for b in args[:-1]]
        body = _term(args[-1], env, scope + tuple(binders))
        for name, ty in reversed(binders):
            body = Lam(name, ty, body)
            if op != "lam":
                body = App(quant_con(op, ty), body)
        return body
    if op == "eq":
        _arity(x, args, 2)
        return Eq(sub(args[0]), sub(args[1]))
    if op == "pair":
        _arity(x, args, 2)
        return Pair(sub(args[0]), sub(args[1]))
    if op in ("p1", "p2"):
        _arity(x, args, 1)
        return (Proj1 if op == "p1" else Proj2)(sub(args[0]))
    if op == "word":
        _arity(x, args, 1)
        if not isinstance(args[0], Str):
            raise SexprError("word expects a string", *_pos(x))
        return words.encode(args[0].value, None, s=env.s)
    if op in ("and", "or"):
        if len(args) < 2:
            raise SexprError(f"{op} needs two or more arguments", *_pos(x))
        con = AND if op == "and" else OR
        terms = [sub(a) for a in args]
        out = terms[-1]
        for t in reversed(terms[:-1]):
            out = App(App(con, t), out)
        return out
    if op == "imp":
        _arity(x, args, 2)
        return App(App(IMP, sub(args[0])), sub(args[1]))
    if op == "not":
        _arity(x, args, 1)
        return App(NOT, sub(args[0]))
    if op == "iota":
        _arity(x, args, 1)
        p = sub(args[0])
        ty = _type_of(p, env)
        dom = ty.dom if isinstance(ty, Fun) else TMeta(f"?_{next(_meta_counter)}")
        return App(iota_con(dom), p)
    if op == "ite":
        _arity(x, args, 3)
        a, b, c = (sub(v) for v in args)
        return App(App(App(ite_con(_type_of(a, env)), a), b), c)
    if op in ("setref", "unset", "deref"):
        if not args:
            raise SexprError(f"{op} needs a reference symbol", *_pos(x))
        ref = sub(args[0])
        ty = _type_of(ref, env)
        c = env.c
        con = {"setref": Con("Setref", fun(ty, ty, c, c)),
               "unset": Con("Unset", fun(ty, c, c)),
               "deref": Con("Deref", fun(ty, c, ty))}[op]
        out = App(con, ref)
        for a in args[1:]:
            out = App(out, sub(a))
        return out
    if op in INSTRUCTIONS:
        if not args:
            raise SexprError(f"{op} needs a formula", *_pos(x))
        c = env.c
        out = Con(INSTRUCTIONS[op], fun(T, c, c))
        for a in args:
            out = App(out, sub(a))
        return out
    if op == "compose":
        _arity(x, args, 2)
        return compose(sub(args[0]), sub(args[1]))
    if op == "id":
        _arity(x, args, 1)
        ty = parse_type(args[0], env.sorts, env.patterns)
        return Lam("x", ty, Var("x", ty))
    raise SexprError(f"unknown form {op}", *_pos(x))


def read_term(text: str, env: Env | None = None) -> Term:
    return parse_term(read_one(text), env)


def read_terms(text: str, env: Env | None = None) -> list:
    """Streaming mode: one term per non-blank line."""
    return [read_term(line, env) for line in text.splitlines() if line.strip()]


# -- printing ------------------------------------------------------------------

def quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _sym(name: str) -> str:
    if not name or any(ch.isspace() or ch in '()";' for ch in name):
        return quote(name)
    return name


_KNOWN: ContextVar = ContextVar("known_constants", default=frozenset())


def show(term: Term, sorts: Sorts = DEFAULT_SORTS, pretty: bool = True,
         known=frozenset()) -> str:
    """Print ``term``; constants in ``known`` (Con values) print as bare names."""
    out: list = []
    token = _KNOWN.set(frozenset(known))
    try:
        _show(term, sorts, pretty, (), out)
    finally:
        _KNOWN.reset(token)
    return "".join(out)


def _bare(t: Term, scope) -> bool:
    return (isinstance(t, Con) and t in _KNOWN.get() and t.name not in KEYWORDS
            and not any(v == t.name for v, _ in scope) and _sym(t.name) == t.name)


_SUGAR_CONSTS = {"true", "false", "star"}
_STORE = {"Setref": "setref", "Unset": "unset", "Deref": "deref"}
_INSTR = {v: k for k, v in INSTRUCTIONS.items()}


def _show(t: Term, sorts, pretty, scope, out):
    ty = lambda x: show_type(x, sorts)
    if isinstance(t, Var):
        if pretty:
            for vname, vty in reversed(scope):
                if vname == t.name:
                    if vty == t.type:
                        out.append(_sym(t.name))
                        return
                    break
        out.append(f"(var {_sym(t.name)} {ty(t.type)})")
        return
    if isinstance(t, Con):
        if pretty and t.name in _SUGAR_CONSTS and t in (TRUE, FALSE, STAR):
            out.append(t.name)
        elif pretty and t.name == words.EMPTY_NAME:
            out.append('(word "")')
        elif pretty and t.name.startswith(words.SYM_PREFIX) and words.is_word_term(t):
            out.append(f"(word {quote(t.name[-1])})")
        elif pretty and _bare(t, scope):
            out.append(t.name)
        else:
            out.append(f"(con {_sym(t.name)} {ty(t.type)})")
        return
    if isinstance(t, MVar):
        out.append(t.name)
        return
    if isinstance(t, App):
        if pretty and _show_sugar(t, sorts, scope, out):
            return
        h, args = head_args(t)
        short = pretty and (_bare(h, scope) or (
            isinstance(h, Var) and h.name not in KEYWORDS
            and next((vt for vn, vt in reversed(scope) if vn == h.name), None) == h.type))
        out.append("(" if short else "(app ")
        _show(h, sorts, pretty, scope, out)
        for a in args:
            out.append(" ")
            _show(a, sorts, pretty, scope, out)
        out.append(")")
        return
    if isinstance(t, Lam):
        out.append(f"(lam ({_sym(t.var)} {ty(t.vtype)}) ")
        _show(t.body, sorts, pretty, scope + ((t.var, t.vtype),), out)
        out.append(")")
        return
    tag = {Eq: "eq", Pair: "pair", Proj1: "p1", Proj2: "p2"}[type(t)]
    out.append(f"({tag}")
    for child in ((t.left, t.right) if isinstance(t, (Eq, Pair)) else (t.arg,)):
        out.append(" ")
        _show(child, sorts, pretty, scope, out)
    out.append(")")


def _show_sugar(t: App, sorts, scope, out) -> bool:
    if words.is_word_term(t):
        out.append(f"(word {quote(words.decode(t))})")
        return True
    h, args = head_args(t)
    if not isinstance(h, Con):
        return False
    name = h.name

    def emit(tag, items, pre=""):
        out.append(f"({tag}{pre}")
        for a in items:
            out.append(" ")
            _show(a, sorts, True, scope, out)
        out.append(")")

    if h in (AND, OR, IMP) and len(args) == 2:
        emit(name, args)
        return True
    if h == NOT and len(args) == 1:
        emit("not", args)
        return True
    if name in ("exists", "forall") and len(args) == 1 and isinstance(args[0], Lam) \
            and h == quant_con(name, args[0].vtype):
        lam = args[0]
        out.append(f"({name} ({_sym(lam.var)} {show_type(lam.vtype, sorts)}) ")
        _show(lam.body, sorts, True, scope + ((lam.var, lam.vtype),), out)
        out.append(")")
        return True
    if name == "iota" and len(args) == 1 and isinstance(h.type, Fun) \
            and h == iota_con(h.type.cod):
        emit("iota", args)
        return True
    if name == "ite" and len(args) == 3 and h == ite_con(_safe_type(args[0])):
        emit("ite", args)
        return True
    c = sorts.resolve("c")
    if name in _STORE and 1 <= len(args) <= 3:
        rt = _safe_type(args[0])
        want = {"Setref": fun(rt, rt, c, c), "Unset": fun(rt, c, c),
                "Deref": fun(rt, c, rt)}[name] if rt is not None else None
        if h.type == want:
            emit(_STORE[name], args)
            return True
    if name in _INSTR and 1 <= len(args) <= 2 and h.type == fun(T, c, c):
        emit(_INSTR[name], args)
        return True
    return False


def _safe_type(t: Term):
    try:
        return typecheck(t)
    except Exception:
        return None
