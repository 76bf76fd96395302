"""Reference store over the context type.

A program is a c→c term; read as ``λz. I_k (... (I_1 z))`` it is a chain of
instructions executed innermost first.  ``resolve_refs`` rewrites
``Deref S ctx`` to the value of the nearest ``Setref S`` inside ``ctx``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .terms import App, Con, Eq, Lam, Pair, Proj1, Proj2, Term, Var, free_vars, fresh_name, head_args, normalize, typecheck
from .types import DEFAULT_SORTS, T, Fun, Type, fun

BASE_NAME = "ctx0"
STORE_OPS = ("Setref", "Unset", "Deref")
META_OPS = ("Assert", "Refute", "Test")


def base_context(c: Type = DEFAULT_SORTS.resolve("c")) -> Con:
    return Con(BASE_NAME, c)


def setref(sym: Term, value: Term, c: Type = DEFAULT_SORTS.resolve("c")) -> Term:
    ty = typecheck(sym)
    return App(App(Con("Setref", fun(ty, ty, c, c)), sym), value)


def unset(sym: Term, c: Type = DEFAULT_SORTS.resolve("c")) -> Term:
    return App(Con("Unset", fun(typecheck(sym), c, c)), sym)


def deref(sym: Term, ctx: Term) -> Term:
    ty = typecheck(sym)
    c = typecheck(ctx)
    return App(App(Con("Deref", fun(ty, c, ty)), sym), ctx)


def meta(name: str, formula: Term, c: Type = DEFAULT_SORTS.resolve("c")) -> Term:
    if name not in META_OPS:
        raise ValueError(name)
    return App(Con(name, fun(T, c, c)), formula)


# -- instructions ------------------------------------------------------------------

@dataclass(frozen=True)
class Setref:
    ref: Term
    value: Term


@dataclass(frozen=True)
class Unset:
    ref: Term


@dataclass(frozen=True)
class Assert:
    formula: Term


@dataclass(frozen=True)
class Refute:
    formula: Term


@dataclass(frozen=True)
class Test:
    formula: Term


@dataclass(frozen=True)
class Opaque:
    term: Term


Instruction = Union[Setref, Unset, Assert, Refute, Test, Opaque]


def classify(instr: Term) -> Instruction:
    """Instruction value for a c→c term (the context argument not applied)."""
    head, args = head_args(instr)
    if isinstance(head, Con):
        if head.name == "Setref" and len(args) == 2:
            return Setref(args[0], args[1])
        if head.name == "Unset" and len(args) == 1:
            return Unset(args[0])
        if head.name in META_OPS and len(args) == 1:
            return {"Assert": Assert, "Refute": Refute, "Test": Test}[head.name](args[0])
    return Opaque(instr)


def as_term(instr: Instruction, c: Type = DEFAULT_SORTS.resolve("c")) -> Term:
    if isinstance(instr, Setref):
        return setref(instr.ref, instr.value, c)
    if isinstance(instr, Unset):
        return unset(instr.ref, c)
    if isinstance(instr, Opaque):
        return instr.term
    return meta(type(instr).__name__, instr.formula, c)


def _peel(ctx: Term):
    """(instruction term, inner context) for ``I ctx'``, else None."""
    if not isinstance(ctx, App):
        return None
    head, args = head_args(ctx)
    if isinstance(head, Con):
        if head.name == "Setref" and len(args) == 3:
            return App(App(head, args[0]), args[1]), args[2]
        if head.name in ("Unset",) + META_OPS and len(args) == 2:
            return App(head, args[0]), args[1]
    return ctx.fn, ctx.arg


def decompose(program: Term) -> tuple:
    """Instructions of ``program`` in execution order (first executed first).

    The chain stops at the bound context variable; anything that does not
    peel apart cleanly becomes a single Opaque instruction.
    """
    p = normalize(program)
    ty = typecheck(p)
    if not (isinstance(ty, Fun) and ty.dom == ty.cod):
        raise TypeError(f"program must have type c→c, found {ty}")
    c = ty.dom
    if not isinstance(p, Lam):
        z = fresh_name("z", {n for n, _ in free_vars(p)})
        p = Lam(z, c, App(p, Var(z, c)))
    z = Var(p.var, c)
    body = p.body
    out = []
    while body != z:
        peeled = _peel(body)
        if peeled is None:
            return (Opaque(p),)
        instr, inner = peeled
        if typecheck(inner) != c:
            return (Opaque(p),)
        out.append(classify(normalize(instr)))
        body = inner
    out.reverse()
    return tuple(out)


def compose_program(instrs, c: Type = DEFAULT_SORTS.resolve("c")) -> Term:
    """Inverse of ``decompose``."""
    body: Term = Var("z", c)
    for ins in instrs:
        body = App(as_term(ins, c), body)
    return normalize(Lam("z", c, body))


# -- dereferencing ------------------------------------------------------------------

def lookup(sym: Term, ctx: Term, history=()) -> Term | None:
    """Value of ``Deref sym ctx`` or None when it stays inert.

    ``history`` lists earlier executed instructions, most recent first; it
    stands behind a context that bottoms out in a variable.
    """
    while True:
        head, args = head_args(ctx)
        if isinstance(head, Con) and head.name == "Setref" and len(args) == 3:
            if args[0] == sym:
                return args[1]
            ctx = args[2]
        elif isinstance(head, Con) and head.name == "Unset" and len(args) == 2:
            if args[0] == sym:
                return None
            ctx = args[1]
        elif isinstance(head, Con) and head.name in META_OPS and len(args) == 2:
            ctx = args[1]
        elif isinstance(ctx, Var) or (isinstance(ctx, Con) and ctx.name == BASE_NAME):
            for ins in history:
                if isinstance(ins, Setref) and ins.ref == sym:
                    return ins.value
                if isinstance(ins, Unset) and ins.ref == sym:
                    return None
                if isinstance(ins, Opaque):
                    return None
            return None
        else:
            return None


def _resolve(t: Term, history) -> Term:
    # the value sits literally inside the context argument at the same site,
    # so substituting it cannot capture anything
    if isinstance(t, App):
        fn, arg = _resolve(t.fn, history), _resolve(t.arg, history)
        if isinstance(fn, App) and isinstance(fn.fn, Con) and fn.fn.name == "Deref":
            val = lookup(fn.arg, arg, history)
            if val is not None:
                return val
        return t if (fn is t.fn and arg is t.arg) else App(fn, arg)
    if isinstance(t, Lam):
        body = _resolve(t.body, history)
        return t if body is t.body else Lam(t.var, t.vtype, body)
    if isinstance(t, (Eq, Pair)):
        return type(t)(_resolve(t.left, history), _resolve(t.right, history))
    if isinstance(t, (Proj1, Proj2)):
        return type(t)(_resolve(t.arg, history))
    return t


def resolve_refs(term: Term, history=(), simplify_result: bool = False) -> Term:
    """Rewrite resolvable ``Deref`` applications to fixpoint."""
    cur = normalize(term)
    for _ in range(64):
        nxt = normalize(_resolve(cur, tuple(history)))
        if nxt == cur:
            break
        cur = nxt
    if simplify_result:
        from .equivalence import simplify
        cur = simplify(cur)
    return cur


def unresolved(term: Term) -> list:
    """Reference symbols of ``Deref`` applications still present."""
    out = []

    def walk(t):
        if isinstance(t, App):
            if isinstance(t.fn, App) and isinstance(t.fn.fn, Con) and t.fn.fn.name == "Deref":
                if t.fn.arg not in out:
                    out.append(t.fn.arg)
            walk(t.fn)
            walk(t.arg)
        elif isinstance(t, Lam):
            walk(t.body)
        else:
            for name in ("left", "right", "arg"):
                sub = getattr(t, name, None)
                if isinstance(sub, Term):
                    walk(sub)

    walk(term)
    return out
