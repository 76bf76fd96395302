"""Typed lambda terms: typing, substitution, alpha-equivalence, normal forms."""
from __future__ import annotations

import sys
from dataclasses import dataclass, fields
from functools import lru_cache

from .types import T, UNIT, Fun, Prod, Type, fun, show_type

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

DEFAULT_BUDGET = 10_000


class IllTyped(TypeError):
    def __init__(self, path, expected, found):
        self.path, self.expected, self.found = tuple(path), expected, found
        where = "/".join(self.path) or "<root>"
        super().__init__(f"ill-typed at {where}: expected {expected}, found {found}")


class NonTerminating(RuntimeError):
    def __init__(self, budget):
        self.budget = budget
        super().__init__(f"reduction exceeded {budget} steps")


class Term:
    """Base class.  Subclasses are frozen dataclasses with a cached hash."""
    __slots__ = ()

    def _cached_hash(self):
        try:
            return self.__dict__["_h"]
        except KeyError:
            h = hash((type(self).__name__,) + tuple(getattr(self, f.name) for f in fields(self)))
            object.__setattr__(self, "_h", h)
            return h

    def __str__(self):
        from .sexpr import show
        return show(self)


@dataclass(frozen=True, eq=True)
class Var(Term):
    name: str
    type: Type


@dataclass(frozen=True, eq=True)
class Con(Term):
    name: str
    type: Type


@dataclass(frozen=True, eq=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True, eq=True)
class Lam(Term):
    var: str
    vtype: Type
    body: Term


@dataclass(frozen=True, eq=True)
class Eq(Term):
    left: Term
    right: Term


@dataclass(frozen=True, eq=True)
class Pair(Term):
    left: Term
    right: Term


@dataclass(frozen=True, eq=True)
class Proj1(Term):
    arg: Term


@dataclass(frozen=True, eq=True)
class Proj2(Term):
    arg: Term


@dataclass(frozen=True, eq=True)
class MVar(Term):
    """Pattern metavariable (rewrite rules only)."""
    name: str


for _cls in (Var, Con, App, Lam, Eq, Pair, Proj1, Proj2, MVar):
    _cls.__hash__ = Term._cached_hash


@dataclass(frozen=True)
class Binding:
    name: str
    type: Type
    replacement: Term

    def __post_init__(self):
        found = typecheck(self.replacement)
        if found != self.type:
            raise IllTyped((self.name,), self.type, found)


# -- distinguished constants -------------------------------------------------

AND = Con("and", fun(T, T, T))
OR = Con("or", fun(T, T, T))
IMP = Con("imp", fun(T, T, T))
NOT = Con("not", Fun(T, T))
TRUE = Con("true", T)
FALSE = Con("false", T)
STAR = Con("star", UNIT)

POLY_CONSTANTS = ("forall", "exists", "iota", "ite", "compose",
                  "Setref", "Deref", "Unset", "tau", "sigma")


def quant_con(name: str, ty: Type) -> Con:
    return Con(name, Fun(Fun(ty, T), T))


def iota_con(ty: Type) -> Con:
    return Con("iota", Fun(Fun(ty, T), ty))


def ite_con(ty: Type) -> Con:
    return Con("ite", fun(ty, ty, T, ty))


def app(f: Term, *args: Term) -> Term:
    for a in args:
        f = App(f, a)
    return f


def conj(a: Term, b: Term) -> Term:
    return App(App(AND, a), b)


def disj(a: Term, b: Term) -> Term:
    return App(App(OR, a), b)


def implies(a: Term, b: Term) -> Term:
    return App(App(IMP, a), b)


def neg(a: Term) -> Term:
    return App(NOT, a)


def exists(var: str, ty: Type, body: Term) -> Term:
    return App(quant_con("exists", ty), Lam(var, ty, body))


def forall(var: str, ty: Type, body: Term) -> Term:
    return App(quant_con("forall", ty), Lam(var, ty, body))


def ite(x: Term, y: Term, cond: Term) -> Term:
    return app(ite_con(typecheck(x)), x, y, cond)


def iota(pred: Term) -> Term:
    ty = typecheck(pred)
    return App(iota_con(ty.dom), pred)


def head_args(t: Term):
    """Split ``f a1 .. ak`` into (f, [a1..ak])."""
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def is_con(t: Term, name: str) -> bool:
    return isinstance(t, Con) and t.name == name


# -- typing ----------------------------------------------------------------

@lru_cache(maxsize=200_000)
def typecheck(term: Term) -> Type:
    return _tc(term, ())


def _tc(t: Term, path) -> Type:
    if isinstance(t, (Var, Con)):
        return t.type
    if isinstance(t, App):
        ft = _tc(t.fn, path + ("fn",))
        at = _tc(t.arg, path + ("arg",))
        if not isinstance(ft, Fun):
            raise IllTyped(path + ("fn",), "function type", ft)
        if ft.dom != at:
            raise IllTyped(path + ("arg",), ft.dom, at)
        return ft.cod
    if isinstance(t, Lam):
        return Fun(t.vtype, _tc(t.body, path + ("body",)))
    if isinstance(t, Eq):
        lt = _tc(t.left, path + ("left",))
        rt = _tc(t.right, path + ("right",))
        if lt != rt:
            raise IllTyped(path + ("right",), lt, rt)
        return T
    if isinstance(t, Pair):
        return Prod(_tc(t.left, path + ("left",)), _tc(t.right, path + ("right",)))
    if isinstance(t, (Proj1, Proj2)):
        pt = _tc(t.arg, path + ("arg",))
        if not isinstance(pt, Prod):
            raise IllTyped(path + ("arg",), "product type", pt)
        return pt.left if isinstance(t, Proj1) else pt.right
    raise IllTyped(path, "term", type(t).__name__)


def well_typed(term: Term) -> bool:
    try:
        typecheck(term)
        return True
    except IllTyped:
        return False


# -- variables ---------------------------------------------------------------

@lru_cache(maxsize=200_000)
def free_vars(term: Term) -> frozenset:
    if isinstance(term, Var):
        return frozenset([(term.name, term.type)])
    if isinstance(term, (Con, MVar)):
        return frozenset()
    if isinstance(term, Lam):
        return free_vars(term.body) - {(term.var, term.vtype)}
    if isinstance(term, (App,)):
        return free_vars(term.fn) | free_vars(term.arg)
    if isinstance(term, (Eq, Pair)):
        return free_vars(term.left) | free_vars(term.right)
    return free_vars(term.arg)


def constants(term: Term) -> set:
    out = set()
    stack = [term]
    while stack:
        t = stack.pop()
        if isinstance(t, Con):
            out.add(t)
        elif isinstance(t, App):
            stack += [t.fn, t.arg]
        elif isinstance(t, Lam):
            stack.append(t.body)
        elif isinstance(t, (Eq, Pair)):
            stack += [t.left, t.right]
        elif isinstance(t, (Proj1, Proj2)):
            stack.append(t.arg)
    return out


def fresh_name(base: str, avoid: set) -> str:
    cand = base
    while cand in avoid:
        cand += "'"
    return cand


def substitute(term: Term, binding: Binding) -> Term:
    return subst(term, binding.name, binding.type, binding.replacement)


def subst(term: Term, name: str, ty: Type, repl: Term) -> Term:
    key = (name, ty)
    if key not in free_vars(term):
        return term
    return _subst(term, key, repl, free_vars(repl))


def _subst(t: Term, key, repl, fv_repl) -> Term:
    if key not in free_vars(t):
        return t
    if isinstance(t, Var):
        return repl
    if isinstance(t, App):
        return App(_subst(t.fn, key, repl, fv_repl), _subst(t.arg, key, repl, fv_repl))
    if isinstance(t, Lam):
        var, body = t.var, t.body
        if (var, t.vtype) in fv_repl:
            avoid = {n for n, _ in fv_repl | free_vars(body)}
            new = fresh_name(var, avoid)
            body = _subst(body, (var, t.vtype), Var(new, t.vtype), frozenset([(new, t.vtype)]))
            var = new
        return Lam(var, t.vtype, _subst(body, key, repl, fv_repl))
    if isinstance(t, Eq):
        return Eq(_subst(t.left, key, repl, fv_repl), _subst(t.right, key, repl, fv_repl))
    if isinstance(t, Pair):
        return Pair(_subst(t.left, key, repl, fv_repl), _subst(t.right, key, repl, fv_repl))
    if isinstance(t, Proj1):
        return Proj1(_subst(t.arg, key, repl, fv_repl))
    if isinstance(t, Proj2):
        return Proj2(_subst(t.arg, key, repl, fv_repl))
    return t


def replace(term: Term, old: Term, new: Term) -> Term:
    """Replace every occurrence of the closed subterm ``old`` by ``new``."""
    if term == old:
        return new
    if isinstance(term, App):
        return App(replace(term.fn, old, new), replace(term.arg, old, new))
    if isinstance(term, Lam):
        return Lam(term.var, term.vtype, replace(term.body, old, new))
    if isinstance(term, Eq):
        return Eq(replace(term.left, old, new), replace(term.right, old, new))
    if isinstance(term, Pair):
        return Pair(replace(term.left, old, new), replace(term.right, old, new))
    if isinstance(term, Proj1):
        return Proj1(replace(term.arg, old, new))
    if isinstance(term, Proj2):
        return Proj2(replace(term.arg, old, new))
    return term


# -- alpha equivalence ----------------------------------------------------

def nameless(term: Term, env=()):
    """De Bruijn form as nested tuples; bound variables become indices."""
    if isinstance(term, Var):
        for i in range(len(env) - 1, -1, -1):
            if env[i] == (term.name, term.type):
                return ("b", len(env) - 1 - i)
        return ("v", term.name, term.type)
    if isinstance(term, Con):
        return ("k", term.name, term.type)
    if isinstance(term, App):
        return ("@", nameless(term.fn, env), nameless(term.arg, env))
    if isinstance(term, Lam):
        return ("\\", term.vtype, nameless(term.body, env + ((term.var, term.vtype),)))
    if isinstance(term, Eq):
        return ("=", nameless(term.left, env), nameless(term.right, env))
    if isinstance(term, Pair):
        return (",", nameless(term.left, env), nameless(term.right, env))
    if isinstance(term, Proj1):
        return ("p1", nameless(term.arg, env))
    if isinstance(term, Proj2):
        return ("p2", nameless(term.arg, env))
    return ("?", term.name)


def alpha_eq(a: Term, b: Term) -> bool:
    return a == b or nameless(a) == nameless(b)


# -- reduction ---------------------------------------------------------------

class _Budget:
    __slots__ = ("left", "total")

    def __init__(self, n):
        self.left = self.total = n

    def tick(self):
        self.left -= 1
        if self.left < 0:
            raise NonTerminating(self.total)


def normalize(term: Term, budget: int | None = None) -> Term:
    """Normal-order reduction to a beta/eta/projection/iota/ite normal form."""
    if budget is None:
        from .config import current
        budget = current().budget
    return _nf(term, _Budget(budget))


def _nf(t: Term, b: _Budget) -> Term:
    if isinstance(t, (Var, Con, MVar)):
        return t
    if isinstance(t, Lam):
        body = _nf(t.body, b)
        if (isinstance(body, App) and body.arg == Var(t.var, t.vtype)
                and (t.var, t.vtype) not in free_vars(body.fn)):
            b.tick()
            return body.fn
        return Lam(t.var, t.vtype, body)
    if isinstance(t, App):
        f = _nf(t.fn, b)
        if isinstance(f, Lam):
            b.tick()
            return _nf(subst(f.body, f.var, f.vtype, t.arg), b)
        a = _nf(t.arg, b)
        return _delta(App(f, a), b)
    if isinstance(t, Eq):
        return Eq(_nf(t.left, b), _nf(t.right, b))
    if isinstance(t, Pair):
        l, r = _nf(t.left, b), _nf(t.right, b)
        if isinstance(l, Proj1) and isinstance(r, Proj2) and l.arg == r.arg:
            b.tick()
            return l.arg
        return Pair(l, r)
    if isinstance(t, (Proj1, Proj2)):
        m = _nf(t.arg, b)
        if isinstance(m, Pair):
            b.tick()
            return m.left if isinstance(t, Proj1) else m.right
        return type(t)(m)
    return t


def _delta(t: App, b: _Budget) -> Term:
    f, a = t.fn, t.arg
    # ite x y true -> x ; ite x y false -> y
    if isinstance(a, Con) and a.name in ("true", "false") and a.type == T:
        h = f.fn.fn if isinstance(f, App) and isinstance(f.fn, App) else None
        if h is not None and is_con(h, "ite"):
            b.tick()
            return f.fn.arg if a.name == "true" else f.arg
    # iota (lam x. y = x) -> y, and the mirrored equation
    if is_con(f, "iota") and isinstance(a, Lam) and isinstance(a.body, Eq):
        x = Var(a.var, a.vtype)
        l, r = a.body.left, a.body.right
        for bound, other in ((r, l), (l, r)):
            if bound == x and (a.var, a.vtype) not in free_vars(other):
                b.tick()
                return other
    return t


def beta_eta_equal(a: Term, b: Term) -> bool:
    return alpha_eq(normalize(a), normalize(b))


# -- notational shortcuts -------------------------------------------------------

def _fresh_for(base: str, *terms: Term) -> str:
    avoid = set()
    for t in terms:
        avoid |= {n for n, _ in free_vars(t)}
    return fresh_name(base, avoid)


def pointwise(op: Con, a: Term, b: Term) -> Term:
    """Lift a binary connective to predicates: (A op B) x = A x op B x."""
    ty = typecheck(a)
    if ty == T:
        return app(op, a, b)
    x = _fresh_for("x", a, b)
    v = Var(x, ty.dom)
    return Lam(x, ty.dom, pointwise(op, App(a, v), App(b, v)))


def p_and(a: Term, b: Term) -> Term:
    return pointwise(AND, a, b)


def p_or(a: Term, b: Term) -> Term:
    return pointwise(OR, a, b)


def p_not(a: Term) -> Term:
    ty = typecheck(a)
    if ty == T:
        return neg(a)
    x = _fresh_for("x", a)
    return Lam(x, ty.dom, p_not(App(a, Var(x, ty.dom))))


def p_subset(a: Term, b: Term) -> Term:
    """A ⊃ B on predicates: for all x, A x implies B x."""
    ty = typecheck(a)
    if ty == T:
        return implies(a, b)
    x = _fresh_for("x", a, b)
    v = Var(x, ty.dom)
    return forall(x, ty.dom, p_subset(App(a, v), App(b, v)))


def times(a: Term, b: Term) -> Term:
    """A × B = λx λy (A x ∧ B y)."""
    ta, tb = typecheck(a), typecheck(b)
    x = _fresh_for("x", a, b)
    y = fresh_name("y", {x} | {n for n, _ in free_vars(a) | free_vars(b)})
    return Lam(x, ta.dom, Lam(y, tb.dom, conj(App(a, Var(x, ta.dom)), App(b, Var(y, tb.dom)))))


def eq_section(a: Term) -> Term:
    """(= A) = λx (x = A)."""
    ty = typecheck(a)
    x = _fresh_for("x", a)
    return Lam(x, ty, Eq(Var(x, ty), a))


def eq_rel(ty: Type) -> Term:
    """(=) at type ty -> ty -> t."""
    return Lam("x", ty, Lam("y", ty, Eq(Var("x", ty), Var("y", ty))))


def identity(ty: Type) -> Term:
    return Lam("x", ty, Var("x", ty))


def compose(f: Term, g: Term) -> Term:
    """f ∘ g = λx f (g x)."""
    tg = typecheck(g)
    x = _fresh_for("x", f, g)
    return Lam(x, tg.dom, App(f, App(g, Var(x, tg.dom))))


def show_term_type(term: Term) -> str:
    return show_type(typecheck(term))

