"""Recursive grammars: components, typing, semantic rules and axioms.

Meanings are stored at canonical types (see ``isos``).  A component's
body is one of the operator dataclasses below; operands are referenced by
component name, and sub-expressions of the DSL become anonymous
components.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace as dc_replace
from typing import Union

from . import words
from .equivalence import dedupe, equivalent
from .isos import (IsoMismatch, apply_canon, canon_result_type, canon_type, to_canon)
from .terms import (FALSE, STAR, App, Con, Eq, Lam, Pair, Proj1, Proj2, Term, Var, conj, disj,
                    exists, fresh_name, free_vars, normalize, typecheck, IllTyped, POLY_CONSTANTS,
                    constants)
from .types import DEFAULT_SORTS, T, UNIT, Fun, Prod, Sorts, Type, fun, show_type


class GrammarError(Exception):
    pass


class UnknownComponent(GrammarError):
    def __init__(self, name: str, line: int | None = None, referrer: str | None = None):
        self.name, self.line, self.referrer = name, line, referrer
        where = f"line {line}: " if line else ""
        by = f" (referenced from {referrer})" if referrer else ""
        super().__init__(f"{where}unknown component {name}{by}")


class TypeMismatch(GrammarError):
    def __init__(self, component: str, expected, found, line: int | None = None):
        self.component, self.expected, self.found, self.line = component, expected, found, line
        where = f"line {line}: " if line else ""
        super().__init__(f"{where}type mismatch in {component}: expected {expected}, found {found}")


# -- semantic rules ------------------------------------------------------------

@dataclass(frozen=True)
class Functional:
    fn: Term


@dataclass(frozen=True)
class Table:
    cases: tuple  # ((input, (output, ...)), ...)


@dataclass(frozen=True)
class LexiconAsRule:
    name: str
    lexicon: "Lexicon"


SemanticRule = Union[Functional, Table, LexiconAsRule]


# -- component bodies ---------------------------------------------------------

@dataclass(frozen=True)
class Lexicon:
    meaning_type: Type
    entries: tuple  # ((word, meaning), ...)


@dataclass(frozen=True)
class Join:
    left: str
    right: str


@dataclass(frozen=True)
class Concat:
    left: str
    right: str


@dataclass(frozen=True)
class PhraseConcat:
    left: str
    right: str


@dataclass(frozen=True)
class AnaphoricConcat:
    left: str
    right: str


@dataclass(frozen=True)
class CataphoricConcat:
    left: str
    right: str


@dataclass(frozen=True)
class RuleApp:
    arg: str
    rule: SemanticRule


@dataclass(frozen=True)
class FunApp:
    arg: str
    fn: Term


@dataclass(frozen=True)
class Raise:
    arg: str
    fn: Term


@dataclass(frozen=True)
class Instantiate:
    arg: str
    context: Term


@dataclass(frozen=True)
class SelfExtend:
    arg: str


BINARY = (Concat, PhraseConcat, AnaphoricConcat, CataphoricConcat)
SPACED = (PhraseConcat, AnaphoricConcat, CataphoricConcat)
UNARY = (RuleApp, FunApp, Raise, Instantiate, SelfExtend)


def children(body) -> list:
    if isinstance(body, Lexicon):
        return []
    if isinstance(body, (Join,) + BINARY):
        return [body.left, body.right]
    return [body.arg]


@dataclass(frozen=True)
class Component:
    name: str
    body: object
    declared: Type | None = None
    anonymous: bool = False
    line: int | None = None


def _reserved(name: str) -> bool:
    from .sexpr import KEYWORDS
    return (name in KEYWORDS or name in POLY_CONSTANTS or name.startswith(words.SYM_PREFIX)
            or name in (words.EMPTY_NAME, words.CAT_NAME, "true", "false", "star",
                        "Assert", "Refute", "Test"))


@dataclass(frozen=True)
class Grammar:
    components: tuple
    alphabet: words.Alphabet = words.DEFAULT_ALPHABET
    sorts: Sorts = DEFAULT_SORTS
    main: str | None = None
    constants: tuple = ()   # declared Con values, for reading and printing terms
    definitions: tuple = () # (name, term) macros from `define`
    _by_name: dict = field(default=None, compare=False, hash=False, repr=False)
    _types: dict = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_by_name", {c.name: c for c in self.components})

    def __getitem__(self, name: str) -> Component:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownComponent(name) from None

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    @property
    def names(self) -> list:
        return [c.name for c in self.components]

    @property
    def named(self) -> list:
        return [c for c in self.components if not c.anonymous]

    @property
    def c(self) -> Type:
        return self.sorts.resolve("c")

    @property
    def s(self) -> Type:
        return self.sorts.resolve("s")

    def type_of(self, name: str) -> Type:
        if self._types is None:
            object.__setattr__(self, "_types", validate(self).types)
        return self._types[name]

    def with_entry(self, lexicon: str, word: str, meaning: Term) -> "Grammar":
        """A new grammar whose lexicon ``lexicon`` has one more entry."""
        comp = self[lexicon]
        if not isinstance(comp.body, Lexicon):
            raise GrammarError(f"{lexicon} is not a lexicon")
        m = to_canon(meaning)
        if typecheck(m) != comp.body.meaning_type:
            raise TypeMismatch(lexicon, comp.body.meaning_type, typecheck(m))
        lex = Lexicon(comp.body.meaning_type, comp.body.entries + ((word, m),))
        new = dc_replace(comp, body=lex)
        comps = []
        for c in self.components:
            if c.name == lexicon:
                comps.append(new)
            elif isinstance(c.body, RuleApp) and isinstance(c.body.rule, LexiconAsRule) \
                    and c.body.rule.name == lexicon:
                comps.append(dc_replace(c, body=RuleApp(c.body.arg, LexiconAsRule(lexicon, lex))))
            else:
                comps.append(c)
        known = {c.name for c in self.constants}
        added = sorted((k for k in constants(m) if k.name not in known and not _reserved(k.name)),
                       key=lambda k: k.name)
        return dc_replace(self, components=tuple(comps), constants=self.constants + tuple(added),
                          _types=None)

    def env(self):
        """Reader environment knowing the grammar's constants."""
        from .sexpr import Env
        return Env(self.sorts, {c.name: c for c in self.constants}, dict(self.definitions))

    def show(self, term: Term) -> str:
        from .sexpr import show
        return show(term, self.sorts, known=self.constants)


# -- monadic helpers -------------------------------------------------------------

def split_monadic(m: Term, c: Type):
    """(context change, value part or None) of a canonical monadic meaning."""
    ty = typecheck(m)
    cc = Fun(c, c)
    if ty == cc:
        return m, None
    if isinstance(ty, Prod) and ty.left == cc:
        return normalize(Proj1(m)), normalize(Proj2(m))
    raise IsoMismatch("context-dependent type", ty)


def monadic_value_type(ty: Type, c: Type):
    cc = Fun(c, c)
    if ty == cc:
        return UNIT
    if isinstance(ty, Prod) and ty.left == cc:
        return ty.right
    raise IsoMismatch("context-dependent type", ty)


def pair_opt(a: Term | None, b: Term | None) -> Term:
    if a is None or typecheck(a) == UNIT:
        return STAR if b is None else b
    if b is None or typecheck(b) == UNIT:
        return a
    return Pair(a, b)


def compose_c(f: Term, g: Term, c: Type) -> Term:
    """f ∘ g on the context type (f may be a canonical tuple of c-functions)."""
    fty = typecheck(f)
    if isinstance(fty, Prod):
        return Pair(compose_c(normalize(Proj1(f)), g, c), compose_c(normalize(Proj2(f)), g, c))
    z = fresh_name("z", {n for n, _ in free_vars(f) | free_vars(g)})
    return normalize(Lam(z, c, App(f, App(g, Var(z, c)))))


def anaphoric(m1: Term, m2: Term, c: Type) -> Term:
    """Left-to-right threading: (x2∘x1, y1, y2∘x1)."""
    x1, y1 = split_monadic(m1, c)
    x2, y2 = split_monadic(m2, c)
    y2r = None if y2 is None else compose_c(y2, x1, c)
    return pair_opt(compose_c(x2, x1, c), pair_opt(y1, y2r) if (y1 is not None or y2r is not None) else None)


def cataphoric(m1: Term, m2: Term, c: Type) -> Term:
    """Right-to-left threading: (x1∘x2, y1∘x2, y2)."""
    x1, y1 = split_monadic(m1, c)
    x2, y2 = split_monadic(m2, c)
    y1r = None if y1 is None else compose_c(y1, x2, c)
    return pair_opt(compose_c(x1, x2, c), pair_opt(y1r, y2) if (y1r is not None or y2 is not None) else None)


def raise_meaning(m: Term, fn: Term, c: Type) -> Term:
    """(F m, λz. m): a regular meaning lifted to the context-dependent type."""
    change = apply_canon(to_canon(fn), m)
    if typecheck(change) != Fun(c, c):
        raise IsoMismatch(Fun(c, c), typecheck(change))
    z = fresh_name("z", {n for n, _ in free_vars(m)})
    value = to_canon(Lam(z, c, m)) if typecheck(m) != UNIT else None
    return pair_opt(change, value)


def instantiate(m: Term, context: Term, c: Type) -> Term:
    _, y = split_monadic(m, c)
    return STAR if y is None else apply_canon(y, context)


def concat_meaning(m1: Term, m2: Term) -> Term:
    return pair_opt(m1, m2)


def apply_rule(rule: SemanticRule, value: Term) -> list:
    if isinstance(rule, Functional):
        try:
            return [apply_canon(to_canon(rule.fn), value)]
        except IsoMismatch as exc:
            raise TypeMismatch("rule", exc.expected, exc.found) from None
    if isinstance(rule, Table):
        out = []
        for inp, outs in rule.cases:
            if typecheck(inp) == typecheck(value) and equivalent(inp, value):
                out.extend(outs)
        return list(dedupe(out)) if out else []
    if isinstance(rule, LexiconAsRule):
        try:
            w = words.decode(value)
        except words.NotAWordTerm:
            raise TypeMismatch(rule.name, "word term", typecheck(value)) from None
        return [m for word, m in rule.lexicon.entries if word == w]
    raise TypeError(rule)


def placeholder(comp: str, ctype: Type, word: str, s: Type) -> Term:
    """Inert translation placeholder for ``word`` in ``component``."""
    rel = Con(comp, fun(s, ctype, T))
    tau = Con("tau", fun(Fun(s, Fun(ctype, T)), s, ctype))
    return App(App(tau, rel), words.encode(word, None, s=s))


# -- typing ------------------------------------------------------------------------

@dataclass
class Validation:
    types: dict
    warnings: list


def validate(g: Grammar) -> Validation:
    types: dict = {}
    busy: set = set()

    def tyof(name: str, referrer: Component | None = None) -> Type:
        if name in types:
            return types[name]
        if name not in g:
            raise UnknownComponent(name, referrer.line if referrer else None,
                                   referrer.name if referrer else None)
        comp = g[name]
        if name in busy:
            if comp.declared is None:
                raise TypeMismatch(name, "declared type for recursive component", "none", comp.line)
            return canon_type(comp.declared)
        busy.add(name)
        try:
            found = _body_type(comp, tyof, g)
        except IsoMismatch as exc:
            raise TypeMismatch(name, exc.expected, exc.found, comp.line) from None
        except IllTyped as exc:
            raise TypeMismatch(name, exc.expected, exc.found, comp.line) from None
        finally:
            busy.discard(name)
        if comp.declared is not None and canon_type(comp.declared) != found:
            raise TypeMismatch(name, show_type(canon_type(comp.declared)), show_type(found), comp.line)
        types[name] = found
        return found

    # named components first: every cycle passes through one of them
    for comp in sorted(g.components, key=lambda k: k.anonymous):
        tyof(comp.name)
    warnings = [f"EmptyComponent: {n} derives no string" for n in empty_components(g)]
    if g.main is not None and g.main not in g:
        raise UnknownComponent(g.main)
    return Validation({c.name: types[c.name] for c in g.components}, warnings)


def _body_type(comp: Component, tyof, g: Grammar) -> Type:
    body, c = comp.body, g.c
    sub = lambda n: tyof(n, comp)
    if isinstance(body, Lexicon):
        for w, m in body.entries:
            if typecheck(m) != body.meaning_type:
                raise TypeMismatch(comp.name, show_type(body.meaning_type), show_type(typecheck(m)),
                                   comp.line)
        return body.meaning_type
    if isinstance(body, Join):
        a, b = sub(body.left), sub(body.right)
        if a != b:
            raise TypeMismatch(comp.name, show_type(a), show_type(b), comp.line)
        return a
    if isinstance(body, (Concat, PhraseConcat)):
        return canon_type(Prod(sub(body.left), sub(body.right)))
    if isinstance(body, (AnaphoricConcat, CataphoricConcat)):
        a = monadic_value_type(sub(body.left), c)
        b = monadic_value_type(sub(body.right), c)
        return canon_type(Prod(Fun(c, c), Prod(a, b)))
    if isinstance(body, FunApp):
        return canon_result_type(canon_type(typecheck(body.fn)), sub(body.arg))
    if isinstance(body, RuleApp):
        arg = sub(body.arg)
        rule = body.rule
        if isinstance(rule, Functional):
            return canon_result_type(canon_type(typecheck(rule.fn)), arg)
        if isinstance(rule, LexiconAsRule):
            if arg != g.s:
                raise TypeMismatch(comp.name, "s", show_type(arg), comp.line)
            return rule.lexicon.meaning_type
        outs = {typecheck(o) for _, os_ in rule.cases for o in os_}
        for inp, _ in rule.cases:
            if typecheck(inp) != arg:
                raise TypeMismatch(comp.name, show_type(arg), show_type(typecheck(inp)), comp.line)
        if len(outs) != 1:
            raise TypeMismatch(comp.name, "uniform table output type", len(outs), comp.line)
        return outs.pop()
    if isinstance(body, Raise):
        arg = sub(body.arg)
        change = canon_result_type(canon_type(typecheck(body.fn)), arg)
        if change != Fun(c, c):
            raise TypeMismatch(comp.name, show_type(Fun(c, c)), show_type(change), comp.line)
        return canon_type(Prod(Fun(c, c), Fun(c, arg)))
    if isinstance(body, Instantiate):
        if typecheck(body.context) != c:
            raise TypeMismatch(comp.name, "c", show_type(typecheck(body.context)), comp.line)
        val = monadic_value_type(sub(body.arg), c)
        return canon_type(val) if val == UNIT else canon_result_type(val, c)
    if isinstance(body, SelfExtend):
        return sub(body.arg)
    raise TypeError(body)


def empty_components(g: Grammar) -> list:
    """Least fixpoint of 'derives some string'; the rest are empty."""
    live: set = set()
    changed = True
    while changed:
        changed = False
        for comp in g.components:
            if comp.name in live:
                continue
            body = comp.body
            if isinstance(body, Lexicon):
                ok = bool(body.entries)
            elif isinstance(body, Join):
                ok = body.left in live or body.right in live
            elif isinstance(body, BINARY):
                ok = body.left in live and body.right in live
            else:
                ok = body.arg in live
            if ok:
                live.add(comp.name)
                changed = True
    return [c.name for c in g.components if c.name not in live and not c.anonymous]


# -- canonic representations and axioms ---------------------------------------------

def lexicon_repr(lex: Lexicon, s: Type = None) -> Term:
    """λw λa ((w = /w1/) ∧ (a = A1)) ∨ ...; λw λa false when empty."""
    s = s or DEFAULT_SORTS.resolve("s")
    ty = lex.meaning_type
    w, a = Var("w", s), Var("a", ty)
    disjuncts = []
    for word, m in lex.entries:
        if typecheck(m) != ty:
            raise TypeMismatch("lexicon", show_type(ty), show_type(typecheck(m)))
        disjuncts.append(conj(Eq(w, words.encode(word, None, s=s)), Eq(a, m)))
    body: Term = FALSE
    for d in reversed(disjuncts):
        body = d if body == FALSE else disj(d, body)
    return Lam("w", s, Lam("a", ty, body))


@dataclass
class AxiomSet:
    formulas: list          # (component name, formula)
    constants: list         # relation constants, one per named component
    definitions: dict       # operator constant -> defining term
    compact: Term | None

    def expand(self, term: Term) -> Term:
        from .terms import replace
        for con, body in self.definitions.items():
            term = replace(term, con, body)
        return term


def relation_con(name: str, ty: Type, s: Type) -> Con:
    return Con(name, Fun(s, Fun(ty, T)))


class _Emitter:
    def __init__(self, g: Grammar):
        self.g = g
        self.s, self.c = g.s, g.c
        self.defs: dict = {}

    def rel_type(self, name):
        return Fun(self.s, Fun(self.g.type_of(name), T))

    def op(self, name: str, ty: Type, definition: Term) -> Con:
        con = Con(name, ty)
        self.defs.setdefault(con, definition)
        return con

    def expr(self, name: str) -> Term:
        """Relation term for component ``name``; anonymous ones are inlined."""
        comp = self.g[name]
        if not comp.anonymous:
            return relation_con(name, self.g.type_of(name), self.s)
        return self.body(comp)

    def body(self, comp: Component) -> Term:
        g, s = self.g, self.s
        b = comp.body
        out_ty = g.type_of(comp.name)
        rel_out = Fun(s, Fun(out_ty, T))
        if isinstance(b, Lexicon):
            return lexicon_repr(b, s)
        if isinstance(b, Join):
            x, y = Var("x", rel_out), Var("y", rel_out)
            w, a = Var("w", s), Var("a", out_ty)
            d = Lam("x", rel_out, Lam("y", rel_out, Lam("w", s, Lam("a", out_ty,
                    disj(App(App(x, w), a), App(App(y, w), a))))))
            return App(App(self.op("lor", Fun(rel_out, Fun(rel_out, rel_out)), d),
                           self.expr(b.left)), self.expr(b.right))
        if isinstance(b, BINARY):
            return self.binary(comp, b, out_ty)
        arg_ty = g.type_of(b.arg)
        rel_in = Fun(s, Fun(arg_ty, T))
        x = Var("x", rel_in)
        p, q = Var("p", arg_ty), Var("q", out_ty)
        w = Var("w", s)
        if isinstance(b, SelfExtend):
            tau = placeholder(b.arg, arg_ty, "", s).fn.fn
            d = Lam("x", rel_in, Lam("w", s, Lam("q", out_ty, disj(
                App(App(x, w), q), Eq(q, App(App(tau, x), w))))))
            return App(self.op("ext", Fun(rel_in, rel_out), d), self.expr(b.arg))
        rel = self.rule_relation(b, arg_ty, out_ty)
        rty = Fun(arg_ty, Fun(out_ty, T))
        r = Var("r", rty)
        d = Lam("x", rel_in, Lam("r", rty, Lam("w", s, Lam("q", out_ty, exists(
            "p", arg_ty, conj(App(App(x, w), p), App(App(r, p), q)))))))
        ra = self.op("ra", Fun(rel_in, Fun(rty, rel_out)), d)
        return App(App(ra, self.expr(b.arg)), rel)

    def rule_relation(self, b, arg_ty, out_ty) -> Term:
        p, q = Var("p", arg_ty), Var("q", out_ty)
        c = self.c
        if isinstance(b, FunApp) or (isinstance(b, RuleApp) and isinstance(b.rule, Functional)):
            fn = b.fn if isinstance(b, FunApp) else b.rule.fn
            val = apply_canon(to_canon(fn), p)
        elif isinstance(b, RuleApp) and isinstance(b.rule, LexiconAsRule):
            return relation_con(b.rule.name, out_ty, self.s)
        elif isinstance(b, RuleApp):
            body: Term = FALSE
            for inp, outs in reversed(b.rule.cases):
                for o in reversed(outs):
                    d = conj(Eq(p, inp), Eq(q, o))
                    body = d if body == FALSE else disj(d, body)
            return Lam("p", arg_ty, Lam("q", out_ty, body))
        elif isinstance(b, Raise):
            val = raise_meaning(p, b.fn, c)
        else:
            val = instantiate(p, b.context, c)
        return Lam("p", arg_ty, Lam("q", out_ty, Eq(q, val)))

    def binary(self, comp, b, out_ty) -> Term:
        g, s, c = self.g, self.s, self.c
        lt, rt = g.type_of(b.left), g.type_of(b.right)
        rl, rr = Fun(s, Fun(lt, T)), Fun(s, Fun(rt, T))
        rel_out = Fun(s, Fun(out_ty, T))
        x, y, w = Var("x", rl), Var("y", rr), Var("w", s)
        u, v = Var("u", s), Var("v", s)
        pl, pr = Var("pl", lt), Var("pr", rt)
        q = Var("q", out_ty)
        split = App(App(Con(words.CAT_NAME, fun(s, s, s)), u), v)
        if isinstance(b, SPACED):
            split = App(App(Con(words.CAT_NAME, fun(s, s, s)), u),
                        App(App(Con(words.CAT_NAME, fun(s, s, s)), words.encode(" ", None, s=s)), v))
        if isinstance(b, (Concat, PhraseConcat)):
            combined = concat_meaning(pl, pr)
            name = "wcat" if isinstance(b, Concat) else "pcat"
        elif isinstance(b, AnaphoricConcat):
            combined, name = anaphoric(pl, pr, c), "acat"
        else:
            combined, name = cataphoric(pl, pr, c), "ccat"
        body = exists("u", s, exists("v", s, exists("pl", lt, exists("pr", rt, conj(
            Eq(w, split), conj(App(App(x, u), pl), conj(App(App(y, v), pr), Eq(q, combined))))))))
        d = Lam("x", rl, Lam("y", rr, Lam("w", s, Lam("q", out_ty, body))))
        con = self.op(name, Fun(rl, Fun(rr, rel_out)), d)
        return App(App(con, self.expr(b.left)), self.expr(b.right))


def emit_axioms(g: Grammar) -> AxiomSet:
    validate(g)
    em = _Emitter(g)
    formulas, consts = [], []
    for comp in g.named:
        con = relation_con(comp.name, g.type_of(comp.name), g.s)
        consts.append(con)
        formulas.append((comp.name, Eq(con, em.body(comp))))
    compact = None
    main = g.main or (g.named[-1].name if g.named else None)
    if main is not None:
        ty = g.type_of(main)
        d = None
        for _, f in reversed(formulas):
            d = f if d is None else conj(f, d)
        con = relation_con(main, ty, g.s)
        from .terms import implies
        compact = Lam("w", g.s, Lam("a", ty, implies(
            d, App(App(con, Var("w", g.s)), Var("a", ty)))))
    return AxiomSet(formulas, consts, dict(em.defs), compact)
