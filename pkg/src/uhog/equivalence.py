"""Decidable approximation of logical equivalence.

``simplify`` interleaves normalization with a data-driven rewrite
library (``rules.txt``, overridable through ``UHOG_RULES``) and finishes
with an AC canonicalization of conjunctions, disjunctions and equations.
``equivalent`` compares canonical keys.  The procedure is sound but
incomplete: ``True`` means provably equal, ``False`` means "not shown".
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from . import words
from .sexpr import Env, SexprError, parse_term, read_all, read_one, SList, Sym
from .terms import (AND, FALSE, TRUE, App, Con, Eq, IllTyped, Lam, MVar, NonTerminating, Pair,
                    Proj1, Proj2, Term, Var, DEFAULT_BUDGET, free_vars, head_args, normalize,
                    typecheck)
from .types import Type, has_tmeta, match_type, show_type, subst_type, DEFAULT_SORTS


class RuleError(ValueError):
    pass


@dataclass(frozen=True)
class RewriteRule:
    name: str
    lhs: Term
    rhs: Term
    conditions: tuple = ()

    @property
    def head(self):
        return _head_key(self.lhs)


def _head_key(t: Term):
    if isinstance(t, App):
        h, _ = head_args(t)
        if isinstance(h, Con):
            return h.name
        return "@"
    if isinstance(t, Eq):
        return "="
    if isinstance(t, MVar):
        return None
    return type(t).__name__


# -- rule files ---------------------------------------------------------------

_LINE = re.compile(r"^\s*([\w\-]+)\s*:\s*(.*?)\s*==>\s*(.*)$")


def parse_rules(text: str, sorts=DEFAULT_SORTS) -> list:
    env = Env(sorts=sorts, patterns=True)
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _LINE.match(line)
        if not m:
            raise RuleError(f"line {lineno}: expected 'name : LHS ==> RHS'")
        name, lhs_src, rest = m.groups()
        rhs_src, conds = rest, []
        if " where " in " " + rest:
            idx = (" " + rest).index(" where ")
            rhs_src, cond_src = rest[:idx], rest[idx + len(" where") :]
            conds = [_condition(c, lineno) for c in read_all(cond_src)]
        try:
            lhs = parse_term(read_one(lhs_src), env)
            rhs = parse_term(read_one(rhs_src), env)
        except SexprError as exc:
            raise RuleError(f"line {lineno}: {exc}") from None
        out.append(RewriteRule(name, lhs, rhs, tuple(conds)))
    return out


def _condition(x, lineno):
    if not (isinstance(x, SList) and x.items and all(isinstance(i, Sym) for i in x.items)):
        raise RuleError(f"line {lineno}: malformed condition")
    name, *args = [i.name for i in x.items]
    if name not in CONDITIONS:
        raise RuleError(f"line {lineno}: unknown condition {name}")
    return (name, tuple(args))


def rules_path() -> str:
    return os.environ.get("UHOG_RULES") or str(resources.files("uhog") / "rules.txt")


@lru_cache(maxsize=8)
def _load(path: str, mtime: float):
    with open(path, encoding="utf-8") as fh:
        return RuleSet(tuple(parse_rules(fh.read())))


def default_rules() -> "RuleSet":
    path = rules_path()
    return _load(path, os.path.getmtime(path))


@dataclass(frozen=True)
class RuleSet:
    rules: tuple
    _index: dict = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        idx: dict = {}
        for r in self.rules:
            idx.setdefault(r.head, []).append(r)
        object.__setattr__(self, "_index", idx)

    def __hash__(self):
        return hash(tuple(r.name for r in self.rules))

    def for_head(self, key):
        return self._index.get(key, ())

    def without(self, *names) -> "RuleSet":
        return RuleSet(tuple(r for r in self.rules if r.name not in names))

    def only(self, *names) -> "RuleSet":
        return RuleSet(tuple(r for r in self.rules if r.name in names))

    @property
    def names(self):
        return [r.name for r in self.rules]


# -- matching -----------------------------------------------------------------

RESIDUAL = "__residual__"


def flatten(t: Term, op: Con) -> list:
    out, stack = [], [t]
    while stack:
        x = stack.pop()
        if isinstance(x, App) and isinstance(x.fn, App) and x.fn.fn == op:
            stack.append(x.arg)
            stack.append(x.fn.arg)
        else:
            out.append(x)
    return out


def rebuild(items: list, op: Con) -> Term:
    if not items:
        return TRUE if op == AND else FALSE
    out = items[-1]
    for x in reversed(items[:-1]):
        out = App(App(op, x), out)
    return out


def _ac_op(p: Term):
    if isinstance(p, App) and isinstance(p.fn, App) and isinstance(p.fn.fn, Con) \
            and p.fn.fn.name in ("and", "or") and p.fn.fn.type == AND.type:
        return p.fn.fn
    return None


def _rename_bound(body: Term, old: str, ty: Type, new: str):
    from .terms import subst
    if old == new:
        return body
    if (new, ty) in free_vars(body):
        return None
    return subst(body, old, ty, Var(new, ty))


def match(pat: Term, t: Term, b: dict, root: bool = False):
    """Yield extended bindings for pattern ``pat`` against term ``t``."""
    if isinstance(pat, MVar):
        bound = b.get(pat.name)
        if bound is None:
            nb = dict(b)
            nb[pat.name] = t
            yield nb
        elif canon_key(bound) == canon_key(t):
            yield b
        return
    if isinstance(pat, Var):
        if pat.name.startswith("?"):
            bound = b.get(pat.name)
            if bound is None:
                if isinstance(t, Var):
                    tb = match_type(pat.type, t.type, b.get("__types__", {}))
                    if tb is not None:
                        nb = dict(b)
                        nb[pat.name] = (t.name, t.type)
                        nb["__types__"] = tb
                        yield nb
            elif isinstance(t, Var) and (t.name, t.type) == bound:
                yield b
        elif pat == t:
            yield b
        return
    if isinstance(pat, Con):
        if isinstance(t, Con) and t.name == pat.name:
            tb = match_type(pat.type, t.type, b.get("__types__", {}))
            if tb is not None:
                nb = dict(b)
                nb["__types__"] = tb
                yield nb
        return
    if isinstance(pat, App):
        op = _ac_op(pat)
        if op is not None:
            yield from _match_ac(pat, t, b, op, root)
            return
        if isinstance(t, App):
            for b1 in match(pat.fn, t.fn, b):
                yield from match(pat.arg, t.arg, b1)
        return
    if isinstance(pat, Lam):
        if not isinstance(t, Lam):
            return
        tb = match_type(pat.vtype, t.vtype, b.get("__types__", {}))
        if tb is None:
            return
        body = t.body
        if pat.var.startswith("?"):
            bound = b.get(pat.var)
            nb = dict(b)
            nb["__types__"] = tb
            if bound is None:
                nb[pat.var] = (t.var, t.vtype)
            else:
                if bound[1] != t.vtype:
                    return
                body = _rename_bound(body, t.var, t.vtype, bound[0])
                if body is None:
                    return
            yield from match(pat.body, body, nb)
        elif pat.var == t.var:
            nb = dict(b)
            nb["__types__"] = tb
            yield from match(pat.body, body, nb)
        return
    if isinstance(pat, Eq):
        if isinstance(t, Eq):
            for l, r in ((t.left, t.right), (t.right, t.left)):
                for b1 in match(pat.left, l, b):
                    yield from match(pat.right, r, b1)
        return
    if isinstance(pat, Pair):
        if isinstance(t, Pair):
            for b1 in match(pat.left, t.left, b):
                yield from match(pat.right, t.right, b1)
        return
    if isinstance(pat, (Proj1, Proj2)):
        if type(t) is type(pat):
            yield from match(pat.arg, t.arg, b)


def _match_ac(pat: App, t: Term, b: dict, op: Con, root: bool):
    if _ac_op(t) != op:
        return
    items = flatten(t, op)
    p1, p2 = pat.fn.arg, pat.arg
    for i, item in enumerate(items):
        rest = items[:i] + items[i + 1:]
        for b1 in match(p1, item, b):
            if isinstance(p2, MVar) and p2.name not in b1:
                nb = dict(b1)
                nb[p2.name] = rebuild(rest, op)
                yield nb
                continue
            for j, other in enumerate(rest):
                residual = rest[:j] + rest[j + 1:]
                if residual and not root:
                    continue
                for b2 in match(p2, other, b1):
                    if residual:
                        b2 = dict(b2)
                        b2[RESIDUAL] = (op, residual)
                    yield b2


def instantiate(pat: Term, b: dict) -> Term:
    types = b.get("__types__", {})
    if isinstance(pat, MVar):
        return b[pat.name]
    if isinstance(pat, Var):
        if pat.name.startswith("?"):
            name, ty = b[pat.name]
            return Var(name, ty)
        return pat
    if isinstance(pat, Con):
        return Con(pat.name, subst_type(pat.type, types))
    if isinstance(pat, App):
        head, args = head_args(pat)
        if isinstance(head, Con) and has_tmeta(subst_type(head.type, types)):
            return _instantiate_poly(head, [instantiate(a, b) for a in args], types)
        return App(instantiate(pat.fn, b), instantiate(pat.arg, b))
    if isinstance(pat, Lam):
        if pat.var.startswith("?"):
            name, ty = b[pat.var]
            return Lam(name, ty, instantiate(pat.body, b))
        return Lam(pat.var, subst_type(pat.vtype, types), instantiate(pat.body, b))
    if isinstance(pat, Eq):
        return Eq(instantiate(pat.left, b), instantiate(pat.right, b))
    if isinstance(pat, Pair):
        return Pair(instantiate(pat.left, b), instantiate(pat.right, b))
    if isinstance(pat, Proj1):
        return Proj1(instantiate(pat.arg, b))
    return Proj2(instantiate(pat.arg, b))


def _instantiate_poly(head: Con, args: list, types: dict) -> Term:
    """Polymorphic constant on the right-hand side only: read its type off the arguments."""
    ty, env = subst_type(head.type, types), {}
    for a in args:
        env = match_type(ty.dom, typecheck(a), env) or env
        ty = ty.cod
    out: Term = Con(head.name, subst_type(subst_type(head.type, types), env))
    for a in args:
        out = App(out, a)
    return out


def _cond_not_free(b, x, a):
    return tuple(b[x]) not in free_vars(b[a])


def _cond_conj_subset(b, a, c):
    have = {canon_key(x) for x in flatten(b[c], AND)}
    return all(canon_key(x) in have for x in flatten(b[a], AND))


CONDITIONS = {"not-free": _cond_not_free, "conj-subset": _cond_conj_subset}


def apply_rule_at(rule: RewriteRule, t: Term):
    """Rewrite ``t`` at its root with ``rule``; None when it does not apply."""
    for b in match(rule.lhs, t, {}, root=True):
        if not all(CONDITIONS[name](b, *args) for name, args in rule.conditions):
            continue
        out = instantiate(rule.rhs, b)
        if RESIDUAL in b:
            op, residual = b[RESIDUAL]
            out = rebuild([out] + list(residual), op)
        try:
            if typecheck(out) != typecheck(t):
                continue
        except IllTyped:
            continue
        return out
    return None


# -- simplification -------------------------------------------------------------

class _Steps:
    def __init__(self, budget):
        self.left, self.total = budget, budget

    def tick(self):
        self.left -= 1
        if self.left < 0:
            raise NonTerminating(self.total)


def _map_children(t: Term, f):
    if isinstance(t, App):
        fn, arg = f(t.fn), f(t.arg)
        return t if (fn is t.fn and arg is t.arg) else App(fn, arg)
    if isinstance(t, Lam):
        body = f(t.body)
        return t if body is t.body else Lam(t.var, t.vtype, body)
    if isinstance(t, (Eq, Pair)):
        l, r = f(t.left), f(t.right)
        return t if (l is t.left and r is t.right) else type(t)(l, r)
    if isinstance(t, (Proj1, Proj2)):
        a = f(t.arg)
        return t if a is t.arg else type(t)(a)
    return t


def _rewrite(t: Term, rules: RuleSet, steps: _Steps, trace) -> Term:
    t = _map_children(t, lambda c: _rewrite(c, rules, steps, trace))
    while True:
        for rule in rules.for_head(_head_key(t)):
            out = apply_rule_at(rule, t)
            if out is not None:
                steps.tick()
                if trace is not None:
                    trace.append(rule.name)
                t = out
                break
        else:
            return t


def _words(t: Term) -> Term:
    """Axioms for the symbolic type: re-associate literals, decide equality."""
    if isinstance(t, App) and words.is_word_term(t):
        return words.word_normal_form(t)
    t = _map_children(t, _words)
    if isinstance(t, Eq) and words.is_word_term(t.left) and words.is_word_term(t.right):
        return TRUE if words.decode(t.left) == words.decode(t.right) else FALSE
    return t


def simplify(term: Term, rules: RuleSet | None = None, budget: int | None = None,
             trace: list | None = None) -> Term:
    rules = default_rules() if rules is None else rules
    if budget is None:
        from .config import current
        budget = current().budget
    if trace is None:
        return _simplify_cached(term, rules, budget)
    return _simplify(term, rules, budget, trace)


@lru_cache(maxsize=50_000)
def _simplify_cached(term, rules, budget):
    return _simplify(term, rules, budget, None)


def _simplify(term, rules, budget, trace):
    steps = _Steps(budget)
    t = term
    while True:
        steps.tick()
        t1 = normalize(t, budget)
        t1 = _words(t1)
        t1 = _rewrite(t1, rules, steps, trace)
        t1 = normalize(t1, budget)
        t1 = canonical(t1)
        if t1 == t:
            return t
        t = t1


def rewrite_with(term: Term, rules: RuleSet) -> Term:
    """Only the given rules plus normalization; no canonical reordering."""
    steps = _Steps(DEFAULT_BUDGET)
    t = normalize(term)
    while True:
        t1 = normalize(_rewrite(t, rules, steps, None))
        if t1 == t:
            return t
        t = t1


# -- AC canonical form ------------------------------------------------------------

@lru_cache(maxsize=4096)
def _tkey(ty: Type) -> str:
    return show_type(ty)


def canonical(term: Term) -> Term:
    return _canon(term, ())[0]


def canon_key(term: Term) -> str:
    return _canon(term, ())[1]


@lru_cache(maxsize=200_000)
def _canon(t: Term, env: tuple):
    if isinstance(t, Var):
        for i in range(len(env) - 1, -1, -1):
            if env[i] == (t.name, t.type):
                return t, f"#{len(env) - 1 - i}"
        return t, f"v:{t.name}:{_tkey(t.type)}"
    if isinstance(t, Con):
        return t, f"k:{t.name}:{_tkey(t.type)}"
    if isinstance(t, MVar):
        return t, f"?{t.name}"
    if isinstance(t, App):
        op = _ac_op(t)
        if op is not None:
            seen = {}
            for item in flatten(t, op):
                ct, k = _canon(item, env)
                if k not in seen:
                    seen[k] = ct
            keys = sorted(seen)
            if len(keys) == 1:
                return seen[keys[0]], keys[0]
            term = rebuild([seen[k] for k in keys], op)
            return term, f"({op.name} {' '.join(keys)})"
        f, kf = _canon(t.fn, env)
        a, ka = _canon(t.arg, env)
        return App(f, a), f"(@ {kf} {ka})"
    if isinstance(t, Lam):
        body, kb = _canon(t.body, env + ((t.var, t.vtype),))
        return Lam(t.var, t.vtype, body), f"(\\{_tkey(t.vtype)} {kb})"
    if isinstance(t, Eq):
        (l, kl), (r, kr) = _canon(t.left, env), _canon(t.right, env)
        if kr < kl:
            (l, kl), (r, kr) = (r, kr), (l, kl)
        return Eq(l, r), f"(= {kl} {kr})"
    if isinstance(t, Pair):
        (l, kl), (r, kr) = _canon(t.left, env), _canon(t.right, env)
        return Pair(l, r), f"(, {kl} {kr})"
    a, ka = _canon(t.arg, env)
    tag = "p1" if isinstance(t, Proj1) else "p2"
    return type(t)(a), f"({tag} {ka})"


def key(term: Term, rules: RuleSet | None = None) -> str:
    """Equivalence key: terms with equal keys are provably equal."""
    return canon_key(simplify(term, rules))


def equivalent(a: Term, b: Term, rules: RuleSet | None = None) -> bool:
    if typecheck(a) != typecheck(b):
        return False
    return key(a, rules) == key(b, rules)


# -- generator sets ---------------------------------------------------------------

@dataclass
class GeneratorSet:
    type: Type | None
    terms: list = field(default_factory=list)
    _keys: dict = field(default_factory=dict, repr=False)
    truncated: bool = False

    def add(self, term: Term, rules: RuleSet | None = None, already_simple: bool = False) -> bool:
        t = term if already_simple else simplify(term, rules)
        k = canon_key(t)
        if k in self._keys:
            return False
        if self.type is None:
            self.type = typecheck(t)
        self._keys[k] = len(self.terms)
        self.terms.append(t)
        return True

    def __contains__(self, term: Term) -> bool:
        return key(term) in self._keys

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    def keys(self) -> frozenset:
        return frozenset(self._keys)

    def __eq__(self, other):
        if not isinstance(other, GeneratorSet):
            return NotImplemented
        return self.keys() == other.keys()

    def issubset(self, other: "GeneratorSet") -> bool:
        return self.keys() <= other.keys()


def dedupe(terms, rules: RuleSet | None = None) -> GeneratorSet:
    out = GeneratorSet(None)
    for t in terms:
        out.add(t, rules)
    return out
