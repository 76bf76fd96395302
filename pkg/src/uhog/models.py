"""Finite-model refutation: an independent check on the equivalence oracle.

Two closed terms are evaluated under every interpretation of their
non-logical constants over small base domains.  If some interpretation
separates them they are ``DISTINCT``; otherwise the answer is
``UNKNOWN`` (never "equal": small models prove nothing).
"""
from __future__ import annotations

import enum
import itertools

from . import words
from .terms import App, Con, Eq, Lam, Pair, Proj1, Proj2, Term, Var, constants, free_vars, typecheck
from .types import T, UNIT, Base, Fun, Prod, Type

LOGICAL = {"and", "or", "imp", "not", "true", "false", "star", "exists", "forall", "ite"}
MAX_INTERPRETATIONS = 300_000


class Verdict(enum.Enum):
    DISTINCT = "Distinct"
    UNKNOWN = "Unknown"


class Unsupported(ValueError):
    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


class _Domains:
    def __init__(self, sizes: dict, default: int, s_type: Type, c_type: Type):
        self.sizes, self.default = sizes, default
        self.s_type, self.c_type = s_type, c_type
        self._cache: dict = {}

    def elements(self, ty: Type) -> tuple:
        if ty in self._cache:
            return self._cache[ty]
        if ty == T:
            out = (False, True)
        elif ty == UNIT:
            out = (None,)
        elif ty == self.s_type:
            raise Unsupported("quantification over the symbolic type")
        elif ty == self.c_type:
            raise Unsupported("context type")
        elif isinstance(ty, Base):
            out = tuple(range(self.sizes.get(ty.name, self.default)))
        elif isinstance(ty, Prod):
            out = tuple(itertools.product(self.elements(ty.left), self.elements(ty.right)))
        else:
            dom, cod = self.elements(ty.dom), self.elements(ty.cod)
            if len(cod) ** len(dom) > MAX_INTERPRETATIONS:
                raise Unsupported(f"function space {ty} too large")
            out = tuple(itertools.product(cod, repeat=len(dom)))
        self._cache[ty] = out
        return out

    def index(self, ty: Type, value) -> int:
        key = ("idx", ty)
        idx = self._cache.get(key)
        if idx is None:
            idx = {v: i for i, v in enumerate(self.elements(ty))}
            self._cache[key] = idx
        return idx[value]


def _check_fragment(t: Term, dom: _Domains):
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, App) and words.is_word_term(x):
            continue
        if isinstance(x, Con):
            if x.type == dom.c_type or _mentions(x.type, dom.c_type):
                raise Unsupported("context type")
            if x.name == "iota":
                raise Unsupported("uninterpreted description operator")
            if x.type == dom.s_type and words.is_word_term(x):
                continue
            if _mentions(x.type, dom.s_type):
                raise Unsupported(f"symbolic-type constant {x.name}")
        if isinstance(x, Var) and (x.type == dom.c_type):
            raise Unsupported("context type")
        if isinstance(x, App):
            stack += [x.fn, x.arg]
        elif isinstance(x, Lam):
            if _mentions(x.vtype, dom.s_type) or _mentions(x.vtype, dom.c_type):
                raise Unsupported("binder over symbolic or context type")
            stack.append(x.body)
        elif isinstance(x, (Eq, Pair)):
            stack += [x.left, x.right]
        elif isinstance(x, (Proj1, Proj2)):
            stack.append(x.arg)


def _mentions(ty: Type, base: Type) -> bool:
    if ty == base:
        return True
    if isinstance(ty, Fun):
        return _mentions(ty.dom, base) or _mentions(ty.cod, base)
    if isinstance(ty, Prod):
        return _mentions(ty.left, base) or _mentions(ty.right, base)
    return False


def _compile(t: Term, dom: _Domains, scope: tuple, consts: dict):
    """Turn a term into a function of (env tuple, interpretation dict)."""
    if isinstance(t, App) and words.is_word_term(t) or (isinstance(t, Con) and t.type == dom.s_type):
        w = words.decode(t)
        return lambda env, I: w
    if isinstance(t, Var):
        pos = len(scope) - 1 - scope[::-1].index((t.name, t.type))
        return lambda env, I: env[pos]
    if isinstance(t, Con):
        return _constant(t, dom)
    if isinstance(t, App):
        f = _compile(t.fn, dom, scope, consts)
        a = _compile(t.arg, dom, scope, consts)
        aty = typecheck(t.arg)
        return lambda env, I: _apply(f(env, I), a(env, I), aty, dom)
    if isinstance(t, Lam):
        body = _compile(t.body, dom, scope + ((t.var, t.vtype),), consts)
        elems = dom.elements(t.vtype)
        return lambda env, I: tuple(body(env + (x,), I) for x in elems)
    if isinstance(t, Eq):
        l = _compile(t.left, dom, scope, consts)
        r = _compile(t.right, dom, scope, consts)
        return lambda env, I: l(env, I) == r(env, I)
    if isinstance(t, Pair):
        l = _compile(t.left, dom, scope, consts)
        r = _compile(t.right, dom, scope, consts)
        return lambda env, I: (l(env, I), r(env, I))
    a = _compile(t.arg, dom, scope, consts)
    k = 0 if isinstance(t, Proj1) else 1
    return lambda env, I: a(env, I)[k]


def _apply(f, x, aty, dom):
    if callable(f):
        return f(x)
    return f[dom.index(aty, x)]


def _constant(c: Con, dom: _Domains):
    name = c.name
    if name == "true":
        return lambda env, I: True
    if name == "false":
        return lambda env, I: False
    if name == "star":
        return lambda env, I: None
    if name in ("and", "or", "imp"):
        op = {"and": lambda a, b: a and b, "or": lambda a, b: a or b,
              "imp": lambda a, b: (not a) or b}[name]
        return lambda env, I: (lambda a: (lambda b: op(a, b)))
    if name == "not":
        return lambda env, I: (lambda a: not a)
    if name in ("exists", "forall"):
        agg = any if name == "exists" else all
        return lambda env, I: (lambda p: agg(p))
    if name == "ite":
        return lambda env, I: (lambda x: (lambda y: (lambda cnd: x if cnd else y)))
    if name == words.CAT_NAME:
        return lambda env, I: (lambda a: (lambda b: a + b))
    return lambda env, I: I[c]


def finite_model_refute(a: Term, b: Term, sizes: dict | None = None, default: int = 2,
                        s_type: Type | None = None, c_type: Type | None = None) -> Verdict:
    from .types import C, S
    ta, tb = typecheck(a), typecheck(b)
    if ta != tb:
        raise Unsupported("terms have different types")
    if free_vars(a) or free_vars(b):
        raise Unsupported("open term")
    dom = _Domains(dict(sizes or {}), default, s_type or S, c_type or C)
    for t in (a, b):
        _check_fragment(t, dom)
    if _mentions(ta, dom.s_type) and ta != dom.s_type:
        raise Unsupported("symbolic-type result")
    opaque = sorted({c for c in constants(a) | constants(b)
                     if c.name not in LOGICAL and not (c.type == dom.s_type)
                     and c.name != words.CAT_NAME},
                    key=lambda c: (c.name, str(c.type)))
    spaces = [dom.elements(c.type) for c in opaque]
    total = 1
    for sp in spaces:
        total *= len(sp)
        if total > MAX_INTERPRETATIONS:
            raise Unsupported("too many interpretations")
    fa = _compile(a, dom, (), {})
    fb = _compile(b, dom, (), {})
    for combo in itertools.product(*spaces):
        interp = dict(zip(opaque, combo))
        if fa((), interp) != fb((), interp):
            return Verdict.DISTINCT
    return Verdict.UNKNOWN
