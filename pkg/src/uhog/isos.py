"""Canonical forms under the standard type isomorphisms.

Meanings are kept at a canonical type where products never occur as a
function domain, function results are never products, and unit is erased
wherever it is not the whole type:

    (a * b) -> g  ~  a -> b -> g        g -> (a * b)  ~  (g -> a) * (g -> b)
    unit * a ~ a ~ a * unit             a -> unit ~ unit      unit -> a ~ a

``to_canon`` and ``from_canon`` build the witnessing terms.  With this,
a context-dependent meaning of type c -> (c * a) is the pair
(c -> c, c -> a), and a program c -> c is the same thing at a = unit.
"""
from __future__ import annotations

from functools import lru_cache

from .terms import (STAR, App, Lam, Pair, Proj1, Proj2, Term, Var, free_vars, fresh_name,
                    normalize, typecheck)
from .types import UNIT, Fun, Prod, Type


class IsoMismatch(TypeError):
    def __init__(self, expected, found):
        self.expected, self.found = expected, found
        super().__init__(f"expected {expected}, found {found}")


@lru_cache(maxsize=None)
def canon_type(ty: Type) -> Type:
    if isinstance(ty, Prod):
        l, r = canon_type(ty.left), canon_type(ty.right)
        if l == UNIT:
            return r
        if r == UNIT:
            return l
        return Prod(l, r)
    if isinstance(ty, Fun):
        d, g = canon_type(ty.dom), canon_type(ty.cod)
        return _arrow(d, g)
    return ty


def _arrow(d: Type, g: Type) -> Type:
    """Canonical type of d -> g for canonical d, g."""
    if d == UNIT:
        return g
    if isinstance(d, Prod):
        return _arrow(d.left, _arrow(d.right, g))
    if g == UNIT:
        return UNIT
    if isinstance(g, Prod):
        return Prod(_arrow(d, g.left), _arrow(d, g.right))
    return Fun(d, g)


def _fresh(base: str, *terms: Term) -> str:
    avoid = set()
    for t in terms:
        avoid |= {n for n, _ in free_vars(t)}
    return fresh_name(base, avoid)


def to_canon(m: Term) -> Term:
    """A term of type canon_type(typecheck(m)) isomorphic to ``m``."""
    return normalize(_to(m, typecheck(m)))


def from_canon(n: Term, ty: Type) -> Term:
    """Inverse of ``to_canon``: ``n`` has type canon_type(ty)."""
    found = typecheck(n)
    if found != canon_type(ty):
        raise IsoMismatch(canon_type(ty), found)
    return normalize(_from(n, ty))


def _to(m: Term, ty: Type) -> Term:
    if isinstance(ty, Prod):
        l, r = canon_type(ty.left), canon_type(ty.right)
        a, b = _to(Proj1(m), ty.left), _to(Proj2(m), ty.right)
        if l == UNIT:
            return b
        if r == UNIT:
            return a
        return Pair(a, b)
    if isinstance(ty, Fun):
        d = canon_type(ty.dom)
        if d == UNIT:
            return _to(App(m, _from(STAR, ty.dom)), ty.cod)
        return _abstract(d, lambda x: _to(App(m, _from(x, ty.dom)), ty.cod), m)
    if ty == UNIT:
        return STAR
    return m


def _abstract(d: Type, body_of, *avoid: Term) -> Term:
    """Canonical lambda over canonical domain ``d``, curried and distributed."""
    if isinstance(d, Prod):
        return _abstract(
            d.left,
            lambda a: _abstract(d.right, lambda b: body_of(Pair(a, b)), *avoid, a),
            *avoid)
    name = _fresh("x", *avoid)
    body = normalize(body_of(Var(name, d)))
    return _distribute(name, d, body)


def _distribute(name: str, d: Type, body: Term) -> Term:
    ty = typecheck(body)
    if ty == UNIT:
        return STAR
    if isinstance(ty, Prod):
        return Pair(_distribute(name, d, normalize(Proj1(body))),
                    _distribute(name, d, normalize(Proj2(body))))
    return Lam(name, d, body)


def _from(n: Term, ty: Type) -> Term:
    if isinstance(ty, Prod):
        l, r = canon_type(ty.left), canon_type(ty.right)
        if l == UNIT:
            return Pair(_from(STAR, ty.left), _from(n, ty.right))
        if r == UNIT:
            return Pair(_from(n, ty.left), _from(STAR, ty.right))
        return Pair(_from(Proj1(n), ty.left), _from(Proj2(n), ty.right))
    if isinstance(ty, Fun):
        name = _fresh("x", n)
        x = Var(name, ty.dom)
        return Lam(name, ty.dom, _from(apply_canon(n, _to(x, ty.dom)), ty.cod))
    if ty == UNIT:
        return STAR
    return n


def apply_canon(f: Term, arg: Term) -> Term:
    """Apply a canonical function-like term to a canonical argument.

    Products in the argument are fed one component at a time, products in
    the function are applied componentwise, and unit arguments vanish.
    """
    fty, aty = typecheck(f), typecheck(arg)
    if aty == UNIT:
        return f
    if isinstance(fty, Prod):
        return Pair(apply_canon(normalize(Proj1(f)), arg), apply_canon(normalize(Proj2(f)), arg))
    if isinstance(aty, Prod):
        return apply_canon(apply_canon(f, normalize(Proj1(arg))), normalize(Proj2(arg)))
    if isinstance(fty, Fun) and fty.dom == aty:
        return normalize(App(f, arg))
    if fty == UNIT:
        return f
    raise IsoMismatch(f"function accepting {aty}", fty)


def apply_iso(f: Term, arg: Term) -> Term:
    """Apply ``f`` to ``arg`` modulo the isomorphisms; result is canonical."""
    return apply_canon(to_canon(f), to_canon(arg))


def canon_result_type(fty: Type, aty: Type) -> Type:
    """Type of apply_canon(f, a) for canonical f: fty and a: aty."""
    if aty == UNIT:
        return fty
    if isinstance(fty, Prod):
        return Prod(canon_result_type(fty.left, aty), canon_result_type(fty.right, aty))
    if isinstance(aty, Prod):
        return canon_result_type(canon_result_type(fty, aty.left), aty.right)
    if isinstance(fty, Fun) and fty.dom == aty:
        return fty.cod
    if fty == UNIT:
        return fty
    raise IsoMismatch(f"function accepting {aty}", fty)
