"""Simple types: base sorts, functions and pairs.

Individual sorts are numbered e1..en; ``e`` is e1, ``c`` is e(n-1) and
``s`` is en.  Canonical names are stored, so aliases compare equal once
resolved through a :class:`Sorts` table.
"""
from __future__ import annotations

from dataclasses import dataclass


class Type:
    __slots__ = ()

    def __str__(self) -> str:
        return show_type(self)


@dataclass(frozen=True)
class Base(Type):
    name: str


@dataclass(frozen=True)
class Fun(Type):
    dom: Type
    cod: Type


@dataclass(frozen=True)
class Prod(Type):
    left: Type
    right: Type


@dataclass(frozen=True)
class TMeta(Type):
    """Type metavariable, only legal inside rewrite patterns."""
    name: str


@dataclass(frozen=True)
class Sorts:
    """Alias table for a theory with ``n`` individual sorts."""
    n: int = 3

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least two individual sorts")

    def resolve(self, name: str) -> Base:
        if name in ("t", "unit"):
            return Base(name)
        if name == "e":
            return Base("e1")
        if name == "s":
            return Base(f"e{self.n}")
        if name == "c":
            return Base(f"e{self.n - 1}")
        if name.startswith("e") and name[1:].isdigit():
            k = int(name[1:])
            if 1 <= k <= self.n:
                return Base(name)
        raise ValueError(f"unknown base type {name!r}")

    def alias(self, b: Base) -> str:
        if b.name == f"e{self.n}":
            return "s"
        if b.name == "e1":
            return "e"
        if b.name == f"e{self.n - 1}":
            return "c"
        return b.name


DEFAULT_SORTS = Sorts(3)
T = Base("t")
UNIT = Base("unit")
E = DEFAULT_SORTS.resolve("e")
C = DEFAULT_SORTS.resolve("c")
S = DEFAULT_SORTS.resolve("s")


def fun(*ts: Type) -> Type:
    """Curried arrow: fun(a, b, c) is a -> (b -> c)."""
    out = ts[-1]
    for a in reversed(ts[:-1]):
        out = Fun(a, out)
    return out


def show_type(ty: Type, sorts: Sorts = DEFAULT_SORTS) -> str:
    if isinstance(ty, Base):
        return sorts.alias(ty)
    if isinstance(ty, Fun):
        return f"(-> {show_type(ty.dom, sorts)} {show_type(ty.cod, sorts)})"
    if isinstance(ty, Prod):
        return f"(* {show_type(ty.left, sorts)} {show_type(ty.right, sorts)})"
    if isinstance(ty, TMeta):
        return ty.name
    raise TypeError(ty)


def has_tmeta(ty: Type) -> bool:
    if isinstance(ty, TMeta):
        return True
    if isinstance(ty, Fun):
        return has_tmeta(ty.dom) or has_tmeta(ty.cod)
    if isinstance(ty, Prod):
        return has_tmeta(ty.left) or has_tmeta(ty.right)
    return False


def match_type(pat: Type, ty: Type, env: dict) -> dict | None:
    """One-way matching of a type pattern; returns the extended env."""
    if isinstance(pat, TMeta):
        bound = env.get(pat.name)
        if bound is None:
            env = dict(env)
            env[pat.name] = ty
            return env
        return env if bound == ty else None
    if type(pat) is not type(ty):
        return None
    if isinstance(pat, Base):
        return env if pat == ty else None
    if isinstance(pat, Fun):
        env = match_type(pat.dom, ty.dom, env)
        return None if env is None else match_type(pat.cod, ty.cod, env)
    env = match_type(pat.left, ty.left, env)
    return None if env is None else match_type(pat.right, ty.right, env)


def subst_type(ty: Type, env: dict) -> Type:
    if isinstance(ty, TMeta):
        return env.get(ty.name, ty)
    if isinstance(ty, Fun):
        return Fun(subst_type(ty.dom, env), subst_type(ty.cod, env))
    if isinstance(ty, Prod):
        return Prod(subst_type(ty.left, env), subst_type(ty.right, env))
    return ty
