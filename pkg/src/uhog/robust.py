"""Translation and expression operators, partial parsing, placeholder resolution."""
from __future__ import annotations

from dataclasses import dataclass, field

from . import words
from .chart import build_skeleton, parse, ParseResult
from .config import current
from .context import Ambiguous, NoParse
from .equivalence import canon_key, equivalent, simplify
from .grammar import (BINARY, SPACED, AnaphoricConcat, Concat, FunApp, Grammar, Instantiate,
                      Join, Lexicon, PhraseConcat, Raise, RuleApp, anaphoric, apply_rule,
                      cataphoric, concat_meaning, instantiate, placeholder, raise_meaning)
from .isos import apply_canon, to_canon
from .sexpr import quote, show
from .store import resolve_refs
from .terms import (App, Con, Eq, Lam, Pair, Proj1, Proj2, Term, head_args, normalize,
                    typecheck)
from .types import Fun, T


def holes(term: Term) -> frozenset:
    """(component, word) pairs of the translation placeholders inside ``term``."""
    found = set()

    def walk(t):
        head, args = head_args(t)
        if isinstance(head, Con) and head.name == "tau" and len(args) >= 2 \
                and isinstance(args[0], Con):
            try:
                found.add((args[0].name, words.decode(args[1])))
            except words.NotAWordTerm:
                pass
        for name in ("fn", "arg", "body", "left", "right"):
            sub = getattr(t, name, None)
            if isinstance(sub, Term):
                walk(sub)

    walk(term)
    return frozenset(found)


def is_placeholder(term: Term) -> bool:
    head, args = head_args(term)
    return isinstance(head, Con) and head.name in ("tau", "sigma") and len(args) == 2


@dataclass(frozen=True)
class PartialMeaning:
    meaning: Term
    holes: frozenset = field(default=None)

    def __post_init__(self):
        if self.holes is None:
            object.__setattr__(self, "holes", holes(self.meaning))

    def serialize(self) -> str:
        lines = [show(self.meaning)]
        lines += [f"(hole {comp} {quote(w)})" for comp, w in sorted(self.holes)]
        return "\n".join(lines)


# -- translation ------------------------------------------------------------------------

def translate(g: Grammar, component: str, word: str) -> Term:
    """The unique meaning of ``word``, or its translation placeholder when there is none."""
    res = parse(g, component, word)
    ms = list(res.meanings)
    if len(ms) > 1:
        raise Ambiguous(len(ms), "meanings")
    if ms:
        return ms[0]
    return placeholder(component, g.type_of(component), word, g.s)


def sigma(component: str, ctype, meaning: Term, s) -> Term:
    """Inert expression placeholder for ``meaning`` in ``component``."""
    rel = Con(component, Fun(s, Fun(ctype, T)))
    op = Con("sigma", Fun(Fun(s, Fun(ctype, T)), Fun(ctype, s)))
    return App(App(op, rel), meaning)


def express(g: Grammar, component: str, meaning: Term, depth: int | None = None):
    """A word whose meanings are exactly {meaning}, else the expression placeholder."""
    depth = current().express_depth if depth is None else depth
    target = simplify(to_canon(meaning))
    ctype = g.type_of(component)
    if typecheck(target) != ctype:
        from .grammar import TypeMismatch
        raise TypeMismatch(component, ctype, typecheck(target))
    body = g[component].body
    if isinstance(body, Lexicon):
        hits = list(dict.fromkeys(w for w, m in body.entries if equivalent(m, target)))
        if len(hits) > 1:
            raise Ambiguous(len(hits), "expressions")
        if hits:
            return hits[0]
        return sigma(component, ctype, target, g.s)
    key = canon_key(target)
    sk = build_skeleton(g)
    work = [current().express_work]
    for d in range(1, depth + 1):
        try:
            pool = _Enumerator(g, d, work).strings(component)
        except _OutOfWork:
            break
        for w in sorted(pool, key=lambda w: (len(w), w)):
            if key in pool[w]:
                res = parse(g, component, w, skeleton=sk)
                if res.meanings.keys() == frozenset([key]):
                    return w
    return sigma(component, ctype, target, g.s)


class _OutOfWork(Exception):
    pass


class _Enumerator:
    """Strings with partial meaning sets, by depth counted in named components."""

    def __init__(self, g: Grammar, depth: int, work: list | None = None):
        self.g, self.depth = g, depth
        self.cap = current().express_pool
        self.work = work if work is not None else [current().express_work]  # shared countdown
        self.memo: dict = {}

    def strings(self, comp: str) -> dict:
        return self.gen(comp, self.depth)

    def gen(self, comp: str, d: int) -> dict:
        """word -> set of meaning keys (meanings kept alongside)."""
        return {w: set(ms) for w, ms in self._gen(comp, d).items()}

    def _gen(self, comp: str, d: int) -> dict:
        c = self.g[comp]
        if not c.anonymous:
            if d <= 0:
                return {}
            d -= 1
        k = (comp, d)
        if k in self.memo:
            return self.memo[k]
        self.memo[k] = {}
        out: dict = {}
        body = c.body
        g = self.g

        def add(w, m):
            if len(out) >= self.cap and w not in out:
                return
            self.work[0] -= 1
            if self.work[0] < 0:
                raise _OutOfWork
            m = simplify(resolve_refs(normalize(m)))
            out.setdefault(w, {})[canon_key(m)] = m

        if isinstance(body, Lexicon):
            for w, m in body.entries:
                add(w, m)
        elif isinstance(body, Join):
            for side in (body.left, body.right):
                for w, ms in self._gen(side, d).items():
                    for m in ms.values():
                        add(w, m)
        elif isinstance(body, BINARY):
            left, right = self._gen(body.left, d), self._gen(body.right, d)
            sep = " " if isinstance(body, SPACED) else ""
            for w1, ms1 in sorted(left.items()):
                for w2, ms2 in sorted(right.items()):
                    for m1 in ms1.values():
                        for m2 in ms2.values():
                            if isinstance(body, (Concat, PhraseConcat)):
                                m = concat_meaning(m1, m2)
                            elif isinstance(body, AnaphoricConcat):
                                m = anaphoric(m1, m2, g.c)
                            else:
                                m = cataphoric(m1, m2, g.c)
                            add(w1 + sep + w2, m)
        else:
            for w, ms in self._gen(body.arg, d).items():
                for m in ms.values():
                    if isinstance(body, RuleApp):
                        results = apply_rule(body.rule, m)
                    elif isinstance(body, FunApp):
                        results = [apply_canon(to_canon(body.fn), m)]
                    elif isinstance(body, Raise):
                        results = [raise_meaning(m, body.fn, g.c)]
                    elif isinstance(body, Instantiate):
                        results = [instantiate(m, body.context, g.c)]
                    else:
                        results = [m]
                    for r in results:
                        add(w, r)
        self.memo[k] = out
        return out


# -- partial parsing -------------------------------------------------------------------

def partial_parse(g: Grammar, component: str, text: str) -> ParseResult:
    """Strict parse when it succeeds; otherwise the self-extended parse."""
    strict = parse(g, component, text)
    if len(strict.meanings):
        return strict
    res = parse(g, component, text, mode="partial")
    if not len(res.meanings):
        raise NoParse(text)
    return res


def resolve_placeholders(pm: PartialMeaning | Term, g: Grammar) -> PartialMeaning:
    """Substitute every hole that ``g`` now translates to exactly one meaning."""
    if not isinstance(pm, PartialMeaning):
        pm = PartialMeaning(pm)
    term = pm.meaning
    for comp, word in sorted(pm.holes):
        if comp not in g:
            continue
        res = parse(g, comp, word)
        if len(res.meanings) != 1:
            continue
        value = next(iter(res.meanings))
        term = _replace_placeholder(term, comp, word, value)
    term = simplify(normalize(term))
    return PartialMeaning(term)


def _replace_placeholder(term: Term, comp: str, word: str, value: Term) -> Term:
    def walk(t):
        head, args = head_args(t)
        if isinstance(head, Con) and head.name == "tau" and len(args) >= 2 \
                and isinstance(args[0], Con) and args[0].name == comp:
            try:
                if words.decode(args[1]) == word:
                    out = value
                    for a in args[2:]:
                        out = App(out, walk(a))
                    return out
            except words.NotAWordTerm:
                pass
        if isinstance(t, App):
            return App(walk(t.fn), walk(t.arg))
        if isinstance(t, Lam):
            return Lam(t.var, t.vtype, walk(t.body))
        if isinstance(t, (Eq, Pair)):
            return type(t)(walk(t.left), walk(t.right))
        if isinstance(t, (Proj1, Proj2)):
            return type(t)(walk(t.arg))
        return t

    return walk(term)


def restore_expression(res: ParseResult) -> str | None:
    """Reassemble the input from the forest leaves, placeholders included."""
    root = (res.component, 0, len(res.input))
    if root not in res.forest:
        return None

    def build(item):
        comp, i, j = item
        ders = res.forest.get(item) or [()]
        kids = ders[0]
        if not kids:
            return res.input[i:j]
        gap = res.input[kids[0][2]:kids[-1][1]] if len(kids) == 2 else ""
        return gap.join(build(k) for k in kids) if len(kids) == 2 else build(kids[0])

    return build(root)
