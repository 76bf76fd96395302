"""Two-stage parsing: skeleton recognition, then semantic attribution.

Stage 1 treats every semantic rule as trivially non-degenerate and builds
a chart of (component, start, end) items over character positions.
Stage 2 walks the items reachable from the root bottom-up by span length,
computing generator sets of meanings and dropping degenerate rule
applications.
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field

from .equivalence import GeneratorSet, simplify
from .grammar import (BINARY, SPACED, AnaphoricConcat, Concat, FunApp, Grammar, Instantiate,
                      Join, Lexicon, PhraseConcat, Raise, RuleApp, SelfExtend, anaphoric,
                      apply_rule, cataphoric, concat_meaning, instantiate, placeholder,
                      raise_meaning)
from .isos import apply_canon, to_canon
from .sexpr import quote, show
from .store import resolve_refs
from .terms import Term, normalize

SEPARATORS = frozenset(" .,?")
DEFAULT_WIDTH = 64


@dataclass(frozen=True)
class Skeleton:
    """Context-free backbone of a grammar."""
    grammar: Grammar
    terminals: dict      # component -> tuple of words
    binary: dict         # component -> (left, right, spaced)
    unary: dict          # component -> tuple of children (Join has two)
    parents: dict        # child -> list of (parent, role)
    extended: frozenset  # SelfExtend components


def build_skeleton(g: Grammar) -> Skeleton:
    terminals, binary, unary = {}, {}, {}
    parents: dict = defaultdict(list)
    extended = set()
    for comp in g.components:
        b = comp.body
        if isinstance(b, Lexicon):
            terminals[comp.name] = tuple(dict.fromkeys(w for w, _ in b.entries))
        elif isinstance(b, BINARY):
            binary[comp.name] = (b.left, b.right, isinstance(b, SPACED))
            parents[b.left].append((comp.name, "L"))
            parents[b.right].append((comp.name, "R"))
        elif isinstance(b, Join):
            unary[comp.name] = (b.left, b.right) if b.left != b.right else (b.left,)
            for ch in unary[comp.name]:
                parents[ch].append((comp.name, "U"))
        else:
            unary[comp.name] = (b.arg,)
            parents[b.arg].append((comp.name, "U"))
            if isinstance(b, SelfExtend):
                extended.add(comp.name)
    return Skeleton(g, terminals, binary, unary, dict(parents), frozenset(extended))


def eligible(text: str, i: int, j: int) -> bool:
    """Spans a self-extension may claim: non-empty runs free of separators."""
    return j > i and not any(ch in SEPARATORS for ch in text[i:j])


@dataclass
class Chart:
    text: str
    items: set = field(default_factory=set)
    by_start: dict = field(default_factory=lambda: defaultdict(set))
    by_end: dict = field(default_factory=lambda: defaultdict(set))

    def add(self, item) -> bool:
        if item in self.items:
            return False
        self.items.add(item)
        comp, i, j = item
        self.by_start[(comp, i)].add(j)
        self.by_end[(comp, j)].add(i)
        return True

    def __contains__(self, item) -> bool:
        return item in self.items


def recognize(sk: Skeleton, text: str, partial: bool = False) -> Chart:
    """All (component, i, j) items derivable by the skeleton."""
    sk.grammar.alphabet.check(text)
    n = len(text)
    chart = Chart(text)
    agenda = []

    def push(item):
        if chart.add(item):
            agenda.append(item)

    for comp, ws in sk.terminals.items():
        for w in ws:
            if w == "":
                for i in range(n + 1):
                    push((comp, i, i))
                continue
            start = text.find(w)
            while start != -1:
                push((comp, start, start + len(w)))
                start = text.find(w, start + 1)
    if partial:
        for comp in sk.extended:
            for i in range(n):
                for j in range(i + 1, n + 1):
                    if not eligible(text, i, j):
                        break
                    push((comp, i, j))
    while agenda:
        comp, i, j = agenda.pop()
        for parent, role in sk.parents.get(comp, ()):
            if role == "U":
                push((parent, i, j))
                continue
            left, right, spaced = sk.binary[parent]
            gap = 1 if spaced else 0
            if role == "L":
                k = j + gap
                if spaced and text[j:k] != " ":
                    continue
                for e in list(chart.by_start.get((right, k), ())):
                    push((parent, i, e))
            if role == "R":
                k = i - gap
                if spaced and (k < 0 or text[k:i] != " "):
                    continue
                for s in list(chart.by_end.get((left, k), ())):
                    push((parent, s, j))
    return chart


# -- attribution ------------------------------------------------------------------------

def _derivations(sk: Skeleton, chart: Chart, item) -> list:
    """Child tuples of one item (one entry per way of building it)."""
    comp, i, j = item
    if comp in sk.terminals:
        return [()] if chart.text[i:j] in sk.terminals[comp] else []
    if comp in sk.binary:
        left, right, spaced = sk.binary[comp]
        gap = 1 if spaced else 0
        out = []
        for k in sorted(k for k in chart.by_start.get((left, i), ()) if k <= j):
            if spaced and chart.text[k:k + 1] != " ":
                continue
            if (right, k + gap, j) in chart:
                out.append(((left, i, k), (right, k + gap, j)))
        return out
    return [((ch, i, j),) for ch in sk.unary[comp] if (ch, i, j) in chart]


@dataclass
class ParseResult:
    input: str
    component: str
    meanings: GeneratorSet
    forest: dict = field(default_factory=dict)
    partial: bool = False
    diagnostics: list = field(default_factory=list)
    sorts: object = None
    known: tuple = ()

    def show(self, term: Term) -> str:
        return show(term, self.sorts, known=self.known) if self.sorts else show(term, known=self.known)

    @property
    def terms(self) -> list:
        return list(self.meanings)

    def to_dict(self, forest: bool = False) -> dict:
        d = {"input": self.input, "component": self.component, "partial": self.partial,
             "meanings": [self.show(m) for m in self.meanings]}
        if self.partial:
            from .robust import holes
            found = set()
            for m in self.meanings:
                found |= holes(m)
            d["holes"] = [f"(hole {c} {quote(w)})" for c, w in sorted(found)]
        if self.diagnostics:
            d["diagnostics"] = list(self.diagnostics)
        if forest:
            d["forest"] = [{"item": list(k), "derivations": [[list(c) for c in ch] for ch in v]}
                           for k, v in sorted(self.forest.items(), key=lambda kv: _item_key(kv[0]))]
        return d

    def to_json(self, forest: bool = False) -> str:
        return json.dumps(self.to_dict(forest), indent=2, sort_keys=True, ensure_ascii=False)

    def to_text(self, forest: bool = False) -> str:
        d = self.to_dict(forest)
        lines = [f"input: {self.input}", f"component: {self.component}",
                 f"partial: {'true' if self.partial else 'false'}",
                 f"meanings: {len(d['meanings'])}"]
        lines += [f"  {m}" for m in d["meanings"]]
        lines += [f"  {h}" for h in d.get("holes", ())]
        for diag in self.diagnostics:
            lines.append(f"note: {diag}")
        if forest:
            lines.append("forest:")
            for entry in d["forest"]:
                c, i, j = entry["item"]
                for ch in entry["derivations"]:
                    kids = " ".join(f"{n}[{a},{b}]" for n, a, b in ch) or repr(self.input[i:j])
                    lines.append(f"  {c}[{i},{j}] <- {kids}")
        return "\n".join(lines)


def _item_key(item):
    comp, i, j = item
    return (i, j, comp)


class _Attributor:
    def __init__(self, sk: Skeleton, chart: Chart, partial: bool, width: int):
        self.sk, self.chart, self.g = sk, chart, sk.grammar
        self.partial, self.width = partial, width
        self.c, self.s = self.g.c, self.g.s
        self.values: dict = {}
        self.derivs: dict = {}
        self.diagnostics: list = []
        self.holes: set = set()

    def reachable(self, root) -> list:
        seen, stack = {root}, [root]
        while stack:
            it = stack.pop()
            ds = _derivations(self.sk, self.chart, it)
            self.derivs[it] = ds
            for d in ds:
                for ch in d:
                    if ch not in seen:
                        seen.add(ch)
                        stack.append(ch)
        return sorted(seen, key=lambda it: (it[2] - it[1], it[1], it[0]))

    def finish(self, t: Term) -> Term:
        return simplify(resolve_refs(normalize(t)))

    def compute(self, item) -> list:
        comp, i, j = item
        body = self.g[comp].body
        get = lambda ch: self.values.get(ch, ())
        text = self.chart.text
        out: list = []
        if isinstance(body, Lexicon):
            w = text[i:j]
            return [m for word, m in body.entries if word == w]
        for d in self.derivs[item]:
            if isinstance(body, Join):
                out.extend(get(d[0]))
            elif isinstance(body, BINARY):
                for m1 in get(d[0]):
                    for m2 in get(d[1]):
                        if isinstance(body, (Concat, PhraseConcat)):
                            out.append(concat_meaning(m1, m2))
                        elif isinstance(body, AnaphoricConcat):
                            out.append(anaphoric(m1, m2, self.c))
                        else:
                            out.append(cataphoric(m1, m2, self.c))
            else:
                for m in get(d[0]):
                    out.extend(self.unary(body, m))
        if isinstance(body, SelfExtend) and not out and item in self.holes:
            out.append(placeholder(body.arg, self.g.type_of(body.arg), text[i:j], self.s))
        return out

    def unary(self, body, m) -> list:
        if isinstance(body, RuleApp):
            return apply_rule(body.rule, m)
        if isinstance(body, FunApp):
            return [apply_canon(to_canon(body.fn), m)]
        if isinstance(body, Raise):
            return [raise_meaning(m, body.fn, self.c)]
        if isinstance(body, Instantiate):
            return [instantiate(m, body.context, self.c)]
        return [m]  # SelfExtend with a base derivation

    def run(self, root) -> GeneratorSet:
        order = self.reachable(root)
        groups = defaultdict(list)
        for it in order:
            groups[(it[1], it[2])].append(it)
        for span in sorted(groups, key=lambda sp: (sp[1] - sp[0], sp[0])):
            group = groups[span]
            for it in group:
                self.values[it] = GeneratorSet(None)
            self.settle(group)
            if self.partial:
                # a self-extension claims the span only once its base is known to fail
                fresh = {it for it in group if self.sk.grammar[it[0]].body.__class__ is SelfExtend
                         and not self.values[it] and eligible(self.chart.text, it[1], it[2])}
                if fresh:
                    self.holes |= fresh
                    self.settle(group)
        return self.values.get(root, GeneratorSet(None))

    def settle(self, group) -> None:
        # unit productions and empty-sided concatenations feed items of the same span
        for _ in range(len(group) + 2):
            changed = False
            for it in group:
                gs = self.values[it]
                for t in self.compute(it):
                    if len(gs) >= self.width:
                        if not gs.truncated:
                            gs.truncated = True
                            self.diagnostics.append(
                                f"generator set of {it[0]}[{it[1]},{it[2]}] truncated at {self.width}")
                        break
                    if gs.add(self.finish(t), already_simple=True):
                        changed = True
            if not changed:
                break


def parse(g: Grammar, component: str | None, text: str, mode: str = "strict",
          width: int | None = None, skeleton: Skeleton | None = None) -> ParseResult:
    """Meanings of ``text`` in ``component`` (default: the grammar's main)."""
    if mode not in ("strict", "partial"):
        raise ValueError(f"unknown mode {mode!r}")
    component = component or g.main
    if component is None:
        raise ValueError("no component given and the grammar declares no main")
    g[component]
    sk = skeleton or build_skeleton(g)
    partial = mode == "partial"
    if width is None:
        from .config import current
        width = current().width
    chart = recognize(sk, text, partial)
    root = (component, 0, len(text))
    att = _Attributor(sk, chart, partial, width)
    meanings = att.run(root) if root in chart else GeneratorSet(g.type_of(component))
    if meanings.type is None:
        meanings.type = g.type_of(component)
    forest = {k: v for k, v in att.derivs.items()}
    has_holes = partial and any(_has_placeholder(m) for m in meanings)
    return ParseResult(text, component, meanings, forest, has_holes, att.diagnostics, g.sorts,
                       g.constants)


def accepts(g: Grammar, component: str, text: str, partial: bool = False) -> bool:
    """Stage-1 acceptance only."""
    return (component, 0, len(text)) in recognize(build_skeleton(g), text, partial)


def _has_placeholder(t: Term) -> bool:
    from .terms import constants
    return any(c.name == "tau" for c in constants(t))
