"""Independent reference implementations used to check the engine."""
from __future__ import annotations

import random

from uhog.dsl import bundled, parse_grammar
from uhog.grammar import BINARY, SPACED, Join, Lexicon
from uhog.types import show_type

from strategies import HEADER, SHAPES, T_MEANINGS, WORDS, lexicon_src


def naive_derivable(g, text: str, partial: bool = False) -> set:
    """All (component, i, j) the context-free backbone derives, by naive fixpoint."""
    n = len(text)
    spans = [(i, j) for i in range(n + 1) for j in range(i, n + 1)]
    got: set = set()
    changed = True
    while changed:
        changed = False
        for comp in g.components:
            b = comp.body
            for i, j in spans:
                key = (comp.name, i, j)
                if key in got:
                    continue
                if isinstance(b, Lexicon):
                    ok = any(w == text[i:j] for w, _ in b.entries)
                elif isinstance(b, Join):
                    ok = (b.left, i, j) in got or (b.right, i, j) in got
                elif isinstance(b, BINARY):
                    gap = 1 if isinstance(b, SPACED) else 0
                    ok = any((b.left, i, k) in got and (b.right, k + gap, j) in got
                             and (not gap or text[k:k + 1] == " ")
                             for k in range(i, j + 1))
                else:
                    ok = (b.arg, i, j) in got
                if ok:
                    got.add(key)
                    changed = True
    return got


def random_lexicon(rnd: random.Random, max_entries: int = 3) -> list:
    return [(rnd.choice(WORDS), rnd.choice(T_MEANINGS)) for _ in range(rnd.randint(1, max_entries))]


def random_grammar_src(rnd: random.Random, shapes=SHAPES) -> str:
    """K, L, M lexicons of type t plus one top component: four named components."""
    src = HEADER
    for name in "KLM":
        src += lexicon_src(name, random_lexicon(rnd))
    return src + f"lang Top : t = {rnd.choice(shapes)}\nmain Top\n"


def random_input(rnd: random.Random, max_len: int = 5) -> str:
    return "".join(rnd.choice("ab ") for _ in range(rnd.randint(0, max_len)))


def candidate_inputs(g, rnd: random.Random, k: int = 6) -> list:
    """Random strings plus concatenations of lexicon words, which are far likelier to parse."""
    lex_words = sorted({w for c in g.components if isinstance(c.body, Lexicon)
                        for w, _ in c.body.entries})
    out = [random_input(rnd) for _ in range(k)]
    for _ in range(k):
        parts = [rnd.choice(lex_words) for _ in range(rnd.randint(1, 3))]
        out.append(rnd.choice(["", " "]).join(parts))
    return out


DISTRIBUTIVITY = {
    # name: (left-hand side, right-hand side); both sides must denote the same language
    "join-concat-left": ("(K | L) ++ M |>> and2", "(K ++ M |>> and2) | (L ++ M |>> and2)"),
    "join-concat-right": ("M ++ (K | L) |>> and2", "(M ++ K |>> and2) | (M ++ L |>> and2)"),
    "join-phrase": ("(K | L) +. M |>> and2", "(K +. M |>> and2) | (L +. M |>> and2)"),
    "join-rule": ("(K | L) |> table { P => Q ; Q => P, R ; (and P Q) => R }",
                  "(K |> table { P => Q ; Q => P, R ; (and P Q) => R })"
                  " | (L |> table { P => Q ; Q => P, R ; (and P Q) => R })"),
    "join-fun": ("(K | L) |>> (lam (a t) (not a))", "(K |>> (lam (a t) (not a))) | (L |>> (lam (a t) (not a)))"),
    "join-assoc": ("(K | L) | M", "K | (L | M)"),
    "join-anaphoric": (
        "((K | L) raise (lam (x t) (id c))) ~> (M raise (lam (x t) (id c))) at Here |>> and2",
        "((K raise (lam (x t) (id c))) ~> (M raise (lam (x t) (id c))) at Here |>> and2)"
        " | ((L raise (lam (x t) (id c))) ~> (M raise (lam (x t) (id c))) at Here |>> and2)"),
    "join-cataphoric": (
        "(M raise (lam (x t) (id c))) <~ ((K | L) raise (lam (x t) (id c))) at Here |>> and2",
        "((M raise (lam (x t) (id c))) <~ (K raise (lam (x t) (id c))) at Here |>> and2)"
        " | ((M raise (lam (x t) (id c))) <~ (L raise (lam (x t) (id c))) at Here |>> and2)"),
}


def law_grammar_src(rnd: random.Random, law: str) -> str:
    lhs, rhs = DISTRIBUTIVITY[law]
    src = HEADER
    for name in "KLM":
        src += lexicon_src(name, random_lexicon(rnd))
    return src + f"lang Lhs : t = {lhs}\nlang Rhs : t = {rhs}\n"


def law_grammar_pair(rnd: random.Random, law: str) -> tuple:
    """Same lexicons, one grammar per side, so each stays at four named components."""
    lhs, rhs = DISTRIBUTIVITY[law]
    src = HEADER
    for name in "KLM":
        src += lexicon_src(name, random_lexicon(rnd))
    return src + f"lang Side : t = {lhs}\n", src + f"lang Side : t = {rhs}\n"


def raise_instantiate_src(name: str) -> str:
    """Bundled grammar plus RI_X = X raised by the identity change and instantiated, per lexicon X."""
    text = bundled(name).read_text()
    g = parse_grammar(text)
    extra = "const Here0 : c\n"
    for c in g.named:
        if isinstance(c.body, Lexicon):
            ty = show_type(g.type_of(c.name), g.sorts)
            extra += f"lang RI_{c.name} : {ty} = {c.name} raise (lam (x {ty}) (id c)) at Here0\n"
    return text.replace("\nmain ", "\n" + extra + "main ", 1)
