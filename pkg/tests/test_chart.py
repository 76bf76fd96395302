import pytest
from hypothesis import given, strategies as st

from oracles import (DISTRIBUTIVITY, candidate_inputs, law_grammar_src, naive_derivable,
                     raise_instantiate_src)
from strategies import small_grammars
from uhog.chart import accepts, build_skeleton, parse, recognize
from uhog.dsl import parse_grammar
from uhog.equivalence import dedupe, equivalent
from uhog.grammar import anaphoric, cataphoric
from uhog.sexpr import read_term
from uhog.store import base_context, resolve_refs
from uhog.terms import App, Pair, normalize
from uhog.words import UnknownSymbol


def rd(g, text):
    return read_term(text, g.env())


# -- skeleton and recognition ----------------------------------------------------------

def test_skeleton_of_core(core):
    sk = build_skeleton(core)
    words = {w for ws in sk.terminals.values() for w in ws}
    assert {"builder", "build", "s", ".", "Jack", "a", "every", "does not"} <= words
    assert all(c.name in sk.terminals or c.name in sk.binary or c.name in sk.unary
               for c in core.components)
    assert sk.extended == {c.name for c in core.components
                           if type(c.body).__name__ == "SelfExtend"}


def test_single_lexicon_skeleton():
    g = parse_grammar('lexicon A : t { "a" => true }\n')
    sk = build_skeleton(g)
    assert sk.terminals == {"A": ("a",)} and not sk.binary and not sk.unary


def test_raise_is_a_unit_production(ctxg):
    sk = build_skeleton(ctxg)
    raised = [c.name for c in ctxg.components if type(c.body).__name__ == "Raise"]
    assert raised and all(len(sk.unary[n]) == 1 for n in raised)


def test_recognize_examples(core):
    sk = build_skeleton(core)
    text = "Jack builds a house."
    assert ("St", 0, len(text)) in recognize(sk, text)
    assert ("St", 0, 10) not in recognize(sk, "house Jack")
    chart = recognize(sk, "car")
    assert ("Noun", 0, 3) in chart


def test_recognize_rejects_foreign_symbols(core):
    with pytest.raises(UnknownSymbol):
        recognize(build_skeleton(core), "Jack builds a hoüse.")


@pytest.mark.parametrize("text", ["Jack builds a house.", "house Jack", "Jack is a builder, Jack builds a house.",
                                  "Jack does not build a house.", "every builder builds"])
def test_recognize_matches_naive_fixpoint(core, text):
    chart = recognize(build_skeleton(core), text)
    assert chart.items == naive_derivable(core, text)


@given(small_grammars(), st.randoms(use_true_random=False))
def test_recognize_matches_naive_fixpoint_on_random_grammars(src, rnd):
    g = parse_grammar(src)
    sk = build_skeleton(g)
    for w in candidate_inputs(g, rnd, 3):
        assert recognize(sk, w).items == naive_derivable(g, w)


# -- attribution -----------------------------------------------------------------------

GOLD = {
    "Jack builds a house.": "(exists (x e) (and (Build x Jack) (House x)))",
    "every builder builds a house.":
        "(forall (y e) (imp (Builder y) (exists (x e) (and (Build x y) (House x)))))",
    "Jack does not build a house.": "(not (exists (x e) (and (Build x Jack) (House x))))",
    "Jack sells a car and builds a house.":
        "(and (exists (x e) (and (Sell x Jack) (Car x))) (exists (x e) (and (Build x Jack) (House x))))",
    "Jack is a builder, Jack builds a house.":
        "(and (exists (x e) (and (Builder x) (eq Jack x))) (exists (x e) (and (Build x Jack) (House x))))",
}


@pytest.mark.parametrize("text", sorted(GOLD))
def test_core_derivations(core, text):
    res = parse(core, "St", text)
    assert len(res.meanings) == 1
    assert equivalent(res.terms[0], rd(core, GOLD[text]))
    assert not res.partial


def test_incomplete_sentence_has_no_meaning(core):
    res = parse(core, "St", "Jack")
    assert len(res.meanings) == 0 and not res.partial


def test_degenerate_rule_filters_parse(core):
    # "is" is in the skeleton but VerbBe only knows "be"; the rule maps "is" to /be/
    assert parse(core, "VPs", "is a builder").meanings
    g = parse_grammar('alphabet "ab"\nconst P : t\nlexicon A : t { "a" => P ; "b" => true }\n'
                      'lang B : t = A |> table { P => P }\n')
    assert accepts(g, "B", "b") and len(parse(g, "B", "b").meanings) == 0
    assert len(parse(g, "B", "a").meanings) == 1


def test_width_cap_truncates_with_diagnostic():
    src = 'alphabet "a"\nconst P : t\nconst Q : t\nconst R : t\n' \
          'lexicon A : t { "a" => P ; "a" => Q ; "a" => R }\n'
    g = parse_grammar(src)
    res = parse(g, "A", "a", width=2)
    assert len(res.meanings) == 2 and res.diagnostics
    assert len(parse(g, "A", "a").meanings) == 3


def test_parse_result_serialization(core):
    res = parse(core, "St", "Jack builds a house.")
    d = res.to_dict()
    assert d["input"] == "Jack builds a house." and d["partial"] is False
    assert d["meanings"] == ["(exists (x e) (and (Build x Jack) (House x)))"]
    assert "forest" in res.to_dict(forest=True)
    assert res.to_json() == parse(core, "St", "Jack builds a house.").to_json()


# -- monadic composition ---------------------------------------------------------------

def _m(g, change, value):
    return Pair(rd(g, change), rd(g, value))


def test_anaphoric_identity_change_leaves_right_side(ctxg):
    m1 = _m(ctxg, "(id c)", "(lam (z c) (Builder Jack))")
    m2 = _m(ctxg, "(setref He (lam (y (-> e t)) (y Jack)))", "(lam (z c) (House Jack))")
    out = normalize(anaphoric(m1, m2, ctxg.c))
    assert equivalent(out, Pair(m2.left, Pair(m1.right, m2.right)))


def test_anaphoric_setref_feeds_deref(ctxg):
    payload = "(lam (y (-> e t)) (y Jack))"
    m1 = _m(ctxg, f"(setref He {payload})", "(lam (z c) true)")
    m2 = _m(ctxg, "(id c)", "(lam (z c) (DerefHe He z))")
    out = normalize(anaphoric(m1, m2, ctxg.c))
    right = resolve_refs(normalize(App(out.right.right, base_context())))
    assert equivalent(right, rd(ctxg, payload))


def test_anaphoric_left_identity_law(ctxg):
    lift = _m(ctxg, "(id c)", "(lam (z c) (Builder Jack))")
    m = _m(ctxg, "(setref He (lam (y (-> e t)) (y Jack)))", "(lam (z c) (House Jack))")
    out = normalize(anaphoric(lift, m, ctxg.c))
    assert equivalent(out.left, m.left)
    assert equivalent(out.right.left, lift.right) and equivalent(out.right.right, m.right)


def test_cataphoric_identity_right_change(ctxg):
    m1 = _m(ctxg, "(setref He (lam (y (-> e t)) (y Jack)))", "(lam (z c) (Builder Jack))")
    m2 = _m(ctxg, "(id c)", "(lam (z c) (House Jack))")
    out = normalize(cataphoric(m1, m2, ctxg.c))
    assert equivalent(out.left, m1.left) and equivalent(out.right.left, m1.right)


def test_cataphoric_resolves_right_to_left(ctxg):
    payload = "(lam (y (-> e t)) (y Jack))"
    m1 = _m(ctxg, "(id c)", "(lam (z c) (DerefHe He z))")
    m2 = _m(ctxg, f"(setref He {payload})", "(lam (z c) true)")
    out = normalize(cataphoric(m1, m2, ctxg.c))
    left = resolve_refs(normalize(App(out.right.left, base_context())))
    assert equivalent(left, rd(ctxg, payload))


def test_cataphoric_of_two_lifts_is_a_paired_lift(ctxg):
    a = _m(ctxg, "(id c)", "(lam (z c) (Builder Jack))")
    b = _m(ctxg, "(id c)", "(lam (z c) (House Jack))")
    out = normalize(cataphoric(a, b, ctxg.c))
    assert equivalent(out, Pair(rd(ctxg, "(id c)"), Pair(a.right, b.right)))


# -- algebraic laws at result level ----------------------------------------------------

@pytest.mark.parametrize("law", sorted(DISTRIBUTIVITY))
@given(rnd=st.randoms(use_true_random=False))
def test_distributivity_laws(law, rnd):
    g = parse_grammar(law_grammar_src(rnd, law))
    for w in candidate_inputs(g, rnd):
        assert parse(g, "Lhs", w).meanings == parse(g, "Rhs", w).meanings, w


@given(small_grammars(), st.randoms(use_true_random=False))
def test_join_results_are_unions(src, rnd):
    g = parse_grammar(src + "lang J : t = K | L\n")
    for w in candidate_inputs(g, rnd):
        both = dedupe(list(parse(g, "K", w).terms) + list(parse(g, "L", w).terms))
        assert parse(g, "J", w).meanings == both


@given(small_grammars(), st.randoms(use_true_random=False), st.sampled_from("KLM"),
       st.sampled_from(["a", "b", "ab", "bb"]), st.sampled_from(["P", "Q", "(or P R)"]))
def test_monotone_under_lexicon_extension(src, rnd, lex, word, meaning):
    g = parse_grammar(src)
    g2 = g.with_entry(lex, word, rd(g, meaning))
    for w in candidate_inputs(g2, rnd):
        assert parse(g, "Top", w).meanings.issubset(parse(g2, "Top", w).meanings)


@given(small_grammars(), st.randoms(use_true_random=False))
def test_stage_one_superset(src, rnd):
    g = parse_grammar(src)
    sk = build_skeleton(g)
    for w in candidate_inputs(g, rnd):
        if len(parse(g, "Top", w, skeleton=sk).meanings):
            assert ("Top", 0, len(w)) in recognize(sk, w)


@pytest.mark.parametrize("name", ["english-core", "english-context"])
def test_raise_then_instantiate_is_identity(name):
    g = parse_grammar(raise_instantiate_src(name))
    for c in g.named:
        if c.name.startswith("RI_"):
            base = c.name[3:]
            for w, _ in g[base].body.entries:
                assert parse(g, c.name, w).meanings == parse(g, base, w).meanings


def test_parse_is_deterministic(core, ctxg):
    for g, comp, text in [(core, "St", "Jack sells a car and builds a house."),
                          (ctxg, "Text", "Jack is a builder. he builds a house.")]:
        outs = {parse(g, comp, text).to_json(forest=True) for _ in range(3)}
        assert len(outs) == 1
