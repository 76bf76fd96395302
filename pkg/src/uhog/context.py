"""Sessions over instructive languages: execution, entailment, transcripts."""
from __future__ import annotations

import copy
import enum
from dataclasses import dataclass, field

from .chart import parse
from .equivalence import GeneratorSet, canon_key, flatten, simplify
from .grammar import Grammar
from .sexpr import show
from .store import (Assert, Opaque, Refute, Setref, Test, Unset, base_context, decompose,
                    resolve_refs, unresolved)
from .terms import (AND, FALSE, IMP, TRUE, Con, Lam, Term, constants, free_vars, head_args, neg,
                    subst, typecheck)
from .types import T, UNIT, Base


class Answer(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


class NoParse(Exception):
    def __init__(self, text: str):
        self.text = text
        super().__init__(f"no parse: {text!r}")


class Ambiguous(Exception):
    def __init__(self, count: int, what: str = "programs"):
        self.count = count
        super().__init__(f"ambiguous: {count} non-equivalent {what}")


class IllTypedInstruction(TypeError):
    pass


@dataclass
class ContextState:
    history: list = field(default_factory=list)     # executed instructions, oldest first
    store: dict = field(default_factory=dict)       # ref symbol -> value
    facts: GeneratorSet = field(default_factory=lambda: GeneratorSet(T))
    responses: list = field(default_factory=list)   # (formula, Answer)
    refuted: list = field(default_factory=list)
    log: list = field(default_factory=list)         # transcript lines
    known: frozenset = frozenset()                  # constants printed by bare name

    def copy(self) -> "ContextState":
        return copy.deepcopy(self)

    def recent_first(self) -> tuple:
        return tuple(reversed(self.history))

    def run(self, program: Term) -> list:
        """Execute ``program`` in place; returns the Test answers it produced."""
        answers = []
        for ins in decompose(program):
            ins = _ground(ins, program)
            self.history.append(ins)
            if isinstance(ins, Setref):
                self.store[ins.ref] = ins.value
                self.log.append(f"! setref {show(ins.ref, known=self.known)} {show(ins.value, known=self.known)}")
            elif isinstance(ins, Unset):
                self.store.pop(ins.ref, None)
                self.log.append(f"! unset {show(ins.ref, known=self.known)}")
            elif isinstance(ins, Assert):
                self.facts.add(ins.formula)
                self.log.append(f"! assert {show(simplify(ins.formula), known=self.known)}")
            elif isinstance(ins, Refute):
                k = canon_key(simplify(ins.formula))
                kept = GeneratorSet(T)
                for f in self.facts:
                    if canon_key(f) != k:
                        kept.add(f, already_simple=True)
                self.facts = kept
                self.refuted.append(simplify(ins.formula))
                self.log.append(f"! refute {show(simplify(ins.formula), known=self.known)}")
            elif isinstance(ins, Test):
                ans = entails(self.facts, ins.formula)
                answers.append(ans)
                self.responses.append((ins.formula, ans))
                self.log.append(f"? test {show(simplify(ins.formula), known=self.known)} => {ans.value}")
            else:
                self.log.append(f"! opaque {show(ins.term, known=self.known)}")
        return answers


def _ground(ins, program: Term):
    """Replace the program's own context variable by the base marker in stored values."""
    if not isinstance(program, Lam):
        return ins
    z, c = program.var, program.vtype
    base = base_context(c)
    fix = lambda t: subst(t, z, c, base) if (z, c) in free_vars(t) else t
    if isinstance(ins, Setref):
        return Setref(ins.ref, fix(ins.value))
    if isinstance(ins, (Assert, Refute, Test)):
        return type(ins)(fix(ins.formula))
    if isinstance(ins, Opaque):
        return Opaque(fix(ins.term))
    return ins


def execute(program: Term, state: ContextState) -> tuple:
    """Run ``program`` on a copy of ``state``: (new state, Test answers)."""
    ty = typecheck(program)
    if not (hasattr(ty, "dom") and ty.dom == getattr(ty, "cod", None)):
        raise IllTypedInstruction(f"program must have type c→c, found {ty}")
    new = state.copy()
    answers = new.run(program)
    return new, answers


def fold_history(history) -> tuple:
    """(store, fact keys) implied by an instruction history."""
    store: dict = {}
    facts = GeneratorSet(T)
    for ins in history:
        if isinstance(ins, Setref):
            store[ins.ref] = ins.value
        elif isinstance(ins, Unset):
            store.pop(ins.ref, None)
        elif isinstance(ins, Assert):
            facts.add(ins.formula)
        elif isinstance(ins, Refute):
            k = canon_key(simplify(ins.formula))
            kept = GeneratorSet(T)
            for f in facts:
                if canon_key(f) != k:
                    kept.add(f, already_simple=True)
            facts = kept
    return store, facts.keys()


# -- entailment ----------------------------------------------------------------------------

def _conjuncts(t: Term) -> list:
    return flatten(t, AND)


def _universal(t: Term):
    """(var, type, antecedent, consequent) for ``forall x (A ⊃ B)``."""
    head, args = head_args(t)
    if isinstance(head, Con) and head.name == "forall" and len(args) == 1 and isinstance(args[0], Lam):
        lam = args[0]
        h2, a2 = head_args(lam.body)
        if h2 == IMP and len(a2) == 2:
            return lam.var, lam.vtype, a2[0], a2[1]
    return None


def closure(facts, extra_terms=()) -> GeneratorSet:
    """Conjunct decomposition plus one round of universal instantiation."""
    out = GeneratorSet(T)
    for f in facts:
        for c in _conjuncts(simplify(f)):
            out.add(c)
    pool = list(out) + list(extra_terms)
    individuals: dict = {}
    for t in pool:
        for k in constants(t):
            if not isinstance(k.type, Base) or k.type in (T, UNIT):
                continue
            individuals.setdefault(k.type, set()).add(k)
    for f in list(out):
        u = _universal(f)
        if u is None:
            continue
        x, ty, ante, cons = u
        for k in sorted(individuals.get(ty, ()), key=lambda k: k.name):
            if simplify(subst(ante, x, ty, k)) in out:
                for c in _conjuncts(simplify(subst(cons, x, ty, k))):
                    out.add(c)
    return out


def _existential(t: Term):
    head, args = head_args(t)
    if isinstance(head, Con) and head.name == "exists" and len(args) == 1 and isinstance(args[0], Lam):
        return args[0]
    return None


def _weakens(cl: GeneratorSet, q: Term) -> bool:
    """Some fact ∃x(A1 ∧ ... ∧ Ak) whose conjuncts include those of the query ∃x(...)."""
    ql = _existential(q)
    if ql is None:
        return False
    witness = Con("__witness__", ql.vtype)
    want = {canon_key(simplify(c)) for c in _conjuncts(subst(ql.body, ql.var, ql.vtype, witness))}
    for f in cl:
        fl = _existential(f)
        if fl is None or fl.vtype != ql.vtype:
            continue
        have = {canon_key(simplify(c))
                for c in _conjuncts(subst(fl.body, fl.var, fl.vtype, witness))}
        if want <= have:
            return True
    return False


def entails(facts, formula: Term) -> Answer:
    q = simplify(formula)
    if q == TRUE:
        return Answer.YES
    if q == FALSE:
        return Answer.NO
    cl = closure(facts, [q])
    if all(c in cl or _weakens(cl, c) for c in _conjuncts(q)):
        return Answer.YES
    if simplify(neg(q)) in cl or any(simplify(neg(c)) in cl for c in _conjuncts(q)):
        return Answer.NO
    return Answer.UNKNOWN


# -- interpretation -------------------------------------------------------------------------

def _sentence_component(g: Grammar, preferred: str) -> str:
    if preferred in g:
        return preferred
    if g.main is None:
        raise ValueError("grammar declares no main component")
    return g.main


def _program(g: Grammar, component: str, text: str, session: ContextState):
    res = parse(g, component, text)
    progs = list(res.meanings)
    if not progs:
        raise NoParse(text)
    if len(progs) > 1:
        raise Ambiguous(len(progs))
    prog = resolve_refs(progs[0], session.recent_first(), simplify_result=True)
    diags = [f"unresolved reference {show(s)}" for s in unresolved(prog)]
    return prog, diags + res.diagnostics


def interpret_sentence(g: Grammar, text: str, session: ContextState | None = None,
                       component: str = "St") -> tuple:
    """(program, diagnostics) for one sentence, references resolved against ``session``."""
    session = session or ContextState()
    return _program(g, _sentence_component(g, component), text, session)


def interpret_text(g: Grammar, text: str, session: ContextState,
                   component: str = "Text") -> tuple:
    """Parse, resolve and execute a text; ``session`` is updated in place.

    Returns (program, answers).  Nothing changes when parsing fails.
    """
    prog, diags = _program(g, _sentence_component(g, component), text, session)
    work = session.copy()
    work.known = frozenset(g.constants)
    work.log.append(f"> {text}")
    for d in diags:
        work.log.append(f"# {d}")
    answers = work.run(prog)
    session.__dict__.update(work.__dict__)
    return prog, answers


def replay(g: Grammar, transcript_lines, component: str = "Text") -> ContextState:
    """Rebuild a session from the ``> input`` lines of a transcript."""
    state = ContextState()
    for line in transcript_lines:
        if line.startswith("> "):
            try:
                interpret_text(g, line[2:], state, component)
            except (NoParse, Ambiguous):
                pass
    return state
