"""Reader for ``.uhg`` grammar files.

Statements::

    alphabet "abc..."          sorts 3
    const Build : (-> e e t)   define exdet = (lam ...)
    lexicon Noun : (-> e t) { "house" => House ; "car" => Car }
    lang NP : (-> (-> e t) t) = Det +. Noun |>> (id ...) | Name |>> ...
    main St

Expression operators, loosest first: ``|``; postfix ``|>> TERM``,
``|> RULE``, ``raise TERM``, ``at TERM``; left-associative ``++ +. ~> <~``;
prefix ``extend``; atoms (names, string literals, ``( expr )``,
inline ``{ lexicon }``).  ``#`` starts a comment.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from . import words
from .equivalence import equivalent
from .grammar import (AnaphoricConcat, CataphoricConcat, Component, Concat, FunApp, Functional,
                      Grammar, GrammarError, Instantiate, Join, Lexicon, LexiconAsRule,
                      PhraseConcat, Raise, RuleApp, SelfExtend, Table, validate)
from .isos import to_canon, canon_type
from .sexpr import Env, SexprError, parse_term, parse_type, read_all
from .terms import Con, IllTyped, STAR, typecheck
from .types import UNIT, Sorts


class ParseError(GrammarError):
    def __init__(self, msg: str, line: int, col: int):
        self.line, self.col = line, col
        super().__init__(f"{line}:{col}: {msg}")


KEYWORDS = {"alphabet", "sorts", "const", "define", "lexicon", "lang", "main"}
RESERVED = KEYWORDS | {"raise", "at", "extend", "table", "fun"}
OPERATORS = ["|>>", "|>", "=>", "++", "+.", "~>", "<~", "|", "=", ":", ";", ",", "{", "}", "(", ")"]
BINOPS = {"++": Concat, "+.": PhraseConcat, "~>": AnaphoricConcat, "<~": CataphoricConcat}
STOP = set(" \t\r\n;,{}()\"#")


class _Scanner:
    def __init__(self, text: str):
        self.text, self.i, self.line, self.col = text, 0, 1, 1

    def _adv(self, n: int) -> None:
        for ch in self.text[self.i:self.i + n]:
            if ch == "\n":
                self.line, self.col = self.line + 1, 1
            else:
                self.col += 1
        self.i += n

    def skip(self) -> None:
        t = self.text
        while self.i < len(t):
            ch = t[self.i]
            if ch.isspace():
                self._adv(1)
            elif ch == "#":
                while self.i < len(t) and t[self.i] != "\n":
                    self._adv(1)
            else:
                break

    def at_end(self) -> bool:
        self.skip()
        return self.i >= len(self.text)

    def error(self, msg: str) -> ParseError:
        return ParseError(msg, self.line, self.col)

    def peek(self) -> str | None:
        """Operator, 'str', 'ident' or None at end."""
        self.skip()
        if self.i >= len(self.text):
            return None
        for op in OPERATORS:
            if self.text.startswith(op, self.i):
                return op
        if self.text[self.i] == '"':
            return "str"
        return "ident"

    def peek_word(self) -> str | None:
        if self.peek() != "ident":
            return None
        j = self.i
        while j < len(self.text) and self.text[j] not in STOP:
            j += 1
        return self.text[self.i:j]

    def expect(self, op: str) -> None:
        if self.peek() != op:
            raise self.error(f"expected {op!r}")
        self._adv(len(op))

    def accept(self, op: str) -> bool:
        if self.peek() == op:
            self._adv(len(op))
            return True
        return False

    def ident(self) -> str:
        word = self.peek_word()
        if not word:
            raise self.error("expected a name")
        self._adv(len(word))
        return word

    def string(self) -> str:
        if self.peek() != "str":
            raise self.error("expected a string literal")
        line, col = self.line, self.col
        start = self.i
        self._adv(1)
        while self.i < len(self.text) and self.text[self.i] != '"':
            self._adv(2 if self.text[self.i] == "\\" else 1)
        if self.i >= len(self.text):
            raise ParseError("unterminated string", line, col)
        self._adv(1)
        return read_all(self.text[start:self.i], line, col)[0].value

    def sexpr(self):
        """One S-expression node (balanced list or bare atom)."""
        self.skip()
        line, col, start = self.line, self.col, self.i
        if self.peek() == "(":
            depth, in_str = 0, False
            while self.i < len(self.text):
                ch = self.text[self.i]
                if in_str:
                    if ch == "\\":
                        self._adv(1)
                    elif ch == '"':
                        in_str = False
                elif ch == '"':
                    in_str = True
                elif ch == "(":
                    depth += 1
                elif ch == ")":
                    depth -= 1
                    if depth == 0:
                        self._adv(1)
                        break
                self._adv(1)
            else:
                raise ParseError("unbalanced '('", line, col)
        else:
            self.ident()
        try:
            return read_all(self.text[start:self.i], line, col)[0]
        except SexprError as exc:
            raise ParseError(exc.msg, exc.line or line, exc.col or col) from None


@dataclass
class _State:
    env: Env = field(default_factory=Env)
    alphabet: words.Alphabet = words.DEFAULT_ALPHABET
    components: dict = field(default_factory=dict)
    main: str | None = None
    lexicon_refs: list = field(default_factory=list)   # (component, rule name, line, col)


class _Parser:
    def __init__(self, text: str):
        self.sc = _Scanner(text)
        self.st = _State()

    # -- terms and types
    def term(self):
        node = self.sc.sexpr()
        try:
            t = parse_term(node, self.st.env)
            typecheck(t)
            return t
        except SexprError as exc:
            raise ParseError(exc.msg, exc.line or node.line, exc.col or node.col) from None
        except IllTyped as exc:
            raise ParseError(f"ill-typed term: {exc}", node.line, node.col) from None

    def type_(self):
        node = self.sc.sexpr()
        try:
            return parse_type(node, self.st.env.sorts)
        except SexprError as exc:
            raise ParseError(exc.msg, exc.line or node.line, exc.col or node.col) from None

    # -- statements
    def run(self) -> Grammar:
        sc = self.sc
        while not sc.at_end():
            line, col = sc.line, sc.col
            kw = sc.ident()
            handler = getattr(self, f"stmt_{kw}", None)
            if kw not in KEYWORDS or handler is None:
                raise ParseError(f"unknown statement {kw!r}", line, col)
            handler(line, col)
        comps = self._resolve_lexicon_rules()
        return Grammar(tuple(comps), self.st.alphabet, self.st.env.sorts, self.st.main,
                       tuple(self.st.env.consts.values()), tuple(self.st.env.macros.items()))

    def stmt_alphabet(self, line, col):
        syms = self.sc.string()
        try:
            self.st.alphabet = words.Alphabet(syms)
        except ValueError as exc:
            raise ParseError(str(exc), line, col) from None

    def stmt_sorts(self, line, col):
        word = self.sc.ident()
        if not word.isdigit() or int(word) < 3:
            raise ParseError("sorts must be an integer >= 3", line, col)
        if self.st.env.consts or self.st.components:
            raise ParseError("sorts must precede declarations", line, col)
        self.st.env = Env(Sorts(int(word)))

    def stmt_const(self, line, col):
        name = self.sc.ident()
        self.sc.expect(":")
        self.st.env.consts[name] = Con(name, self.type_())

    def stmt_define(self, line, col):
        name = self.sc.ident()
        self.sc.expect("=")
        self.st.env.macros[name] = self.term()

    def stmt_main(self, line, col):
        self.st.main = self.sc.ident()

    def stmt_lexicon(self, line, col):
        name = self._new_name(line, col)
        self.sc.expect(":")
        ty = self.type_()
        lex = self.lexicon_body(ty)
        self._add(Component(name, lex, ty, False, line))

    def stmt_lang(self, line, col):
        name = self._new_name(line, col)
        declared = self.type_() if self.sc.accept(":") else None
        self.sc.expect("=")
        self._counter = 0
        self._owner = name
        body = self.expr_body()
        self._add(Component(name, body, declared, False, line))

    # -- helpers
    def _new_name(self, line, col) -> str:
        name = self.sc.ident()
        if name in RESERVED:
            raise ParseError(f"{name!r} is reserved", line, col)
        if name in self.st.components:
            raise ParseError(f"duplicate component {name}", line, col)
        return name

    def _add(self, comp: Component) -> None:
        self.st.components[comp.name] = comp

    def _anon(self, body, line) -> str:
        self._counter += 1
        name = f"{self._owner}#{self._counter}"
        self._add(Component(name, body, None, True, line))
        return name

    def lexicon_body(self, ty) -> Lexicon:
        sc = self.sc
        sc.expect("{")
        entries: list = []
        while not sc.accept("}"):
            line, col = sc.line, sc.col
            word = sc.string()
            try:
                self.st.alphabet.check(word)
            except words.UnknownSymbol as exc:
                raise ParseError(str(exc), line, col) from None
            sc.expect("=>")
            m = self.term()
            if ty is None:
                ty = typecheck(m)
            if typecheck(m) != ty:
                raise ParseError(f"entry {word!r} has type {typecheck(m)}, expected {ty}", line, col)
            m = to_canon(m)
            if not any(w == word and equivalent(m, old) for w, old in entries):
                entries.append((word, m))
            if not sc.accept(";"):
                sc.expect("}")
                break
        if ty is None:
            raise sc.error("empty inline lexicon needs a declared type")
        return Lexicon(canon_type(ty), tuple(entries))

    # -- expressions: each returns a component name
    def expr_body(self):
        name = self.expr()
        comp = self.st.components.get(name)
        if comp is not None and comp.anonymous:
            # the top-level expression becomes the component's own body
            del self.st.components[name]
            return comp.body
        return Join(name, name)

    def expr(self) -> str:
        left = self.postfix()
        while self.sc.peek() == "|":
            line = self.sc.line
            self.sc.expect("|")
            left = self._anon(Join(left, self.postfix()), line)
        return left

    def postfix(self) -> str:
        sc = self.sc
        arg = self.concat()
        while True:
            line = sc.line
            if sc.accept("|>>"):
                arg = self._anon(FunApp(arg, self.term()), line)
            elif sc.accept("|>"):
                arg = self._anon(RuleApp(arg, self.rule()), line)
            elif sc.peek_word() == "raise":
                sc.ident()
                arg = self._anon(Raise(arg, self.term()), line)
            elif sc.peek_word() == "at":
                sc.ident()
                arg = self._anon(Instantiate(arg, self.term()), line)
            else:
                return arg

    def concat(self) -> str:
        left = self.unary()
        while self.sc.peek() in BINOPS:
            op = self.sc.peek()
            line = self.sc.line
            self.sc.expect(op)
            left = self._anon(BINOPS[op](left, self.unary()), line)
        return left

    def unary(self) -> str:
        sc = self.sc
        line, col = sc.line, sc.col
        if sc.peek_word() == "extend":
            sc.ident()
            return self._anon(SelfExtend(self.unary()), line)
        kind = sc.peek()
        if kind == "(":
            sc.expect("(")
            inner = self.expr()
            sc.expect(")")
            return inner
        if kind == "str":
            text = sc.string()
            try:
                self.st.alphabet.check(text)
            except words.UnknownSymbol as exc:
                raise ParseError(str(exc), line, col) from None
            name = '"' + text + '"'
            if name not in self.st.components:
                self._add(Component(name, Lexicon(UNIT, ((text, STAR),)), UNIT, True, line))
            return name
        if kind == "{":
            return self._anon(self.lexicon_body(None), line)
        if kind == "ident":
            word = sc.peek_word()
            if word in RESERVED:
                raise ParseError(f"unexpected keyword {word!r}", line, col)
            sc.ident()
            self._refs.append((word, line, col, self._owner))
            return word
        raise ParseError("expected an expression", line, col)

    def rule(self):
        sc = self.sc
        line, col = sc.line, sc.col
        word = sc.peek_word()
        if word == "fun":
            sc.ident()
            return Functional(self.term())
        if word == "table":
            sc.ident()
            sc.expect("{")
            cases = []
            while not sc.accept("}"):
                inp = to_canon(self.term())
                sc.expect("=>")
                outs = [to_canon(self.term())]
                while sc.accept(","):
                    outs.append(to_canon(self.term()))
                cases.append((inp, tuple(outs)))
                if not sc.accept(";"):
                    sc.expect("}")
                    break
            return Table(tuple(cases))
        name = sc.ident()
        self.st.lexicon_refs.append((name, line, col))
        return LexiconAsRule(name, None)

    _refs: list

    def _resolve_lexicon_rules(self) -> list:
        comps = self.st.components
        for name, line, col, owner in self._refs:
            if name not in comps:
                from .grammar import UnknownComponent
                raise UnknownComponent(name, line, owner)
        out = []
        for comp in comps.values():
            b = comp.body
            if isinstance(b, RuleApp) and isinstance(b.rule, LexiconAsRule) and b.rule.lexicon is None:
                target = comps.get(b.rule.name)
                if target is None or not isinstance(target.body, Lexicon):
                    line, col = next((ln, cl) for n, ln, cl in self.st.lexicon_refs
                                     if n == b.rule.name)
                    raise ParseError(f"{b.rule.name} is not a lexicon", line, col)
                comp = Component(comp.name, RuleApp(b.arg, LexiconAsRule(b.rule.name, target.body)),
                                 comp.declared, comp.anonymous, comp.line)
            out.append(comp)
        return out


def parse_grammar(text: str, check: bool = True) -> Grammar:
    p = _Parser(text)
    p._refs = []
    p._counter = 0
    p._owner = None
    g = p.run()
    if check:
        validate(g)
    return g


def load_grammar(path, check: bool = True) -> Grammar:
    return parse_grammar(Path(path).read_text(encoding="utf-8"), check)


def bundled(name: str) -> Path:
    """Path of a bundled fixture such as ``english-core``."""
    here = Path(__file__).parent / "grammars"
    p = here / (name if name.endswith(".uhg") else name + ".uhg")
    if not p.exists():
        raise FileNotFoundError(p)
    return p
