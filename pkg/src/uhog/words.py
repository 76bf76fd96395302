"""The symbolic type: alphabets and the word-to-term encoding.

A word ``w1 w2 .. wk`` is encoded right-associated as
``cat C^w1 (cat C^w2 (.. C^wk))``; the empty word is the constant ``C0``.
Symbol constants are named after their character, so word terms decode
without consulting an alphabet.
"""
from __future__ import annotations

import enum
import string
from dataclasses import dataclass, field

from .terms import App, Con, Term, normalize
from .types import S, Type, fun

DEFAULT_SYMBOLS = string.ascii_lowercase + string.ascii_uppercase + string.digits + " .,?-'"
EMPTY_NAME = "C0"
CAT_NAME = "cat"
SYM_PREFIX = "C^"


class UnknownSymbol(ValueError):
    def __init__(self, char: str, position: int):
        self.char, self.position = char, position
        super().__init__(f"symbol {char!r} at position {position} is not in the alphabet")


class NotAWordTerm(ValueError):
    pass


class WordEq(enum.Enum):
    EQUAL = "Equal"
    DISTINCT = "Distinct"


@dataclass(frozen=True)
class Alphabet:
    symbols: str = DEFAULT_SYMBOLS
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if not self.symbols:
            raise ValueError("alphabet must not be empty")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("alphabet has duplicate symbols")
        object.__setattr__(self, "_index", {ch: i + 1 for i, ch in enumerate(self.symbols)})

    def __contains__(self, ch: str) -> bool:
        return ch in self._index

    def index(self, ch: str) -> int:
        """1-based position; C^0 is the empty word."""
        return self._index[ch]

    def check(self, word: str) -> None:
        for pos, ch in enumerate(word):
            if ch not in self._index:
                raise UnknownSymbol(ch, pos)


DEFAULT_ALPHABET = Alphabet()


def empty_word(s: Type = S) -> Con:
    return Con(EMPTY_NAME, s)


def cat_con(s: Type = S) -> Con:
    return Con(CAT_NAME, fun(s, s, s))


def sym_con(ch: str, s: Type = S) -> Con:
    return Con(SYM_PREFIX + ch, s)


def cat(a: Term, b: Term, s: Type = S) -> Term:
    return App(App(cat_con(s), a), b)


def encode(word: str, alphabet: Alphabet | None = DEFAULT_ALPHABET, s: Type = S) -> Term:
    """T_A encoding; ``alphabet=None`` skips the symbol check (caller already did it)."""
    if alphabet is not None:
        alphabet.check(word)
    if not word:
        return empty_word(s)
    out: Term = sym_con(word[-1], s)
    for ch in reversed(word[:-1]):
        out = cat(sym_con(ch, s), out, s)
    return out


def _leaves(t: Term, s: Type | None, out: list) -> None:
    if isinstance(t, Con):
        if s is not None and t.type != s:
            raise NotAWordTerm(f"constant {t.name} is not of the symbolic type")
        if t.name == EMPTY_NAME:
            return
        if t.name.startswith(SYM_PREFIX) and len(t.name) == len(SYM_PREFIX) + 1:
            out.append(t.name[-1])
            return
        raise NotAWordTerm(f"constant {t.name} is not an alphabet symbol")
    if isinstance(t, App) and isinstance(t.fn, App) and isinstance(t.fn.fn, Con) \
            and t.fn.fn.name == CAT_NAME:
        _leaves(t.fn.arg, s, out)
        _leaves(t.arg, s, out)
        return
    raise NotAWordTerm(f"not a word term ({type(t).__name__} node)")


def decode(term: Term, alphabet: Alphabet | None = None) -> str:
    out: list = []
    _leaves(normalize(term), None, out)
    word = "".join(out)
    if alphabet is not None:
        try:
            alphabet.check(word)
        except UnknownSymbol as exc:
            raise NotAWordTerm(str(exc)) from None
    return word


def is_word_term(term: Term) -> bool:
    try:
        _leaves(term, None, [])
        return True
    except NotAWordTerm:
        return False


def word_normal_form(term: Term) -> Term:
    """Re-associate a word term to the right-associated representative."""
    if isinstance(term, Con):
        return term
    return encode(decode(term), None, s=term.fn.fn.type.dom)


def word_eq_decide(a: Term, b: Term) -> WordEq:
    return WordEq.EQUAL if decode(a) == decode(b) else WordEq.DISTINCT


def splits(word: str) -> list:
    return [(word[:i], word[i:]) for i in range(len(word) + 1)]
