"""Command-line entry point: ``uhog <command> -g GRAMMAR ...``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .chart import parse
from .config import configure, current, restore
from .context import Ambiguous, ContextState, NoParse, fold_history, interpret_text
from .dsl import ParseError, bundled, load_grammar
from .grammar import GrammarError, emit_axioms, validate
from .robust import PartialMeaning, express, partial_parse, resolve_placeholders, translate
from .sexpr import SexprError, read_term
from .terms import IllTyped, NonTerminating
from .words import UnknownSymbol

EXIT_OK, EXIT_USAGE, EXIT_GRAMMAR, EXIT_NOPARSE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _grammar(args):
    if not args.grammar:
        raise UsageError("a grammar is required (-g FILE, or a bundled name like english-core)")
    path = Path(args.grammar)
    if not path.exists():
        try:
            path = bundled(args.grammar)
        except FileNotFoundError:
            raise UsageError(f"grammar not found: {args.grammar}") from None
    return load_grammar(path)


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False))
    else:
        print(text)


def cmd_check(args) -> int:
    g = _grammar(args)
    report = validate(g)
    rows = [(c.name, show_type_(g, report.types[c.name])) for c in g.named]
    payload = {"components": [{"name": n, "type": t} for n, t in rows],
               "warnings": report.warnings, "main": g.main}
    lines = [f"{n} : {t}" for n, t in rows] + [f"warning: {w}" for w in report.warnings]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def show_type_(g, ty) -> str:
    from .types import show_type
    return show_type(ty, g.sorts)


def cmd_axioms(args) -> int:
    g = _grammar(args)
    ax = emit_axioms(g)
    sh = g.show
    formulas = [{"component": n, "formula": sh(f)} for n, f in ax.formulas]
    payload = {"formulas": formulas, "compact": sh(ax.compact) if ax.compact else None}
    lines = [f"{f['component']}: {f['formula']}" for f in formulas]
    if ax.compact is not None:
        lines.append(f"compact: {payload['compact']}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def _input(args) -> str:
    if not args.input:
        raise UsageError("missing input string")
    return " ".join(args.input)


def cmd_parse(args) -> int:
    g = _grammar(args)
    text = _input(args)
    if args.partial:
        try:
            res = partial_parse(g, args.component or g.main, text)
        except NoParse:
            res = parse(g, args.component, text, mode="partial", width=args.width)
    else:
        res = parse(g, args.component, text, width=args.width)
    if args.json:
        print(res.to_json(forest=args.forest))
    else:
        print(res.to_text(forest=args.forest))
    return EXIT_OK if len(res.meanings) else EXIT_NOPARSE


def cmd_translate(args) -> int:
    g = _grammar(args)
    comp = args.component or g.main
    m = translate(g, comp, _input(args))
    _emit(args, {"component": comp, "meaning": g.show(m)}, g.show(m))
    return EXIT_OK


def cmd_generate(args) -> int:
    g = _grammar(args)
    comp = args.component or g.main
    term = read_term(_input(args), g.env())
    out = express(g, comp, term, args.depth)
    text = out if isinstance(out, str) else g.show(out)
    _emit(args, {"component": comp, "expression": text, "found": isinstance(out, str)}, text)
    return EXIT_OK if isinstance(out, str) else EXIT_NOPARSE


def cmd_resolve(args) -> int:
    """Re-resolve a stored ``parse --partial --json`` result against a grammar."""
    g = _grammar(args)
    if not args.input:
        raise UsageError("resolve needs the path of a stored partial parse")
    doc = json.loads(Path(args.input[0]).read_text(encoding="utf-8"))
    env = g.env()
    outs = [resolve_placeholders(PartialMeaning(read_term(m, env)), g) for m in doc["meanings"]]
    payload = {"input": doc.get("input"), "component": doc.get("component"),
               "meanings": [g.show(p.meaning) for p in outs],
               "holes": sorted({f"(hole {c} \"{w}\")" for p in outs for c, w in p.holes})}
    lines = payload["meanings"] + payload["holes"]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_repl(args) -> int:
    g = _grammar(args)
    comp = args.component or g.main
    if comp is None:
        raise UsageError("the grammar declares no main component; pass -s")
    state = ContextState()
    interactive = sys.stdin.isatty()
    while True:
        if interactive:
            print("uhog> ", end="", flush=True)
        line = sys.stdin.readline()
        if not line:
            break
        line = line.strip()
        if not line:
            continue
        if line.startswith(":"):
            cmd, _, rest = line.partition(" ")
            if cmd == ":quit":
                break
            if cmd == ":facts":
                for f in state.facts:
                    print(g.show(f))
            elif cmd == ":store":
                for sym, val in state.store.items():
                    print(f"{g.show(sym)} = {g.show(val)}")
            elif cmd == ":save":
                Path(rest or "transcript.txt").write_text("\n".join(state.log) + "\n", encoding="utf-8")
                print(f"saved {len(state.log)} lines")
            else:
                print(f"unknown command {cmd}")
            continue
        mark = len(state.log)
        try:
            _, answers = interpret_text(g, line, state, comp)
        except NoParse:
            print("no parse")
            continue
        except Ambiguous as exc:
            print(str(exc))
            continue
        for entry in state.log[mark + 1:]:
            print(entry)
        for a in answers:
            print(a.value)
    store, facts = fold_history(state.history)
    assert store == state.store and facts == state.facts.keys()
    return EXIT_OK


COMMANDS = {"check": cmd_check, "axioms": cmd_axioms, "parse": cmd_parse,
            "translate": cmd_translate, "generate": cmd_generate, "repl": cmd_repl,
            "resolve": cmd_resolve}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="uhog", description="Higher-order grammar engine.")
    p.add_argument("--version", action="version", version=f"uhog {__version__}")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("input", nargs="*", help="input string (words are joined by spaces)")
    p.add_argument("-g", "--grammar", help="grammar file or bundled fixture name")
    p.add_argument("-s", "--component", help="component to use (default: the grammar's main)")
    p.add_argument("--partial", action="store_true", help="allow placeholders for unknown words")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--forest", action="store_true", help="include the derivation forest")
    p.add_argument("--width", type=int, default=None, help="generator-set cap per chart item")
    p.add_argument("--budget", type=int, default=None, help="reduction step budget")
    p.add_argument("--depth", type=int, default=None, help="search depth for generate")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_intermixed_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    saved = current()
    if args.budget is not None:
        configure(budget=args.budget)
    if args.width is not None:
        configure(width=args.width)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, GrammarError, SexprError, IllTyped) as exc:
        print(f"grammar error: {exc}", file=sys.stderr)
        return EXIT_GRAMMAR
    except UnknownSymbol as exc:
        print(f"no parse: {exc}", file=sys.stderr)
        return EXIT_NOPARSE
    except (NoParse, Ambiguous) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_NOPARSE
    except NonTerminating as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GRAMMAR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        restore(saved)


if __name__ == "__main__":
    sys.exit(main())
