"""Print the core and context derivations next to their reference programs.

    python scripts/run_golden.py [--json]
"""
import argparse
import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path[:0] = [str(ROOT / "tests"), str(ROOT / "src")]

import test_acceptance as acc  # noqa: E402
from uhog.chart import parse  # noqa: E402
from uhog.context import interpret_sentence  # noqa: E402
from uhog.store import decompose  # noqa: E402


def _line(g, ins) -> str:
    return " ".join([type(ins).__name__] + [g.show(v) for v in vars(ins).values()])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    rows = []
    core = acc.grammar("english-core")
    for text in acc.PRINTED_CORE:
        res = parse(core, "St", text)
        rows.append({"grammar": "english-core", "input": text,
                     "meanings": [core.show(m) for m in res.terms]})
    ctx = acc.grammar("english-context")
    for case, (comp, text, printed) in sorted(acc.PRINTED_CONTEXT.items()):
        prog, _ = interpret_sentence(ctx, text, component=comp)
        ok, why = acc.program_matches(ctx, prog, printed)
        rows.append({"grammar": "english-context", "case": case, "input": text, "match": ok,
                     "note": why, "program": [_line(ctx, i) for i in decompose(prog)]})
    if args.json:
        print(json.dumps(rows, indent=2, ensure_ascii=False))
        return
    for r in rows:
        tag = "" if "match" not in r else ("  [match]" if r["match"] else f"  [differs: {r['note']}]")
        print(f"{r['input']}{tag}")
        for line in r.get("meanings", r.get("program", [])):
            print(f"    {line}")


if __name__ == "__main__":
    main()
