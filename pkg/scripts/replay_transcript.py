"""Replay a saved REPL transcript and check the session against its history.

    python scripts/replay_transcript.py transcript.txt [-g english-context]
"""
import argparse
import sys
from pathlib import Path

sys.path[:0] = [str(Path(__file__).resolve().parent.parent / "src")]

from uhog.context import fold_history, replay  # noqa: E402
from uhog.dsl import bundled, load_grammar  # noqa: E402


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("transcript")
    ap.add_argument("-g", "--grammar", default="english-context")
    args = ap.parse_args()
    path = Path(args.grammar)
    g = load_grammar(path if path.exists() else bundled(args.grammar))
    lines = Path(args.transcript).read_text(encoding="utf-8").splitlines()
    state = replay(g, lines)
    for line in state.log:
        print(line)
    store, facts = fold_history(state.history)
    coherent = store == state.store and facts == state.facts.keys()
    same = state.log == [ln for ln in lines if ln]
    print(f"# {len(state.history)} instructions, coherent={coherent}, log reproduced={same}")
    return 0 if coherent and same else 1


if __name__ == "__main__":
    sys.exit(main())
