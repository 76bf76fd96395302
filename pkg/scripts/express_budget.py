"""Sweep the express work budget: found expression, combinations spent, wall time.

    python scripts/express_budget.py --component St \
        --meaning "(exists (x e) (and (Build x Jack) (House x)))" --budgets 500 2000 12000
"""
import argparse
import sys
import time
from pathlib import Path

sys.path[:0] = [str(Path(__file__).resolve().parent.parent / "src")]

from uhog.config import configure, restore  # noqa: E402
from uhog.dsl import bundled, load_grammar  # noqa: E402
from uhog.robust import express  # noqa: E402
from uhog.sexpr import read_term  # noqa: E402


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("-g", "--grammar", default="english-core")
    ap.add_argument("--component", default="St")
    ap.add_argument("--meaning", default="(exists (x e) (and (Build x Jack) (House x)))")
    ap.add_argument("--budgets", type=int, nargs="+", default=[200, 1000, 4000, 12000])
    args = ap.parse_args()
    path = Path(args.grammar)
    g = load_grammar(path if path.exists() else bundled(args.grammar))
    m = read_term(args.meaning, g.env())
    print(f"{'budget':>8}  {'seconds':>8}  result")
    for b in args.budgets:
        saved = configure(express_work=b)
        t0 = time.perf_counter()
        try:
            out = express(g, args.component, m)
        finally:
            restore(saved)
        dt = time.perf_counter() - t0
        print(f"{b:>8}  {dt:>8.2f}  {out if isinstance(out, str) else 'sigma placeholder'}")


if __name__ == "__main__":
    main()
