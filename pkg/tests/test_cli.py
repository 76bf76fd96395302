import io
import json
import subprocess
import sys

import pytest

from uhog.cli import EXIT_GRAMMAR, EXIT_NOPARSE, EXIT_OK, EXIT_USAGE, main
from uhog.config import current
from uhog.dsl import bundled


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_lists_component_types(capsys):
    code, out, _ = run(capsys, "check", "-g", "english-core")
    assert code == EXIT_OK
    assert "St : t" in out.splitlines() and "NP : (-> (-> e t) t)" in out.splitlines()


def test_check_json(capsys):
    code, out, _ = run(capsys, "check", "-g", "english-context", "--json")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["main"] == "Text" and len(doc["components"]) == 21


def test_axioms_command(capsys):
    code, out, _ = run(capsys, "axioms", "-g", "english-core")
    assert code == EXIT_OK and out.splitlines()[0].startswith("Noun: ")


def test_parse_command(capsys):
    code, out, _ = run(capsys, "parse", "-g", "english-core", "Jack builds a house.")
    assert code == EXIT_OK
    assert "(exists (x e) (and (Build x Jack) (House x)))" in out


def test_flags_after_the_input(capsys):
    code, out, _ = run(capsys, "parse", "Jack builds a house.", "-g", "english-core", "--json")
    assert code == EXIT_OK and json.loads(out)["meanings"]


def test_parse_failure_exit_code(capsys):
    assert run(capsys, "parse", "-g", "english-core", "Jack")[0] == EXIT_NOPARSE
    assert run(capsys, "parse", "-g", "english-core", "Jack builds a hoüse.")[0] == EXIT_NOPARSE


def test_partial_parse_lists_holes(capsys):
    code, out, _ = run(capsys, "parse", "-g", "english-core", "--partial", "--json", "Jack paints a house.")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["partial"] and doc["holes"] == ['(hole Verbt "paint")']


def test_translate_and_generate(capsys):
    code, out, _ = run(capsys, "translate", "-g", "english-core", "-s", "Noun", "house")
    assert (code, out.strip()) == (EXIT_OK, "House")
    code, out, _ = run(capsys, "generate", "-g", "english-core", "-s", "Noun", "House")
    assert (code, out.strip()) == (EXIT_OK, "house")
    code, out, _ = run(capsys, "generate", "-g", "english-core", "-s", "Noun", "(con Computer (-> e t))")
    assert code == EXIT_NOPARSE and "sigma" in out


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "parse", "Jack")[0] == EXIT_USAGE
    assert run(capsys, "frobnicate", "-g", "english-core")[0] == EXIT_USAGE
    assert run(capsys, "parse", "-g", str(tmp_path / "missing.uhg"), "x")[0] == EXIT_USAGE


def test_grammar_errors(capsys, tmp_path):
    bad = tmp_path / "bad.uhg"
    bad.write_text('lexicon A : t { "a" => true }\nlang B : t = A |\n')
    code, _, err = run(capsys, "check", "-g", str(bad))
    assert code == EXIT_GRAMMAR and "2:17" in err
    empty = tmp_path / "empty.uhg"
    empty.write_text("")
    assert run(capsys, "check", "-g", str(empty))[0] == EXIT_OK


def test_budget_flag_is_scoped_to_the_call(capsys):
    before = current()
    run(capsys, "parse", "-g", "english-core", "--budget", "50000", "Jack builds a house.")
    assert current() == before


def test_repl_session(capsys, monkeypatch):
    lines = ["Jack is a builder.", "he builds a house.", "house Jack", "does Jack build a house?",
             ":facts", ":quit"]
    monkeypatch.setattr(sys, "stdin", io.StringIO("\n".join(lines) + "\n"))
    code, out, _ = run(capsys, "repl", "-g", "english-context")
    assert code == EXIT_OK
    out = out.splitlines()
    assert "! assert (Builder Jack)" in out
    assert "no parse" in out
    assert out[out.index("? test (exists (x e) (and (Build x Jack) (House x))) => yes") + 1] == "yes"


def test_repl_save(capsys, monkeypatch, tmp_path):
    path = tmp_path / "t.txt"
    monkeypatch.setattr(sys, "stdin", io.StringIO(f"Jack is a builder.\n:save {path}\n"))
    run(capsys, "repl", "-g", "english-context")
    assert path.read_text().splitlines()[0] == "> Jack is a builder."


def test_resolve_stored_partial_parse(capsys, tmp_path):
    stored = tmp_path / "partial.json"
    code, out, _ = run(capsys, "parse", "-g", "english-core", "--partial", "--json", "Jack builds a computer.")
    stored.write_text(out)
    grammar = tmp_path / "more.uhg"
    grammar.write_text(bundled("english-core").read_text().replace('"car"     => Car',
                                                                   '"car" => Car ; "computer" => Computer')
                       .replace("const Car ", "const Computer : (-> e t)\nconst Car ", 1))
    code, out, _ = run(capsys, "resolve", "-g", str(grammar), "--json", str(stored))
    doc = json.loads(out)
    assert code == EXIT_OK and doc["holes"] == []
    assert doc["meanings"] == ["(exists (x e) (and (Build x Jack) (Computer x)))"]


def test_output_is_byte_identical_across_processes():
    cmd = [sys.executable, "-m", "uhog.cli", "parse", "-g", "english-context", "--json", "--forest",
           "Jack is a builder. he builds a house."]
    outs = {subprocess.run(cmd, capture_output=True, check=True).stdout for _ in range(3)}
    assert len(outs) == 1


@pytest.mark.parametrize("flag", ["--version", "--help"])
def test_informational_flags(capsys, flag):
    assert run(capsys, flag)[0] == EXIT_OK
