import json
from pathlib import Path

import pytest

from weakcomp.cli import main
from weakcomp.compression import compress_chain, word_equal
from weakcomp.grammars.automata import Nfa
from weakcomp.presentations import MonoidPresentation, classify, word

from conftest import PI_PRIME, PI_PRIME_LHS

DATA = Path(__file__).parent / "data"
GOLDEN = DATA / "golden"

# (command line, golden file, exit status)
CASES = [
    (["classify", "M3.pres"], "classify_M3.txt", 0),
    (["compress", "M1.pres"], "compress_M1.txt", 0),
    (["compress", "PiPrime.pres", "--chain"], "chain_PiPrime.txt", 0),
    (["eq", "M1.pres", "xyyxxxyxxyyxxxy", "xy"], "eq_M1.txt", 0),
    (["eq", "free.pres", "x", "y"], "eq_free.txt", 0),
    (["idempotent", "M3.pres"], "idempotent_M3.txt", 0),
]


def run(capsys, argv):
    argv = [str(DATA / a) if a.endswith(".pres") or a.endswith(".nfa") else a for a in argv]
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("argv, golden, status", CASES)
def test_golden(capsys, argv, golden, status):
    code, out, _ = run(capsys, argv)
    assert code == status
    assert out == (GOLDEN / golden).read_text(encoding="utf-8")


def test_json_matches_library(capsys):
    _, out, _ = run(capsys, ["classify", "M3.pres", "--format", "json"])
    p = MonoidPresentation.from_text((DATA / "M3.pres").read_text())
    assert json.loads(out) == classify(p).as_dict()
    _, out, _ = run(capsys, ["compress", "PiPrime.pres", "--chain", "--format", "json"])
    data = json.loads(out)
    chain = compress_chain(PI_PRIME)
    assert MonoidPresentation.from_text(data["start"]) == PI_PRIME
    assert MonoidPresentation.from_text(data["steps"][-1]["target"]) == chain.terminal


def test_eq_unknown_exit_status(capsys):
    code, out, _ = run(capsys, ["eq", "ab.pres", "a", "b", "--base", "bfs", "--maxlen", "6"])
    assert (code, out.strip()) == (2, "unknown")
    code, out, _ = run(capsys, ["eq", "ab.pres", "a", "b", "--base", "completion"])
    assert (code, out.strip()) == (0, "distinct")


def test_bundle_commands(capsys, tmp_path):
    bundle = tmp_path / "pi"
    code, out, _ = run(capsys, ["build-wp", "PiPrime.pres", "--out", str(bundle), "--format", "json"])
    assert code == 0
    manifest = json.loads(out)
    assert list(manifest["stages"]) == ["left_wp", "free_palindromes", "alternating", "marked", "identity_cores",
                                        "sealed_wp", "alpha_wp", "alpha_free_wp", "built_wp"]
    assert json.loads((bundle / "manifest.json").read_text())["stages"] == manifest["stages"]
    for u, v in [("xyxxy", PI_PRIME_LHS), ("xy", "yx"), ("xyx", "xyx")]:
        expected = word_equal(PI_PRIME, word(u), word(v)).value == "equal"
        code, out, _ = run(capsys, ["member", str(bundle), u + "#" + v[::-1]])
        assert (code, out.strip()) == (0, str(expected).lower())
    nfa = tmp_path / "lhs.nfa"
    nfa.write_text(Nfa.from_words([word(PI_PRIME_LHS)], "xy").to_text())
    code, out, _ = run(capsys, ["ratmem", str(bundle), "xyxxy", str(nfa)])
    assert (code, out.strip()) == (0, "true")


def test_errors(capsys, tmp_path):
    bad = tmp_path / "bad.pres"
    bad.write_text("gens: x y\nrel: xz = 1\n")
    code, _, err = run(capsys, ["classify", str(bad)])
    assert code == 1 and "line 2" in err
    code, _, err = run(capsys, ["compress", "free.pres"])
    assert code == 1 and "incompressible" in err
    code, _, err = run(capsys, ["build-wp", "PiPrime.pres", "--out", str(tmp_path / "pi"), "--guard", "100"])
    assert code == 1 and "stage" in err
    with pytest.raises(SystemExit):
        main(["classify", "--no-such-flag", str(DATA / "M3.pres")])
