import random

import pytest

from weakcomp.grammars.automata import Nfa
from weakcomp.grammars.cfg import (
    Cfg,
    GrammarTooLarge,
    concat,
    enumerate_language,
    finite_language,
    hom_image,
    member,
    nonempty,
    reverse,
    set_production_guard,
    star,
    union,
    wp_free_monoid_grammar,
)
from weakcomp.grammars.transduce import Fst, apply_fst, identity_language_grammar, intersect_regular
from weakcomp.pipeline import integer_valuation_wp
from weakcomp.presentations import PresentationError, word

from conftest import naive_member, random_grammar, random_nfa, words

PAL = wp_free_monoid_grammar("ab")


def an_hash_an():
    return intersect_regular(PAL, Nfa.universal("a").concat(Nfa.from_words([("#",)], "#")).concat(Nfa.universal("a")))


def lang(g, n=6):
    return enumerate_language(g, n)


def test_membership():
    assert member(PAL, word("ab#ba"))
    assert not member(PAL, word("ab#ab"))
    assert member(an_hash_an(), word("aa#aa"))
    with pytest.raises(ValueError):
        member(PAL, word("ac#ca"))


def test_enumerate_and_emptiness():
    assert lang(an_hash_an(), 5) == {word("#"), word("a#a"), word("aa#aa")}
    assert not nonempty(Cfg.empty("ab"))
    assert lang(Cfg.empty("ab")) == set()


def test_closure_operations():
    a, b, ab = finite_language([word("a")]), finite_language([word("b")]), finite_language([word("ab")])
    assert lang(union(a, b)) == {word("a"), word("b")}
    assert lang(reverse(ab)) == {word("ba")}
    assert lang(concat(a, b)) == {word("ab")}
    assert lang(star(ab)) == {(), word("ab"), word("abab"), word("ababab")}


def test_hom_image():
    g = finite_language([("g1", "g2")])
    assert lang(hom_image(g, {"g1": word("xyx"), "g2": word("xyyxx")}), 8) == {word("xyxxyyxx")}
    tagged = hom_image(finite_language([word("a#b")]), {"#": word("xy#yx")})
    assert lang(tagged, 8) == {word("axy#yxb")}
    assert lang(hom_image(PAL, {"a": (), "b": (), "#": ()})) == {()}


def test_random_grammars_match_naive_recognizer():
    rng = random.Random(7)
    for _ in range(40):
        prods = random_grammar(rng)
        g = Cfg(frozenset("ab"), 0, tuple(prods))
        for w in words("ab", 5):
            assert member(g, w) == naive_member(prods, 0, w), (prods, w)


def test_random_intersections():
    rng = random.Random(11)
    for _ in range(30):
        prods = random_grammar(rng)
        n = random_nfa(rng)
        g = intersect_regular(Cfg(frozenset("ab"), 0, tuple(prods)), n)
        expected = {w for w in words("ab", 5) if n.accepts(w) and naive_member(prods, 0, w)}
        assert lang(g, 5) == expected


def test_intersection_with_empty():
    assert not nonempty(intersect_regular(PAL, Nfa.empty("ab#")))


def test_identity_transducer():
    assert lang(apply_fst(PAL, Fst.identity("ab#"))) == lang(PAL)


def test_rediamond_transducer():
    fst = Fst.inverse_substitution({"x": ("x",), "y": ("y",), "a": ("a",), "D": ("x", "y")})
    coded = apply_fst(finite_language([word("xyaxy")]), fst)
    assert len(lang(coded, 5)) == 4
    free = Nfa.avoiding("xyaD", word("xy"))
    assert lang(intersect_regular(coded, free), 5) == {("D", "a", "D")}


def test_quotient_transducer():
    drop = Fst("a#", "a", 1, ((0, "a", ("a",), 0), (0, "#", (), 0)), {0}, {0})
    g = concat(star(finite_language([word("a")])), finite_language([word("#")]))
    assert lang(apply_fst(g, drop), 4) == {(), word("a"), word("aa"), word("aaa"), word("aaaa")}


def test_random_transductions_match_run():
    rng = random.Random(3)
    for _ in range(20):
        prods = random_grammar(rng, count=4)
        g = Cfg(frozenset("ab"), 0, tuple(prods))
        trans = []
        for _ in range(4):
            p, q = rng.randrange(2), rng.randrange(2)
            a = rng.choice(["a", "b", None])
            # every letter move writes something, so inputs are no longer than outputs
            out = tuple(rng.choice("cd") for _ in range(rng.randint(1, 2)))
            trans.append((p, a, out, q))
        t = Fst(frozenset("ab"), frozenset("cd"), 2, tuple(trans), {0}, {0, 1})
        expected = set()
        for w in words("ab", 4):
            if naive_member(prods, 0, w):
                expected |= t.run(w, maxout=4)
        assert enumerate_language(apply_fst(g, t), 4) == expected


def test_identity_languages():
    assert lang(identity_language_grammar(PAL, "ab")) == {()}
    ip = identity_language_grammar(integer_valuation_wp({"a": 1, "b": -2}), "ab")
    got = lang(ip, 3)
    assert word("aba") in got and word("aab") in got
    assert all(w.count("a") == 2 * w.count("b") for w in got)


def test_guard_names_the_stage():
    old = set_production_guard(5)
    try:
        with pytest.raises(GrammarTooLarge) as exc:
            intersect_regular(PAL, Nfa.universal("ab#"), stage="probe")
        assert exc.value.stage == "probe"
    finally:
        set_production_guard(old)


def test_text_formats():
    assert lang(Cfg.from_text(PAL.to_text())) == lang(PAL)
    g = Cfg.from_text("start: S\nterminals: a b\nS -> a S b | 1\n")
    assert lang(g, 4) == {(), word("ab"), word("aabb")}
    n = Nfa.from_text(Nfa.avoiding("ab", word("ab")).to_text())
    assert n.accepts(word("bbaa")) and not n.accepts(word("aab"))
    with pytest.raises(PresentationError) as exc:
        Cfg.from_text("start: S\nterminals: a\nS a\n")
    assert exc.value.line == 3
    with pytest.raises(PresentationError) as exc:
        Nfa.from_text("alphabet: a\n0 a\n")
    assert exc.value.line == 2


def test_automata_operations():
    a = Nfa.from_words([word("ab"), word("b")], "ab")
    assert a.complement().accepts(word("a")) and not a.complement().accepts(word("ab"))
    assert a.reverse().accepts(word("ba"))
    assert a.star().accepts(word("abbab"))
    assert a.minimize().accepts(word("ab"))
    assert a.difference(Nfa.from_words([word("b")], "ab")).accepts(word("ab"))
    assert not a.difference(Nfa.from_words([word("b")], "ab")).accepts(word("b"))
    assert Nfa.containing("ab", word("ab")).accepts(word("bab"))
