"""Acceptance criteria 1-8.

Each test records one PASS/FAIL line (printed at the end of the pytest run,
or directly when this file is executed as a script).
"""

import functools
import random
import time

from weakcomp.closures import AlphaMonadicSystem, MonadicCfSystem, alpha_monadic_ancestors, alternating_product, \
    bipartisan_ancestors, monadic_ancestors
from weakcomp.compression import CompletionSolver, GrammarSolver, compress, compress_chain, word_equal
from weakcomp.grammars.automata import Nfa
from weakcomp.grammars.cfg import accepts, enumerate_language, finite_language, union, wp_free_monoid_grammar
from weakcomp.pipeline import build_wp_chain, build_wp_grammar, extract_lm_wp_grammar, integer_valuation_wp, \
    rational_membership, wp_shape
from weakcomp.presentations import Answer, classify, has_nontrivial_idempotent, is_special, word
from weakcomp.rewriting import BoundedCongruence, RewriteSystem, Verdict, ancestors_bounded

import test_closures as oracles
from conftest import M1, M3, PI_PRIME, PI_PRIME_LHS, words, z_value

RESULTS = []
G = "gamma_"
M1_VALUES = {G + "xyyxx": 1, G + "xyx": -2}


def criterion(number, title):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            start = time.perf_counter()
            status, detail = "FAIL", ""
            try:
                detail = fn(*args, **kwargs) or ""
                status = "PASS"
            except AssertionError as exc:
                detail = str(exc).splitlines()[0] if str(exc) else "assertion failed"
                raise
            finally:
                line = f"criterion {number} {status} ({time.perf_counter() - start:.1f}s) {title}"
                RESULTS.append(line + (f": {detail}" if detail else ""))
        return run
    return wrap


@functools.lru_cache(maxsize=None)
def pi_bundle():
    return build_wp_chain(PI_PRIME)[1][0]


@functools.lru_cache(maxsize=None)
def m1_bundle():
    return build_wp_grammar(M1, integer_valuation_wp(M1_VALUES))


@criterion(1, "compression of M1")
def test_criterion_1():
    start = time.perf_counter()
    step = compress(M1)
    a, b = G + "xyyxx", G + "xyx"
    assert set(step.sigma) == {word("xyx"), word("xyyxx")}
    assert set(step.target.alphabet) == {a, b}
    assert step.target.relations == (((a, b, a), ()),)
    assert time.perf_counter() - start < 1
    return str(step.target)


@criterion(2, "compression of the Pi' presentation")
def test_criterion_2():
    start = time.perf_counter()
    chain = compress_chain(PI_PRIME)
    a1, a2, a3 = G + "xy", G + "xyx", G + "xyy"
    assert len(chain) == 1
    assert chain.terminal.relations == (((a1,) * 2 + (a2,) * 3 + (a3,) * 4, (a2,)),)
    assert classify(chain.terminal).incompressible
    assert time.perf_counter() - start < 1
    return str(chain.terminal)


@criterion(3, "word_equal against bounded congruence search, all pairs |u|,|v| <= 7")
def test_criterion_3():
    details = []
    for name, p in (("M1", M1), ("M3", M3), ("Pi'", PI_PRIME)):
        brute = BoundedCongruence(RewriteSystem.from_presentation(p), 14)
        ws = list(words("xy", 7))
        total = definite = contradictions = checked = 0
        for i, u in enumerate(ws):
            for v in ws[i:]:
                total += 1
                mine = word_equal(p, u, v)
                if mine is Verdict.UNKNOWN:
                    continue
                definite += 1
                theirs = brute.compare(u, v)
                if theirs is not Verdict.UNKNOWN:
                    checked += 1
                    contradictions += mine is not theirs
        assert contradictions == 0, f"{name}: {contradictions} contradictions"
        assert definite >= 0.95 * total, f"{name}: only {definite}/{total} definite"
        details.append(f"{name} {definite}/{total} definite, {checked} cross-checked")
    return "; ".join(details)


@criterion(4, "closure operations against definitional oracles at bound 6")
def test_criterion_4():
    bound = oracles.BOUND
    # {a^n # a^n} * {b^n # b^n} = { w # w^rev }
    a = oracles.intersect_shape(wp_free_monoid_grammar("a"), "a")
    b = oracles.intersect_shape(wp_free_monoid_grammar("b"), "b")
    product = enumerate_language(alternating_product(a, b), bound)
    assert product == enumerate_language(wp_free_monoid_grammar("ab"), bound)
    assert product == oracles.alternating_oracle(a, b, "ab")
    # the b^n1 # b^n2 example: exact against the definition
    g = finite_language([word("a#a")])
    r = MonadicCfSystem({"a", "b"}, {"a": oracles.star_plus("b")})
    got = enumerate_language(bipartisan_ancestors(g, r, r), bound)
    rules = [(("b",) * n, ("a",)) for n in range(1, bound + 1)]
    assert got == oracles.bipartisan_oracle(g, rules, rules, "ab")
    shown = {("b",) * n1 + ("#",) + ("b",) * n2 for n1 in range(1, bound) for n2 in range(1, bound - n1)}
    assert shown | {word("a#a")} <= got
    # monadic and alpha-monadic worked examples
    bb = MonadicCfSystem.from_rules([(word("bb"), word("a"))])
    assert enumerate_language(monadic_ancestors(finite_language([word("a")]), bb), bound) == {word("a"), word("bb")}
    s = AlphaMonadicSystem(word("xy"), finite_language([word("xyx")]))
    got = enumerate_language(alpha_monadic_ancestors(finite_language([word("xy")]), s), bound)
    assert got == ancestors_bounded({word("xy")}, s.oracle_rules(bound), bound)
    # 25 randomized instances each
    oracles.test_random_monadic_ancestors()
    oracles.test_random_alpha_monadic_ancestors()
    oracles.test_random_alternating_products()
    oracles.test_random_bipartisan_ancestors()
    return "worked examples exact (the bipartisan one includes mixed words such as a#bb), 4 x 25 random instances"


def sealed_shape(alpha, letters):
    sealed = Nfa.from_words([alpha], letters).concat(Nfa.universal(letters))
    sealed = sealed.intersect(Nfa.universal(letters).concat(Nfa.from_words([alpha], letters)))
    return sealed.concat(Nfa.from_words([("#",)], ["#"])).concat(sealed.reverse()).with_alphabet(["#"])


def check_sealed_stage(p, bundle, bound):
    alpha = compress(p).alpha
    got = enumerate_language(bundle.intermediates["sealed_wp"], bound)
    expected = set()
    for n in range(bound):
        for u in words("xy", n, n):
            if u[:len(alpha)] != alpha or u[len(u) - len(alpha):] != alpha:
                continue
            for v in words("xy", bound - 1 - n):
                if v[:len(alpha)] == alpha and v[len(v) - len(alpha):] == alpha and word_equal(p, u, v) is Verdict.EQUAL:
                    expected.add(u + ("#",) + v[::-1])
    assert got == expected, f"sealed stage differs from sealed word-problem pairs ({len(got)} vs {len(expected)})"


@criterion(5, "built word-problem grammar on Pi' and stage equalities at bound 8")
def test_criterion_5():
    bundle = pi_bundle()
    wp = bundle.built_wp
    total = 0
    for n in range(9):
        for k in range(n + 1):
            for u in words("xy", k, k):
                for v in words("xy", n - k, n - k):
                    total += 1
                    expected = word_equal(PI_PRIME, u, v) is Verdict.EQUAL
                    assert accepts(wp, u + ("#",) + v[::-1]) == expected, (u, v)
    # the alpha stage is the ancestors of the free word problem under
    # u # v^rev -> # for sealed pairs, restricted to alpha on both sides
    letters = ["x", "y"]
    alpha = word("xy")
    targets = enumerate_language(wp_free_monoid_grammar(letters), 8)
    lhs = enumerate_language(union(bundle.intermediates["sealed_wp"], wp_free_monoid_grammar(letters)), 8)
    anc = ancestors_bounded(targets, [(w, ("#",)) for w in lhs], 8)
    has_alpha = Nfa.containing(letters, alpha)
    shape = has_alpha.concat(Nfa.from_words([("#",)], ["#"])).concat(has_alpha.reverse()).with_alphabet(["#"])
    assert enumerate_language(bundle.intermediates["alpha_wp"], 8) == {w for w in anc if shape.accepts(w)}
    # sealed stage equals the word problem restricted to sealed pairs
    check_sealed_stage(PI_PRIME, bundle, 8)
    check_sealed_stage(M1, m1_bundle(), 8)
    # beyond the enumeration bound: the relation in random contexts
    rng = random.Random(1)
    lhs, rhs = PI_PRIME.relations[0]
    for _ in range(20):
        left = tuple(rng.choice("xy") for _ in range(rng.randint(0, 4)))
        right = tuple(rng.choice("xy") for _ in range(rng.randint(0, 4)))
        assert accepts(wp, left + lhs + right + ("#",) + (left + rhs + right)[::-1])
        assert accepts(bundle.intermediates["sealed_wp"], lhs + ("#",) + rhs[::-1])
    return f"{total} pairs agree; built grammar has {wp.size} productions"


@criterion(6, "extraction inverts the build at bound 8 (Pi' and M1)")
def test_criterion_6():
    sizes = []
    for p, bundle in ((PI_PRIME, pi_bundle()), (M1, m1_bundle())):
        step = compress(p)
        back = extract_lm_wp_grammar(p, bundle.built_wp, step)
        within = wp_shape(list(step.gamma)).with_alphabet(["#"])
        got = enumerate_language(back, 8, within)
        assert got == enumerate_language(bundle.base_wp, 8, within)
        assert got == enumerate_language(back, 8)
        sizes.append(len(got))
    return f"{sizes[0]} and {sizes[1]} words agree"


def random_nfa(rng):
    states = rng.randint(1, 4)
    trans = {}
    for _ in range(rng.randint(1, 2 * states + 1)):
        key = (rng.randrange(states), rng.choice("xy"))
        trans.setdefault(key, set()).add(rng.randrange(states))
    accepting = {q for q in range(states) if rng.random() < 0.4} or {rng.randrange(states)}
    return Nfa(frozenset("xy"), states, trans, {0}, accepting)


@criterion(7, "rational subset membership on Pi', 50 random instances")
def test_criterion_7():
    wp = pi_bundle().built_wp
    lhs = PI_PRIME.alphabet.tokenize(PI_PRIME_LHS)
    assert rational_membership(wp, word("xyxxy"), Nfa.from_words([lhs], "xy"))
    rng = random.Random(2024)
    positives = 0
    for i in range(50):
        r = random_nfa(rng)
        w = tuple(rng.choice("xy") for _ in range(rng.randint(0, 6)))
        brute = any(word_equal(PI_PRIME, w, v) is Verdict.EQUAL for v in candidate(r, 8))
        assert rational_membership(wp, w, r) == brute, f"instance {i}"
        positives += brute
    # finite R holding a long word equal to w (or a near miss), checked exhaustively
    rhs = PI_PRIME.relations[0][1]
    planted = 0
    for i in range(20):
        left = tuple(rng.choice("xy") for _ in range(rng.randint(0, 3)))
        right = tuple(rng.choice("xy") for _ in range(rng.randint(0, 3)))
        long = left + lhs + right
        if rng.random() < 0.5:
            k = rng.randrange(len(long))
            long = long[:k] + ({"x": "y", "y": "x"}[long[k]],) + long[k + 1:]
        finite = [long, tuple(rng.choice("xy") for _ in range(4))]
        r = Nfa.from_words(finite, "xy")
        w = left + rhs + right
        brute = any(word_equal(PI_PRIME, w, v) is Verdict.EQUAL for v in finite)
        assert rational_membership(wp, w, r) == brute, f"planted instance {i}"
        planted += brute
    return f"50/50 random agree ({positives} positive); 20/20 planted agree ({planted} positive)"


def candidate(r, maxlen):
    return [v for v in words("xy", maxlen) if r.accepts(v)]


@criterion(8, "subspecial monoid M3: idempotent and special compression")
def test_criterion_8():
    assert has_nontrivial_idempotent(M3) is Answer.YES
    chain = compress_chain(M3)
    assert len(chain) == 1 and is_special(chain.terminal)
    a, b = G + "xy", G + "xyy"
    # the pieces are xy and xyy only, so the special form has two generators
    assert len(chain.terminal.alphabet) == 2
    assert chain.terminal.relations == (((a, b, a), ()),)
    values = {a: 1, b: -2}
    wp = integer_valuation_wp(values)
    solver = CompletionSolver()
    for u in words((a, b), 5):
        for v in words((a, b), 3):
            expected = z_value(u, values) == z_value(v, values)
            assert (word_equal(chain.terminal, u, v, solver) is Verdict.EQUAL) == expected
            assert (word_equal(chain.terminal, u, v, GrammarSolver(wp)) is Verdict.EQUAL) == expected
    # a is a unit with inverse b a, and b = a^-2: the group of units is Z
    assert word_equal(chain.terminal, (a, b, a), (), solver) is Verdict.EQUAL
    assert word_equal(chain.terminal, (b, a, a), (), solver) is Verdict.EQUAL
    return str(chain.terminal)


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
    print("\n".join(RESULTS))
