import itertools

import pytest

from weakcomp.presentations import Alphabet, MonoidPresentation

M1 = MonoidPresentation.of("xy", ("xyyxxxyxxyyxxxy", "xy"))
M3 = MonoidPresentation.of("xy", ("xyxyyxyx", "x"))
PI_PRIME_LHS = "xy" * 2 + "xyx" * 3 + "xyy" * 4 + "xy"
PI_PRIME = MonoidPresentation.of("xy", (PI_PRIME_LHS, "xyxxy"))
FREE = MonoidPresentation(Alphabet(("x", "y")))


def words(letters, maxlen, minlen=0):
    for n in range(minlen, maxlen + 1):
        yield from itertools.product(letters, repeat=n)


def z_value(w, values):
    return sum(values[a] for a in w)


@pytest.fixture(scope="session")
def m1():
    return M1


@pytest.fixture(scope="session")
def m3():
    return M3


@pytest.fixture(scope="session")
def pi_prime():
    return PI_PRIME


def naive_member(productions, start, w):
    """Fixpoint over spans: which symbols derive w[i:j].  Shares no code with
    the library's parser."""
    w = tuple(w)
    n = len(w)
    derives = {(i, j): set() for i in range(n + 1) for j in range(i, n + 1)}

    def matches(body, i, j):
        ends = {i}
        for s in body:
            nxt = set()
            for k in ends:
                for m in range(k, j + 1):
                    if isinstance(s, str):
                        if m == k + 1 and w[k] == s:
                            nxt.add(m)
                    elif s in derives[(k, m)]:
                        nxt.add(m)
            ends = nxt
        return j in ends

    changed = True
    while changed:
        changed = False
        for (i, j), found in derives.items():
            for head, body in productions:
                if head not in found and matches(body, i, j):
                    found.add(head)
                    changed = True
    return start in derives[(0, n)]


def random_grammar(rng, letters="ab", heads=3, count=6, maxbody=3):
    productions = []
    for _ in range(count):
        head = rng.randrange(heads)
        body = tuple(rng.choice(list(letters) + list(range(heads))) for _ in range(rng.randint(0, maxbody)))
        productions.append((head, body))
    productions.append((0, (rng.choice(letters),)))
    return productions


def random_nfa(rng, letters="ab", states=3, arcs=5):
    from weakcomp.grammars.automata import Nfa

    trans = {}
    for _ in range(arcs):
        key = (rng.randrange(states), rng.choice(letters))
        trans.setdefault(key, set()).add(rng.randrange(states))
    accepting = {q for q in range(states) if rng.random() < 0.5} or {states - 1}
    return Nfa(frozenset(letters), states, trans, {0}, accepting)


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
