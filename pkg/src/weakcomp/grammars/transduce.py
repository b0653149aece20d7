"""Triple constructions: grammar x automaton and grammar x transducer.

Both operations run one agenda-driven chart over items ``(p, X, q)`` meaning
"symbol X derives a word that drives the machine from p to q".  Only
derivable items are ever created, and productions are emitted top-down from
the start items, so the result is already trim before simplification.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence, Tuple

from ..presentations import MARKER, Word
from .automata import Nfa
from .cfg import Cfg, GrammarBuilder, Symbol, hom_image


def _binarize(g: Cfg):
    n = g.nonterminal_count
    nullary, unary, binary = [], [], []
    fresh = n
    for head, body in g.productions:
        if not body:
            nullary.append(head)
        elif len(body) == 1:
            unary.append((head, body[0]))
        else:
            a = head
            for s in body[:-2]:
                binary.append((a, s, fresh))
                a = fresh
                fresh += 1
            binary.append((a, body[-2], body[-1]))
    return nullary, unary, binary


class _Chart:
    def __init__(self, g: Cfg, states: int, arcs: Mapping[int, Iterable[tuple[str, int]]]):
        nullary, unary, binary = _binarize(g)
        self.nullary = set(nullary)
        self.unary_of = defaultdict(list)
        self.binary_of = defaultdict(list)
        up = defaultdict(list)
        left = defaultdict(list)
        right = defaultdict(list)
        for a, x in unary:
            up[x].append(a)
            self.unary_of[a].append(x)
        for a, x, y in binary:
            left[x].append((a, y))
            right[y].append((a, x))
            self.binary_of[a].append((x, y))
        self.ends: dict = defaultdict(set)
        starts: dict = defaultdict(set)
        agenda = []

        def add(p, x, q):
            if q not in self.ends[(p, x)]:
                self.ends[(p, x)].add(q)
                starts[(q, x)].add(p)
                agenda.append((p, x, q))

        terminals = g.terminals
        for p, outs in arcs.items():
            for a, q in outs:
                if a in terminals:
                    add(p, a, q)
        for a in nullary:
            for p in range(states):
                add(p, a, p)
        while agenda:
            p, x, q = agenda.pop()
            for a in up.get(x, ()):
                add(p, a, q)
            for a, y in left.get(x, ()):
                for r in list(self.ends.get((q, y), ())):
                    add(p, a, r)
            for a, z in right.get(x, ()):
                for o in list(starts.get((p, z), ())):
                    add(o, a, q)

    def has(self, p, x, q) -> bool:
        return q in self.ends.get((p, x), ())

    def emit(self, b: GrammarBuilder, roots: Iterable[tuple[int, Symbol, int]],
             terminal: Callable[[int, str, int], list[Sequence[Symbol]]]) -> dict:
        """Emit productions for every item reachable from ``roots``; returns
        the mapping from root items to builder symbols."""
        inline: dict = {}

        def ref(item):
            p, x, q = item
            if isinstance(x, str):
                if item not in inline:
                    bodies = terminal(p, x, q)
                    if len(bodies) == 1:
                        inline[item] = tuple(bodies[0])
                    else:
                        head = b.nt(("t", item))
                        for body in bodies:
                            b.add(head, body)
                        inline[item] = (head,)
                return inline[item]
            key = ("i", item)
            if key not in seen:
                seen.add(key)
                todo.append(item)
            return (b.nt(key),)

        seen: set = set()
        todo: list = []
        out = {item: ref(item) for item in roots}
        while todo:
            item = todo.pop()
            p, a, q = item
            head = b.nt(("i", item))
            if a in self.nullary and p == q:
                b.add(head, ())
            for x in self.unary_of.get(a, ()):
                if self.has(p, x, q):
                    b.add(head, ref((p, x, q)))
            for x, y in self.binary_of.get(a, ()):
                for m in self.ends.get((p, x), ()):
                    if self.has(m, y, q):
                        b.add(head, ref((p, x, m)) + ref((m, y, q)))
        return out


def intersect_regular(g: Cfg, n: Nfa, stage: Optional[str] = None) -> Cfg:
    """Bar-Hillel product: a grammar for L(g) intersected with L(n)."""
    if not g.productions:
        return g
    chart = _Chart(g, n.states, n.arcs())
    b = GrammarBuilder()
    s = b.nt("S")
    roots = [(i, g.start, f) for i in sorted(n.initial) for f in sorted(n.accepting) if chart.has(i, g.start, f)]
    refs = chart.emit(b, roots, lambda p, a, q: [(a,)])
    for item in roots:
        b.add(s, refs[item])
    return b.build(s, g.terminals, stage)


@dataclass(frozen=True, eq=False)
class Fst:
    """Finite transducer; a transition reads one letter (or nothing, for
    ``None``) and writes a word."""

    input_alphabet: frozenset
    output_alphabet: frozenset
    states: int
    transitions: Tuple[Tuple[int, Optional[str], Word, int], ...]
    initial: frozenset
    accepting: frozenset

    def __post_init__(self):
        for name in ("input_alphabet", "output_alphabet", "initial", "accepting"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        object.__setattr__(self, "transitions", tuple((p, a, tuple(o), q) for p, a, o, q in self.transitions))
        for p, a, out, q in self.transitions:
            if a is not None and a not in self.input_alphabet:
                raise ValueError(f"input letter {a!r} not declared")
            if any(c not in self.output_alphabet for c in out):
                raise ValueError(f"output {out} not over the output alphabet")

    def run(self, w: Sequence[str], maxout: Optional[int] = None, limit: int = 100_000) -> set[Word]:
        """All outputs on input ``w``, or only those of length <= ``maxout``
        (exact in that case).  Unbounded epsilon loops are cut at ``limit``
        configurations."""
        eps = defaultdict(list)
        step = defaultdict(list)
        for p, a, out, q in self.transitions:
            (eps[p] if a is None else step[(p, a)]).append((out, q))

        def fits(o):
            return maxout is None or len(o) <= maxout

        def closure(configs):
            configs = {c for c in configs if fits(c[1])}
            stack = list(configs)
            while stack and len(configs) < limit:
                p, o = stack.pop()
                for out, q in eps[p]:
                    c = (q, o + out)
                    if c not in configs and fits(c[1]):
                        configs.add(c)
                        stack.append(c)
            return configs

        configs = closure({(i, ()) for i in self.initial})
        for a in w:
            configs = closure({(q, o + out) for p, o in configs for out, q in step[(p, a)]})
        return {o for p, o in configs if p in self.accepting}

    @classmethod
    def identity(cls, alphabet: Iterable[str]) -> "Fst":
        alphabet = frozenset(alphabet)
        return cls(alphabet, alphabet, 1, tuple((0, a, (a,), 0) for a in sorted(alphabet)), {0}, {0})

    @classmethod
    def substitution(cls, left: Mapping[str, Sequence[str]], right: Optional[Mapping[str, Sequence[str]]] = None,
                     marker: str = MARKER) -> "Fst":
        """Homomorphism, optionally different on each side of the marker.
        Each side's map must cover that side's letters."""
        trans = []
        sides = [left] if right is None else [left, right]
        for state, h in enumerate(sides):
            trans += [(state, a, tuple(img), state) for a, img in h.items()]
        if right is not None:
            trans.append((0, marker, (marker,), 1))
        ins = set().union(*(h.keys() for h in sides)) | ({marker} if right is not None else set())
        outs = set().union(*(set(img) for h in sides for img in h.values())) | ({marker} if right is not None else set())
        final = {0} if right is None else {1}
        return cls(frozenset(ins), frozenset(outs), len(sides), tuple(trans), {0}, final)

    @classmethod
    def inverse_substitution(cls, left: Mapping[str, Sequence[str]],
                             right: Optional[Mapping[str, Sequence[str]]] = None,
                             marker: str = MARKER) -> "Fst":
        """Transducer for h^-1: reads h(c) and writes c.  With ``right``,
        the map switches after the (copied) marker."""
        trans = []
        count = 2 if right is not None else 1
        ins, outs = set(), set()
        for state, h in enumerate([left] if right is None else [left, right]):
            trie: dict = {(): state}
            for c, img in h.items():
                img = tuple(img)
                outs.add(c)
                ins.update(img)
                if not img:
                    trans.append((state, None, (c,), state))
                    continue
                for i in range(len(img) - 1):
                    if img[:i + 1] not in trie:
                        trie[img[:i + 1]] = count
                        count += 1
                        trans.append((trie[img[:i]], img[i], (), trie[img[:i + 1]]))
                trans.append((trie[img[:-1]], img[-1], (c,), state))
        if right is not None:
            trans.append((0, marker, (marker,), 1))
            ins.add(marker)
            outs.add(marker)
        final = {0} if right is None else {1}
        return cls(frozenset(ins), frozenset(outs), count, tuple(trans), {0}, final)


def apply_fst(g: Cfg, t: Fst, stage: Optional[str] = None) -> Cfg:
    """Grammar for the image t(L(g))."""
    if not g.productions:
        return Cfg.empty(t.output_alphabet)
    eps = defaultdict(list)
    letter = defaultdict(list)
    for p, a, out, q in t.transitions:
        if a is None:
            eps[p].append((out, q))
        else:
            letter[(p, a)].append((out, q))
    closure = {}
    for p in range(t.states):
        seen = {p}
        stack = [p]
        while stack:
            x = stack.pop()
            for _, y in eps[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        closure[p] = seen
    has_eps = any(eps.values())

    arcs = defaultdict(set)
    for p in range(t.states):
        for m in closure[p]:
            for (src, a), outs in letter.items():
                if src == m:
                    for _, q in outs:
                        arcs[p].add((a, q))
    arcs = {p: sorted(v) for p, v in arcs.items()}
    chart = _Chart(g, t.states, arcs)
    b = GrammarBuilder()

    def eps_path(p, m) -> tuple:
        if not has_eps:
            return ()
        return (b.nt(("e", p, m)),)

    if has_eps:
        for p in range(t.states):
            for m in closure[p]:
                head = b.nt(("e", p, m))
                if p == m:
                    b.add(head, ())
                for out, y in eps[p]:
                    if m in closure[y]:
                        b.add(head, tuple(out) + (b.nt(("e", y, m)),))

    def terminal(p, a, q):
        bodies = []
        for m in sorted(closure[p]):
            for out, q2 in letter.get((m, a), ()):
                if q2 == q:
                    bodies.append(eps_path(p, m) + tuple(out))
        return bodies

    s = b.nt("S")
    roots = []
    for i in sorted(t.initial):
        for q in range(t.states):
            if chart.has(i, g.start, q):
                finals = [f for f in sorted(closure[q]) if f in t.accepting]
                if finals:
                    roots.append((i, g.start, q, finals))
    refs = chart.emit(b, [(i, x, q) for i, x, q, _ in roots], terminal)
    for i, x, q, finals in roots:
        for f in finals:
            b.add(s, refs[(i, x, q)] + eps_path(q, f))
    return b.build(s, t.output_alphabet, stage)


def inverse_hom(g: Cfg, h: Mapping[str, Sequence[str]], stage: Optional[str] = None) -> Cfg:
    """Grammar for h^-1(L(g)) = { w : h(w) in L(g) }."""
    return apply_fst(g, Fst.inverse_substitution(h), stage)


def identity_language_grammar(wp: Cfg, alphabet: Iterable[str], marker: str = MARKER) -> Cfg:
    """{ u : u # in L(wp) }, the words equal to the identity."""
    letters = list(alphabet)
    tail = Nfa.universal(letters).concat(Nfa.from_words([(marker,)], [marker]))
    return hom_image(intersect_regular(wp, tail), {marker: ()}).with_terminals(letters)
