"""Nondeterministic finite automata without epsilon moves."""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

from ..presentations import Word

STATE_GUARD = 10_000


@dataclass(frozen=True, eq=False)
class Nfa:
    alphabet: frozenset
    states: int
    transitions: Mapping[tuple[int, str], frozenset]
    initial: frozenset
    accepting: frozenset

    def __post_init__(self):
        object.__setattr__(self, "alphabet", frozenset(self.alphabet))
        object.__setattr__(self, "initial", frozenset(self.initial))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        trans = {}
        for (p, a), qs in self.transitions.items():
            if a not in self.alphabet:
                raise ValueError(f"transition on undeclared letter {a!r}")
            if qs:
                trans[(p, a)] = frozenset(qs)
        object.__setattr__(self, "transitions", trans)

    # -- queries ----------------------------------------------------------

    def step(self, states: frozenset, a: str) -> frozenset:
        out = set()
        for p in states:
            out |= self.transitions.get((p, a), frozenset())
        return frozenset(out)

    def accepts(self, w: Sequence[str]) -> bool:
        states = self.initial
        for a in w:
            states = self.step(states, a)
            if not states:
                return False
        return bool(states & self.accepting)

    @cached_property
    def _live(self) -> frozenset:
        back = defaultdict(set)
        for (p, _), qs in self.transitions.items():
            for q in qs:
                back[q].add(p)
        seen = set(self.accepting)
        queue = deque(seen)
        while queue:
            q = queue.popleft()
            for p in back[q] - seen:
                seen.add(p)
                queue.append(p)
        return frozenset(seen)

    def can_accept(self, states: frozenset) -> bool:
        return bool(states & self._live)

    def is_empty(self) -> bool:
        return not self.can_accept(self.initial)

    def arcs(self) -> dict[int, list[tuple[str, int]]]:
        out = defaultdict(list)
        for (p, a), qs in sorted(self.transitions.items(), key=lambda kv: (kv[0][0], kv[0][1])):
            for q in sorted(qs):
                out[p].append((a, q))
        return out

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_words(cls, words: Iterable[Sequence[str]], alphabet: Iterable[str]) -> "Nfa":
        """Trie automaton for a finite language."""
        trans: dict[tuple[int, str], set] = defaultdict(set)
        index = {(): 0}
        accepting = set()
        for w in words:
            w = tuple(w)
            for i in range(len(w)):
                if w[:i + 1] not in index:
                    index[w[:i + 1]] = len(index)
                trans[(index[w[:i]], w[i])].add(index[w[:i + 1]])
            accepting.add(index[w])
        return cls(frozenset(alphabet), len(index), trans, {0}, accepting)

    @classmethod
    def universal(cls, alphabet: Iterable[str]) -> "Nfa":
        alphabet = frozenset(alphabet)
        return cls(alphabet, 1, {(0, a): {0} for a in alphabet}, {0}, {0})

    @classmethod
    def empty(cls, alphabet: Iterable[str]) -> "Nfa":
        return cls(frozenset(alphabet), 1, {}, {0}, set())

    @classmethod
    def epsilon(cls, alphabet: Iterable[str]) -> "Nfa":
        return cls(frozenset(alphabet), 1, {}, {0}, {0})

    @classmethod
    def avoiding(cls, alphabet: Iterable[str], pattern: Word) -> "Nfa":
        """A* - A* pattern A*, as the KMP matching automaton minus its
        final state."""
        alphabet = frozenset(alphabet)
        pattern = tuple(pattern)
        if not pattern:
            return cls.empty(alphabet)
        k = len(pattern)
        fail = [0] * (k + 1)
        for i in range(1, k):
            j = fail[i]
            while j and pattern[i] != pattern[j]:
                j = fail[j]
            fail[i + 1] = j + 1 if pattern[i] == pattern[j] else 0
        trans = {}
        for state in range(k):
            for a in alphabet:
                j = state
                while j and pattern[j] != a:
                    j = fail[j]
                nxt = j + 1 if pattern[j] == a else 0
                if nxt < k:
                    trans[(state, a)] = {nxt}
        return cls(alphabet, k, trans, {0}, set(range(k)))

    @classmethod
    def containing(cls, alphabet: Iterable[str], pattern: Word) -> "Nfa":
        return cls.avoiding(alphabet, pattern).complement()

    @classmethod
    def sequence(cls, *parts: "Nfa") -> "Nfa":
        out = parts[0]
        for p in parts[1:]:
            out = out.concat(p)
        return out

    # -- operations -------------------------------------------------------

    def with_alphabet(self, alphabet: Iterable[str]) -> "Nfa":
        return Nfa(self.alphabet | frozenset(alphabet), self.states, self.transitions, self.initial, self.accepting)

    def _shifted(self, offset: int) -> dict:
        return {(p + offset, a): {q + offset for q in qs} for (p, a), qs in self.transitions.items()}

    def union(self, other: "Nfa") -> "Nfa":
        n = self.states
        trans = dict(self.transitions)
        trans.update(other._shifted(n))
        return Nfa(self.alphabet | other.alphabet, n + other.states, trans,
                   self.initial | {q + n for q in other.initial},
                   self.accepting | {q + n for q in other.accepting})

    def concat(self, other: "Nfa") -> "Nfa":
        n = self.states
        trans: dict = defaultdict(set)
        for key, qs in self.transitions.items():
            trans[key] |= qs
        for key, qs in other._shifted(n).items():
            trans[key] |= qs
        for f in self.accepting:
            for i in other.initial:
                for (p, a), qs in other.transitions.items():
                    if p == i:
                        trans[(f, a)] |= {q + n for q in qs}
        initial = set(self.initial)
        if other.initial & other.accepting:
            accepting = self.accepting | {q + n for q in other.accepting}
        else:
            accepting = {q + n for q in other.accepting}
        if self.initial & self.accepting:
            initial |= {q + n for q in other.initial}
        return Nfa(self.alphabet | other.alphabet, n + other.states, trans, initial, accepting)

    def star(self) -> "Nfa":
        n = self.states
        trans: dict = defaultdict(set)
        for key, qs in self.transitions.items():
            trans[key] |= qs
        entry = [(a, qs) for (p, a), qs in self.transitions.items() if p in self.initial]
        for a, qs in entry:
            trans[(n, a)] |= qs
            for f in self.accepting:
                trans[(f, a)] |= qs
        return Nfa(self.alphabet, n + 1, trans, {n}, self.accepting | {n})

    def plus(self) -> "Nfa":
        return self.concat(self.star())

    def reverse(self) -> "Nfa":
        trans: dict = defaultdict(set)
        for (p, a), qs in self.transitions.items():
            for q in qs:
                trans[(q, a)].add(p)
        return Nfa(self.alphabet, self.states, trans, self.accepting, self.initial)

    def intersect(self, other: "Nfa") -> "Nfa":
        alphabet = self.alphabet & other.alphabet
        index: dict[tuple[int, int], int] = {}
        queue = deque()
        for pair in ((i, j) for i in self.initial for j in other.initial):
            index[pair] = len(index)
            queue.append(pair)
        trans = {}
        while queue:
            p, q = pair = queue.popleft()
            for a in alphabet:
                targets = set()
                for p2 in self.transitions.get((p, a), ()):
                    for q2 in other.transitions.get((q, a), ()):
                        if (p2, q2) not in index:
                            index[(p2, q2)] = len(index)
                            queue.append((p2, q2))
                        targets.add(index[(p2, q2)])
                if targets:
                    trans[(index[pair], a)] = targets
        accepting = {i for (p, q), i in index.items() if p in self.accepting and q in other.accepting}
        initial = {index[(i, j)] for i in self.initial for j in other.initial}
        return Nfa(alphabet, max(len(index), 1), trans, initial, accepting)

    def determinize(self) -> "Nfa":
        """Complete deterministic automaton (dead state included)."""
        letters = sorted(self.alphabet)
        start = self.initial
        index = {start: 0}
        queue = deque([start])
        trans = {}
        while queue:
            s = queue.popleft()
            for a in letters:
                t = self.step(s, a)
                if t not in index:
                    if len(index) >= STATE_GUARD:
                        raise RuntimeError(f"determinization exceeded {STATE_GUARD} states")
                    index[t] = len(index)
                    queue.append(t)
                trans[(index[s], a)] = {index[t]}
        accepting = {i for s, i in index.items() if s & self.accepting}
        return Nfa(self.alphabet, len(index), trans, {0}, accepting)

    def complement(self) -> "Nfa":
        d = self.determinize()
        return Nfa(d.alphabet, d.states, d.transitions, d.initial, set(range(d.states)) - d.accepting)

    def difference(self, other: "Nfa") -> "Nfa":
        return self.intersect(other.with_alphabet(self.alphabet).complement())

    def minimize(self) -> "Nfa":
        """Minimal trim DFA by Moore partition refinement."""
        d = self.determinize()
        letters = sorted(d.alphabet)
        delta = {(p, a): next(iter(qs)) for (p, a), qs in d.transitions.items()}
        block = {p: int(p in d.accepting) for p in range(d.states)}
        while True:
            sig = {p: (block[p],) + tuple(block[delta[(p, a)]] for a in letters) for p in range(d.states)}
            names: dict = {}
            new = {p: names.setdefault(sig[p], len(names)) for p in range(d.states)}
            if len(names) == len(set(block.values())):
                block = new
                break
            block = new
        trans = defaultdict(set)
        for (p, a), q in delta.items():
            trans[(block[p], a)].add(block[q])
        m = Nfa(d.alphabet, len(set(block.values())), trans, {block[0]},
                {block[p] for p in d.accepting})
        return m.trim()

    def trim(self) -> "Nfa":
        """Drop states that are unreachable or cannot reach acceptance."""
        reach = set(self.initial)
        queue = deque(reach)
        while queue:
            p = queue.popleft()
            for a in self.alphabet:
                for q in self.transitions.get((p, a), ()):
                    if q not in reach:
                        reach.add(q)
                        queue.append(q)
        keep = sorted(reach & self._live)
        if not keep:
            return Nfa.empty(self.alphabet)
        ren = {p: i for i, p in enumerate(keep)}
        trans = {}
        for (p, a), qs in self.transitions.items():
            if p in ren:
                targets = {ren[q] for q in qs if q in ren}
                if targets:
                    trans[(ren[p], a)] = targets
        return Nfa(self.alphabet, len(keep), trans, {ren[p] for p in self.initial if p in ren},
                   {ren[p] for p in self.accepting if p in ren})

    # -- text format ------------------------------------------------------

    def to_text(self) -> str:
        lines = ["alphabet: " + " ".join(sorted(self.alphabet)),
                 f"states: {self.states}",
                 "initial: " + " ".join(map(str, sorted(self.initial))),
                 "accepting: " + " ".join(map(str, sorted(self.accepting)))]
        for p, arcs in sorted(self.arcs().items()):
            lines += [f"{p} {a} {q}" for a, q in arcs]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Nfa":
        from ..presentations import PresentationError

        alphabet: Optional[list] = None
        states = None
        initial: set = set()
        accepting: set = set()
        trans: dict = defaultdict(set)
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.startswith("//"):
                continue
            if ":" in line:
                key, _, value = line.partition(":")
                key = key.strip()
                try:
                    if key == "alphabet":
                        alphabet = value.split()
                    elif key == "states":
                        states = int(value)
                    elif key == "initial":
                        initial = {int(x) for x in value.split()}
                    elif key == "accepting":
                        accepting = {int(x) for x in value.split()}
                    else:
                        raise PresentationError(f"unknown key {key!r}", lineno)
                except ValueError as exc:
                    if isinstance(exc, PresentationError):
                        raise
                    raise PresentationError(str(exc), lineno) from None
                continue
            parts = line.split()
            if len(parts) != 3:
                raise PresentationError(f"expected 'state letter state', got {line!r}", lineno)
            try:
                trans[(int(parts[0]), parts[1])].add(int(parts[2]))
            except ValueError:
                raise PresentationError(f"bad state number in {line!r}", lineno) from None
        if alphabet is None:
            raise PresentationError("missing alphabet line")
        used = [p for p, _ in trans] + [q for qs in trans.values() for q in qs] + list(initial) + list(accepting)
        count = states if states is not None else (max(used) + 1 if used else 1)
        try:
            return cls(frozenset(alphabet), count, trans, initial, accepting)
        except ValueError as exc:
            raise PresentationError(str(exc)) from None
