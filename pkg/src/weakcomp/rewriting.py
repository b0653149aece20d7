"""String rewriting: one-step rewriting, bounded equality/ancestry oracles,
critical pairs and a bounded Knuth-Bendix completion under shortlex."""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Tuple

from .grammars.cfg import Cfg, accepts, enumerate_language, member
from .presentations import Alphabet, MonoidPresentation, Word, contains, occurrences, oriented

Rule = Tuple[Word, Word]


class Verdict(str, enum.Enum):
    EQUAL = "equal"
    DISTINCT = "distinct"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class RewriteSystem:
    """Rules ``lhs -> rhs``.  ``grammar_rules`` holds (rhs, Cfg) pairs where
    every word of the grammar's language is a left-hand side for ``rhs``."""

    alphabet: Alphabet
    rules: Tuple[Rule, ...] = ()
    grammar_rules: Tuple[Tuple[Word, Cfg], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple((tuple(l), tuple(r)) for l, r in self.rules))

    @classmethod
    def from_presentation(cls, p: MonoidPresentation) -> "RewriteSystem":
        return cls(p.alphabet, tuple(oriented(u, v) for u, v in p.relations if u != v))

    @property
    def finite(self) -> bool:
        return not self.grammar_rules

    @property
    def monadic(self) -> bool:
        if not all(len(l) >= len(r) and len(r) <= 1 for l, r in self.rules):
            return False
        for rhs, g in self.grammar_rules:
            if len(rhs) > 1 or (rhs and member(g, ())):
                return False
        return True

    @property
    def special(self) -> bool:
        return all(not r for _, r in self.rules) and all(not rhs for rhs, _ in self.grammar_rules)

    def reversed(self) -> "RewriteSystem":
        from .grammars.cfg import reverse as reverse_grammar

        return RewriteSystem(
            self.alphabet,
            tuple((l[::-1], r[::-1]) for l, r in self.rules),
            tuple((rhs[::-1], reverse_grammar(g)) for rhs, g in self.grammar_rules),
        )

    def to_text(self) -> str:
        from .presentations import spell

        if not self.finite:
            raise ValueError("only finite rule sets have a text form")
        lines = ["gens: " + " ".join(self.alphabet)]
        lines += [f"rule: {spell(l)} -> {spell(r)}" for l, r in self.rules]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RewriteSystem":
        from .presentations import PresentationError

        gens, rules = [], []
        for lineno, line in enumerate(text.splitlines(), 1):
            if line.startswith("rule:"):
                lhs, arrow, rhs = line[5:].partition("->")
                if not arrow:
                    raise PresentationError("rule needs '->'", lineno)
                rules.append(f"rel: {lhs} = {rhs}")
            else:
                gens.append(line)
        p = MonoidPresentation.from_text("\n".join(gens + rules))
        return cls(p.alphabet, p.relations)


def rewrite_once(w: Word, r: RewriteSystem) -> set[Word]:
    out: set[Word] = set()
    for lhs, rhs in r.rules:
        k = len(lhs)
        for i in occurrences(w, lhs):
            out.add(w[:i] + rhs + w[i + k:])
    for rhs, g in r.grammar_rules:
        for i in range(len(w) + 1):
            for j in range(i, len(w) + 1):
                if accepts(g, w[i:j]):
                    out.add(w[:i] + rhs + w[j:])
    return out


def _neighbours(w: Word, rules: Iterable[Rule]) -> Iterable[Word]:
    for lhs, rhs in rules:
        for a, b in ((lhs, rhs), (rhs, lhs)):
            k = len(a)
            for i in occurrences(w, a):
                yield w[:i] + b + w[i + k:]


class BoundedCongruence:
    """Connected components of the undirected rewrite graph on words of
    length at most ``maxlen``.  A component is *closed* when no explored
    word has a neighbour beyond the bound; only closed components justify a
    ``DISTINCT`` verdict."""

    def __init__(self, r: RewriteSystem, maxlen: int, maxstates: int = 200_000):
        if not r.finite:
            raise ValueError("bounded equality needs a finite rule set")
        self.rules = tuple(r.rules)
        self.maxlen = maxlen
        self.maxstates = maxstates
        self._component: dict[Word, tuple[frozenset, bool]] = {}

    def component(self, u: Word, stop_at: Optional[Word] = None) -> tuple[frozenset, bool]:
        """(words, closed).  ``closed`` is False if the search left the
        length bound or ran out of states."""
        hit = self._component.get(u)
        if hit is not None:
            return hit
        seen = {u}
        queue = deque([u])
        closed = True
        while queue:
            w = queue.popleft()
            for n in _neighbours(w, self.rules):
                if len(n) > self.maxlen:
                    closed = False
                elif n not in seen:
                    seen.add(n)
                    queue.append(n)
                    if len(seen) > self.maxstates:
                        return frozenset(seen), False
                    if n == stop_at:
                        return frozenset(seen), False
        result = (frozenset(seen), closed)
        for w in seen:
            self._component[w] = result
        return result

    def compare(self, u: Word, v: Word) -> Verdict:
        if u == v:
            return Verdict.EQUAL
        words, closed = self.component(u, stop_at=v)
        if v in words:
            return Verdict.EQUAL
        return Verdict.DISTINCT if closed else Verdict.UNKNOWN


def equal_bounded(u: Word, v: Word, r: RewriteSystem, maxlen: int, maxstates: int = 200_000) -> Verdict:
    if maxlen < max(len(u), len(v)):
        raise ValueError("maxlen must cover both words")
    return BoundedCongruence(r, maxlen, maxstates).compare(tuple(u), tuple(v))


def ancestors_bounded(target: Iterable[Word], r, maxlen: int) -> set[Word]:
    """All words of length <= maxlen that rewrite into ``target``.

    ``r`` is a :class:`RewriteSystem` or a plain iterable of rules.  Searches
    backwards from the targets; with length-non-increasing rules no
    intermediate word can exceed the length of the ancestor, so the search
    is exhaustive within the bound.
    """
    if isinstance(r, RewriteSystem):
        rules = list(r.rules)
        grammar_rules = r.grammar_rules
    else:
        rules = [(tuple(l), tuple(s)) for l, s in r]
        grammar_rules = ()
    for lhs, rhs in rules:
        if len(lhs) < len(rhs):
            raise ValueError(f"length-increasing rule {lhs} -> {rhs}")
    for rhs, g in grammar_rules:
        short = enumerate_language(g, len(rhs) - 1) if rhs else set()
        if short:
            raise ValueError(f"grammar rule for {rhs} has a shorter left-hand side")
        rules.extend((lhs, rhs) for lhs in enumerate_language(g, maxlen))
    result = {tuple(x) for x in target if len(x) <= maxlen}
    queue = deque(result)
    while queue:
        x = queue.popleft()
        for lhs, rhs in rules:
            grow = len(lhs) - len(rhs)
            if len(x) + grow > maxlen:
                continue
            k = len(rhs)
            for i in occurrences(x, rhs):
                w = x[:i] + lhs + x[i + k:]
                if w not in result:
                    result.add(w)
                    queue.append(w)
    return result


# --- complete systems -----------------------------------------------------


def shortlex_key(alphabet: Alphabet):
    rank = {a: i for i, a in enumerate(alphabet)}
    return lambda w: (len(w), tuple(rank[a] for a in w))


@lru_cache(maxsize=1 << 16)
def normal_form(w: Word, rules: Tuple[Rule, ...]) -> Word:
    """Leftmost reduction to an irreducible word.  Terminates whenever every
    rule decreases in a well-order such as shortlex."""
    w = tuple(w)
    changed = True
    while changed:
        changed = False
        best = None
        for lhs, rhs in rules:
            k = len(lhs)
            for i in range(len(w) - k + 1):
                if best is not None and i >= best[0]:
                    break
                if w[i:i + k] == lhs:
                    best = (i, lhs, rhs)
                    break
        if best is not None:
            i, lhs, rhs = best
            w = w[:i] + rhs + w[i + len(lhs):]
            changed = True
    return w


def critical_pairs(r1: Rule, r2: Rule) -> list[tuple[Word, Word]]:
    """Both ways a word built from an overlap or containment of the two
    left-hand sides can be reduced first."""
    (l1, s1), (l2, s2) = r1, r2
    pairs = []
    for k in range(1, min(len(l1), len(l2))):
        if l1[len(l1) - k:] == l2[:k]:
            pairs.append((s1 + l2[k:], l1[:len(l1) - k] + s2))
    if l2:
        for i in occurrences(l1, l2):
            if not (r1 == r2 and i == 0):
                pairs.append((s1, l1[:i] + s2 + l1[i + len(l2):]))
    return pairs


class Confluence(str, enum.Enum):
    COMPLETE = "complete"
    INCOMPLETE = "incomplete"
    INAPPLICABLE = "inapplicable"


@dataclass(frozen=True)
class ConfluenceResult:
    status: Confluence
    witness: Optional[tuple[Word, Word]] = None


def check_confluence_lengthreducing(r: RewriteSystem) -> ConfluenceResult:
    """Critical-pair test for systems that shrink in shortlex.

    Length-increasing rules, and length-preserving rules that do not go
    down in shortlex, make the test inapplicable (termination is not known).
    """
    if not r.finite:
        raise ValueError("critical pairs need a finite rule set")
    key = shortlex_key(r.alphabet)
    rules = tuple(rule for rule in r.rules if rule[0] != rule[1])
    if any(key(l) <= key(s) for l, s in rules):
        return ConfluenceResult(Confluence.INAPPLICABLE)
    for r1 in rules:
        for r2 in rules:
            for a, b in critical_pairs(r1, r2):
                if normal_form(a, rules) != normal_form(b, rules):
                    return ConfluenceResult(Confluence.INCOMPLETE, (a, b))
    return ConfluenceResult(Confluence.COMPLETE)


def complete_bounded(r: RewriteSystem, maxrules: int = 200, maxsteps: int = 50_000) -> Optional[RewriteSystem]:
    """Knuth-Bendix completion under shortlex (alphabet order).

    Returns an equivalent complete system, or None once more than
    ``maxrules`` rules or ``maxsteps`` processed equations are needed.
    """
    if not r.finite:
        raise ValueError("completion needs a finite rule set")
    key = shortlex_key(r.alphabet)
    rules: list[Rule] = []
    pending = deque(r.rules)
    steps = 0
    while pending:
        steps += 1
        if steps > maxsteps:
            return None
        a, b = pending.popleft()
        frozen = tuple(rules)
        a, b = normal_form(a, frozen), normal_form(b, frozen)
        if a == b:
            continue
        new = (a, b) if key(a) > key(b) else (b, a)
        kept = []
        for old in rules:
            if contains(old[0], new[0]):
                pending.append(old)
            else:
                kept.append(old)
        kept.append(new)
        frozen = tuple(kept)
        rules = [(l, normal_form(s, frozen)) for l, s in kept]
        if len(rules) > maxrules:
            return None
        for other in rules:
            pending.extend(critical_pairs(new, other))
            if other != new:
                pending.extend(critical_pairs(other, new))
    return RewriteSystem(r.alphabet, tuple(sorted(rules, key=lambda rule: key(rule[0]))))
