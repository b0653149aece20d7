"""Context-free grammars as immutable values.

Nonterminals are the integers ``0 .. n-1``; terminals are strings.  Every
construction goes through :class:`GrammarBuilder`, whose ``build`` step trims
unproductive and unreachable symbols, renumbers, and enforces the production
guard.
"""

from __future__ import annotations

import itertools
from collections import defaultdict, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

from ..presentations import EMPTY_TOKEN, MARKER, Word

Symbol = Union[int, str]
Body = Tuple[Symbol, ...]

PRODUCTION_GUARD = 200_000
ORACLE_GUARD = 3_000_000


class GrammarTooLarge(RuntimeError):
    def __init__(self, count: int, guard: int, stage: Optional[str] = None):
        where = f" in stage {stage}" if stage else ""
        super().__init__(f"grammar has {count} productions{where}, guard is {guard}")
        self.count, self.guard, self.stage = count, guard, stage


def set_production_guard(limit: int) -> int:
    """Set the global production guard; returns the previous value."""
    global PRODUCTION_GUARD
    old, PRODUCTION_GUARD = PRODUCTION_GUARD, limit
    return old


@dataclass(frozen=True)
class Cfg:
    terminals: frozenset
    start: int
    productions: Tuple[Tuple[int, Body], ...]

    def __post_init__(self):
        object.__setattr__(self, "terminals", frozenset(self.terminals))
        for head, body in self.productions:
            for s in body:
                if isinstance(s, str) and s not in self.terminals:
                    raise ValueError(f"undeclared terminal {s!r}")

    @property
    def size(self) -> int:
        return len(self.productions)

    @property
    def nonterminal_count(self) -> int:
        heads = [h for h, _ in self.productions]
        syms = [s for _, b in self.productions for s in b if isinstance(s, int)]
        return max(heads + syms + [self.start]) + 1

    @cached_property
    def rules(self) -> dict[int, list[Body]]:
        out: dict[int, list[Body]] = defaultdict(list)
        for head, body in self.productions:
            out[head].append(body)
        return dict(out)

    @cached_property
    def _cyk(self) -> "_Cyk":
        return _Cyk(self)

    @classmethod
    def empty(cls, terminals: Iterable[str] = ()) -> "Cfg":
        return cls(frozenset(terminals), 0, ())

    def with_terminals(self, extra: Iterable[str]) -> "Cfg":
        return Cfg(self.terminals | frozenset(extra), self.start, self.productions)

    def to_text(self) -> str:
        return grammar_to_text(self)

    @classmethod
    def from_text(cls, text: str) -> "Cfg":
        return grammar_from_text(text)

    def __repr__(self) -> str:
        return f"Cfg({len(self.terminals)} terminals, {self.size} productions)"


class GrammarBuilder:
    """Accumulates productions over arbitrary hashable nonterminal keys."""

    def __init__(self):
        self._ids: dict[Hashable, int] = {}
        self._prods: dict[tuple[int, Body], None] = {}

    def nt(self, key: Hashable) -> int:
        ident = self._ids.get(key)
        if ident is None:
            ident = self._ids[key] = len(self._ids)
        return ident

    def fresh(self) -> int:
        return self.nt(("fresh", len(self._ids)))

    def add(self, head: int, body: Iterable[Symbol]) -> None:
        self._prods[(head, tuple(body))] = None

    def copy(self, g: Cfg, tag: Hashable, terminal: Optional[Callable[[str], Sequence[Symbol]]] = None) -> int:
        """Copy ``g`` under key prefix ``tag``; ``terminal`` maps each terminal
        to a replacement symbol sequence.  Returns the copied start."""
        cache: dict[str, tuple] = {}
        for head, body in g.productions:
            new = []
            for s in body:
                if isinstance(s, int):
                    new.append(self.nt((tag, s)))
                elif terminal is None:
                    new.append(s)
                else:
                    if s not in cache:
                        cache[s] = tuple(terminal(s))
                    new.extend(cache[s])
            self.add(self.nt((tag, head)), new)
        return self.nt((tag, g.start))

    def build(self, start: int, terminals: Iterable[str], stage: Optional[str] = None) -> Cfg:
        return simplify_productions(start, list(self._prods), frozenset(terminals), stage)


def _sort_key(body: Body):
    return tuple((1, s) if isinstance(s, int) else (0, s) for s in body)


def simplify_productions(start: int, productions: Sequence[tuple[int, Body]], terminals: frozenset,
                         stage: Optional[str] = None) -> Cfg:
    # productive symbols, by counting unresolved nonterminals per production
    waiting: dict[int, list[int]] = defaultdict(list)
    missing = []
    queue = deque()
    productive: set[int] = set()
    for idx, (head, body) in enumerate(productions):
        nts = {s for s in body if isinstance(s, int)}
        missing.append(len(nts))
        for s in nts:
            waiting[s].append(idx)
        if not nts and head not in productive:
            productive.add(head)
            queue.append(head)
    while queue:
        a = queue.popleft()
        for idx in waiting.get(a, ()):
            missing[idx] -= 1
            if missing[idx] == 0:
                head = productions[idx][0]
                if head not in productive:
                    productive.add(head)
                    queue.append(head)
    if start not in productive:
        return Cfg(terminals, 0, ())
    by_head: dict[int, list[Body]] = defaultdict(list)
    for head, body in productions:
        if head in productive and all(not isinstance(s, int) or s in productive for s in body):
            by_head[head].append(body)
    renumber = {start: 0}
    order = deque([start])
    out: list[tuple[int, Body]] = []
    while order:
        head = order.popleft()
        for body in sorted(set(by_head[head]), key=_sort_key):
            for s in body:
                if isinstance(s, int) and s not in renumber:
                    renumber[s] = len(renumber)
                    order.append(s)
            out.append((renumber[head], tuple(renumber[s] if isinstance(s, int) else s for s in body)))
    if len(out) > PRODUCTION_GUARD:
        raise GrammarTooLarge(len(out), PRODUCTION_GUARD, stage)
    return Cfg(terminals, 0, tuple(out))


def simplify(g: Cfg) -> Cfg:
    return simplify_productions(g.start, list(g.productions), g.terminals)


# --- membership -----------------------------------------------------------


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class _Cyk:
    """CYK tables for a grammar: binarized productions, nullable set and unit
    closure.  Nonterminal sets are bitmasks; the table for each factor is
    memoized, so repeated queries share work."""

    def __init__(self, g: Cfg):
        n = g.nonterminal_count
        counter = itertools.count(n)
        pre: dict[str, int] = {}
        eps: set[int] = set()
        unary: list[tuple[int, int]] = []
        binary: list[tuple[int, int, int]] = []
        term_heads: dict[str, int] = defaultdict(int)

        def sym(s: Symbol) -> int:
            if isinstance(s, int):
                return s
            if s not in pre:
                pre[s] = next(counter)
                term_heads[s] |= 1 << pre[s]
            return pre[s]

        for head, body in g.productions:
            if not body:
                eps.add(head)
            elif len(body) == 1:
                s = body[0]
                if isinstance(s, str):
                    term_heads[s] |= 1 << head
                else:
                    unary.append((head, s))
            else:
                syms = [sym(s) for s in body]
                a = head
                for s in syms[:-2]:
                    nxt = next(counter)
                    binary.append((a, s, nxt))
                    a = nxt
                binary.append((a, syms[-2], syms[-1]))
        size = next(counter)

        nullable = set(eps)
        changed = True
        while changed:
            changed = False
            for a, b in unary:
                if b in nullable and a not in nullable:
                    nullable.add(a)
                    changed = True
            for a, b, c in binary:
                if b in nullable and c in nullable and a not in nullable:
                    nullable.add(a)
                    changed = True
        for a, b, c in binary:
            if b in nullable:
                unary.append((a, c))
            if c in nullable:
                unary.append((a, b))

        parents: dict[int, list[int]] = defaultdict(list)
        for a, b in unary:
            parents[b].append(a)
        up = [0] * size
        for b in range(size):
            seen = {b}
            stack = [b]
            while stack:
                x = stack.pop()
                for a in parents.get(x, ()):
                    if a not in seen:
                        seen.add(a)
                        stack.append(a)
            up[b] = sum(1 << a for a in seen)
        self.up = up
        self.terminal = {a: self.close(m) for a, m in term_heads.items()}
        self.right: dict[int, int] = defaultdict(int)
        self.pair: dict[tuple[int, int], int] = defaultdict(int)
        for a, b, c in binary:
            self.right[b] |= 1 << c
            self.pair[(b, c)] |= 1 << a
        self.start_bit = 1 << g.start
        self.start_nullable = g.start in nullable
        self.memo: dict[Word, int] = {}

    def close(self, mask: int) -> int:
        out = 0
        for a in _bits(mask):
            out |= self.up[a]
        return out

    def table(self, w: Word) -> int:
        hit = self.memo.get(w)
        if hit is not None:
            return hit
        if len(w) == 1:
            mask = self.terminal.get(w[0], 0)
        else:
            heads = 0
            right, pair = self.right, self.pair
            for k in range(1, len(w)):
                left = self.table(w[:k])
                if not left:
                    continue
                rest = self.table(w[k:])
                if not rest:
                    continue
                for b in _bits(left):
                    m = rest & right.get(b, 0)
                    for c in _bits(m):
                        heads |= pair[(b, c)]
            mask = self.close(heads)
        self.memo[w] = mask
        return mask

    def accepts(self, w: Word) -> bool:
        if not w:
            return self.start_nullable
        return bool(self.table(tuple(w)) & self.start_bit)


def member(g: Cfg, w: Sequence[str]) -> bool:
    """Membership by CYK over a binarized form with a nullable start."""
    w = tuple(w)
    foreign = [a for a in w if a not in g.terminals]
    if foreign:
        raise ValueError(f"letters {foreign} are not terminals of the grammar")
    return g._cyk.accepts(w)


def accepts(g: Cfg, w: Sequence[str]) -> bool:
    """Like :func:`member` but foreign letters simply mean rejection."""
    w = tuple(w)
    if any(a not in g.terminals for a in w):
        return False
    return g._cyk.accepts(w)


def nonempty(g: Cfg) -> bool:
    return bool(simplify(g).productions)


def candidate_words(letters: Sequence[str], maxlen: int, within=None) -> Iterator[Word]:
    """Words up to ``maxlen`` over ``letters``, optionally restricted to those
    accepted by the automaton ``within``."""
    letters = sorted(letters)
    if within is None:
        total = sum(len(letters) ** k for k in range(maxlen + 1))
        if total > ORACLE_GUARD:
            raise ValueError(f"enumeration would test {total} words (guard {ORACLE_GUARD})")
        for n in range(maxlen + 1):
            yield from itertools.product(letters, repeat=n)
        return
    start = within.initial
    stack = [((), start)]
    while stack:
        w, states = stack.pop()
        if states & within.accepting:
            yield w
        if len(w) == maxlen:
            continue
        for a in reversed(letters):
            nxt = within.step(states, a)
            if nxt and within.can_accept(nxt):
                stack.append((w + (a,), nxt))


def enumerate_language(g: Cfg, maxlen: int, within=None) -> set[Word]:
    """Exactly the words of L(g) of length <= maxlen (optionally intersected
    with an automaton).  Exhaustive CYK: an oracle, not a generator."""
    if not g.productions:
        return set()
    cyk = g._cyk
    return {w for w in candidate_words(g.terminals, maxlen, within) if cyk.accepts(w)}


# --- constructions -------------------------------------------------------


def finite_language(words: Iterable[Sequence[str]], terminals: Iterable[str] = ()) -> Cfg:
    b = GrammarBuilder()
    s = b.nt("S")
    words = [tuple(w) for w in words]
    for w in words:
        b.add(s, w)
    return b.build(s, set(terminals).union(*map(set, words)) if words else terminals)


def union(*grammars: Cfg) -> Cfg:
    b = GrammarBuilder()
    s = b.nt("S")
    for i, g in enumerate(grammars):
        if g.productions:
            b.add(s, [b.copy(g, i)])
    return b.build(s, frozenset().union(*(g.terminals for g in grammars)))


def concat(*grammars: Cfg) -> Cfg:
    b = GrammarBuilder()
    s = b.nt("S")
    b.add(s, [b.copy(g, i) for i, g in enumerate(grammars)])
    return b.build(s, frozenset().union(*(g.terminals for g in grammars)))


def star(g: Cfg) -> Cfg:
    b = GrammarBuilder()
    s = b.nt("S")
    b.add(s, [])
    if g.productions:
        b.add(s, [b.copy(g, 0), s])
    return b.build(s, g.terminals)


def reverse(g: Cfg) -> Cfg:
    return Cfg(g.terminals, g.start, tuple((h, body[::-1]) for h, body in g.productions))


def hom_image(g: Cfg, h: Mapping[str, Sequence[str]]) -> Cfg:
    """Image under the homomorphism ``h``; letters missing from ``h`` are
    fixed."""
    b = GrammarBuilder()
    image = {a: tuple(h.get(a, (a,))) for a in g.terminals}
    s = b.copy(g, 0, terminal=image.__getitem__)
    terminals = set().union(*map(set, image.values())) if image else set()
    return b.build(s, terminals)


def wp_free_monoid_grammar(alphabet: Iterable[str], marker: str = MARKER) -> Cfg:
    """{ w # w^rev : w in A* }, the word problem of the free monoid."""
    letters = list(alphabet)
    b = GrammarBuilder()
    s = b.nt("S")
    for a in letters:
        b.add(s, [a, s, a])
    b.add(s, [marker])
    return b.build(s, set(letters) | {marker})


# --- text format -------------------------------------------------------------


def grammar_to_text(g: Cfg) -> str:
    terminals = sorted(g.terminals)
    prefix = "N"
    while any(t.startswith(prefix) for t in terminals) or "S" in g.terminals:
        prefix = "_" + prefix
    start_name = "S" if "S" not in g.terminals else prefix + "S"

    def name(s: Symbol) -> str:
        if isinstance(s, str):
            return s
        return start_name if s == g.start else f"{prefix}{s}"

    lines = [f"start: {start_name}", "terminals: " + " ".join(terminals)]
    for head, bodies in sorted(g.rules.items(), key=lambda kv: (kv[0] != g.start, kv[0])):
        alts = [" ".join(map(name, body)) if body else EMPTY_TOKEN for body in bodies]
        lines.append(f"{name(head)} -> " + " | ".join(alts))
    return "\n".join(lines) + "\n"


def grammar_from_text(text: str) -> Cfg:
    from ..presentations import PresentationError

    start_name = None
    declared: Optional[set[str]] = None
    raw: list[tuple[int, str, str]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or line.startswith("//"):
            continue
        if "->" in line:
            head, _, rest = line.partition("->")
            head = head.strip()
            if not head or len(head.split()) != 1:
                raise PresentationError(f"bad production head {head!r}", lineno)
            raw.append((lineno, head, rest))
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise PresentationError(f"cannot parse {line!r}", lineno)
        key = key.strip()
        if key == "start":
            start_name = value.strip()
        elif key == "terminals":
            declared = set(value.split())
        else:
            raise PresentationError(f"unknown key {key!r}", lineno)
    heads = {h for _, h, _ in raw}
    if start_name is None:
        if not raw:
            raise PresentationError("empty grammar")
        start_name = raw[0][1]
    b = GrammarBuilder()
    start = b.nt(start_name)
    terminals = set(declared or ())
    for lineno, head, rest in raw:
        for alt in rest.split("|"):
            body = []
            for tok in alt.split():
                if tok == EMPTY_TOKEN:
                    continue
                if tok in heads:
                    body.append(b.nt(tok))
                else:
                    if declared is not None and tok not in declared:
                        raise PresentationError(f"undeclared terminal {tok!r}", lineno)
                    terminals.add(tok)
                    body.append(tok)
            b.add(b.nt(head), body)
    return b.build(start, terminals)
