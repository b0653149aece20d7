"""Ancestor closures of context-free languages.

Monadic ancestors, ancestors under rules ``w alpha -> alpha`` (reduced to
the monadic case by coding every occurrence of ``alpha`` as a diamond),
alternating products of word-problem-shaped languages, and two-sided
("bipartisan") ancestors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Union

from .grammars.automata import Nfa
from .grammars.cfg import (
    Cfg,
    GrammarBuilder,
    accepts,
    concat,
    enumerate_language,
    finite_language,
    hom_image,
    member,
    nonempty,
    reverse,
    union,
    wp_free_monoid_grammar,
)
from .grammars.transduce import Fst, apply_fst, intersect_regular
from .presentations import DIAMOND, MARKER, Word, is_self_overlap_free
from .rewriting import Confluence, RewriteSystem, check_confluence_lengthreducing

Target = Optional[str]  # a letter, or None for the empty word


@dataclass(frozen=True, eq=False)
class MonadicCfSystem:
    """Rules ``u -> t`` for every ``u`` in ``L(rules[t])``; ``t`` is a letter
    or ``None`` (the empty word)."""

    alphabet: frozenset
    rules: Mapping[Target, Cfg]

    def __post_init__(self):
        rules = {t: g for t, g in self.rules.items() if g.productions}
        letters = frozenset(self.alphabet).union(*(g.terminals for g in rules.values()))
        letters |= {t for t in rules if t is not None}
        object.__setattr__(self, "alphabet", letters)
        object.__setattr__(self, "rules", rules)
        for t, g in rules.items():
            if t is not None and (not isinstance(t, str) or member(g, ())):
                raise ValueError(f"rule target {t!r} must be a letter with non-empty left-hand sides")

    @classmethod
    def from_rules(cls, rules: Iterable[tuple[Word, Word]], alphabet: Iterable[str] = ()) -> "MonadicCfSystem":
        """Finite monadic system from explicit rules."""
        grouped: dict[Target, list[Word]] = {}
        for lhs, rhs in rules:
            lhs, rhs = tuple(lhs), tuple(rhs)
            if len(rhs) > 1 or len(lhs) < len(rhs):
                raise ValueError(f"rule {lhs} -> {rhs} is not monadic")
            grouped.setdefault(rhs[0] if rhs else None, []).append(lhs)
        return cls(frozenset(alphabet), {t: finite_language(ws) for t, ws in grouped.items()})

    def reversed(self) -> "MonadicCfSystem":
        return MonadicCfSystem(self.alphabet, {t: reverse(g) for t, g in self.rules.items()})

    def oracle_rules(self, maxlen: int) -> list[tuple[Word, Word]]:
        """The rules with left-hand side of length <= maxlen, for brute force."""
        return [(lhs, () if t is None else (t,))
                for t, g in self.rules.items() for lhs in enumerate_language(g, maxlen)]


@dataclass(frozen=True, eq=False)
class AlphaMonadicSystem:
    """Rules ``w alpha -> alpha`` for ``w`` in ``L(lhs_core)``; with
    ``suffix=True`` the rules read ``alpha w -> alpha`` instead (the mirror
    image, used on the reversed side of a word problem)."""

    alpha: Word
    lhs_core: Cfg
    suffix: bool = False

    def __post_init__(self):
        alpha = tuple(self.alpha)
        object.__setattr__(self, "alpha", alpha)
        if not alpha or not is_self_overlap_free(alpha):
            raise ValueError(f"{alpha} is not a non-empty self-overlap-free word")
        core = self.lhs_core
        if core.productions and member(core, ()):
            raise ValueError("the empty word may not be a rule core")
        letters = core.terminals | set(alpha)
        edge = (Nfa.from_words([alpha], letters).concat(Nfa.universal(letters)) if not self.suffix
                else Nfa.universal(letters).concat(Nfa.from_words([alpha], letters)))
        if nonempty(intersect_regular(core, edge.complement())):
            side = "end" if self.suffix else "begin"
            raise ValueError(f"every rule core must {side} with alpha")

    @property
    def lhs(self) -> Cfg:
        a = finite_language([self.alpha])
        return concat(a, self.lhs_core) if self.suffix else concat(self.lhs_core, a)

    @property
    def alphabet(self) -> frozenset:
        return self.lhs_core.terminals | set(self.alpha)

    def reversed(self) -> "AlphaMonadicSystem":
        return AlphaMonadicSystem(self.alpha[::-1], reverse(self.lhs_core), not self.suffix)

    def oracle_rules(self, maxlen: int) -> list[tuple[Word, Word]]:
        return [(lhs, self.alpha) for lhs in enumerate_language(self.lhs, maxlen)]


System = Union[MonadicCfSystem, AlphaMonadicSystem]


# --- monadic ancestors ---------------------------------------------------


def monadic_ancestors(g: Cfg, r: MonadicCfSystem, stage: Optional[str] = None) -> Cfg:
    """Grammar for the set of words that rewrite into L(g) under ``r``.

    X_b derives exactly the ancestors of the letter b: either b itself or
    a left-hand side for b with each letter c replaced by X_c.  E derives
    the ancestors of the empty word.  Each letter symbol carries a trailing
    E and the start a leading one, which places an E at every gap.
    """
    if not isinstance(r, MonadicCfSystem):
        raise ValueError("monadic_ancestors needs a MonadicCfSystem")
    if not g.productions:
        return Cfg.empty(g.terminals | r.alphabet)
    b = GrammarBuilder()
    erasing = None in r.rules
    e = b.nt("E")
    if erasing:
        b.add(e, [])
        f = b.copy(r.rules[None], ("U", None), terminal=lambda c: (b.nt(("X", c)),))
        b.add(e, [f, e])

    letters = g.terminals | r.alphabet
    for c in letters:
        x = b.nt(("X", c))
        b.add(x, [c, e] if erasing else [c])
        if c in r.rules:
            b.add(x, [b.copy(r.rules[c], ("U", c), terminal=lambda a: (b.nt(("X", a)),))])

    s = b.nt("S")
    top = b.copy(g, "G", terminal=lambda a: (b.nt(("X", a)),))
    b.add(s, [e, top] if erasing else [top])
    return b.build(s, letters, stage)


# --- alpha-monadic ancestors via diamond coding ----------------------------


def _fresh_diamond(taken: Iterable[str], base: str = DIAMOND) -> str:
    taken = set(taken)
    d = base
    while d in taken:
        d += "'"
    return d


def _encoder(letters: Iterable[str], codes: Mapping[str, Word]) -> tuple[Fst, Nfa]:
    """Transducer replacing occurrences of each coded word by its diamond
    (nondeterministically), plus the automaton of words avoiding every coded
    word; together they pick the unique full coding."""
    letters = set(letters)
    full = letters | set(codes)
    mapping = {a: (a,) for a in letters}
    mapping.update({d: tuple(w) for d, w in codes.items()})
    fst = Fst.inverse_substitution(mapping)
    free = Nfa.universal(full)
    for w in codes.values():
        free = free.intersect(Nfa.avoiding(full, w))
    return fst, free


def encode_occurrences(g: Cfg, codes: Mapping[str, Word], letters: Iterable[str] = (),
                       stage: Optional[str] = None) -> Cfg:
    """Replace every occurrence of each (self-overlap-free) word in
    ``codes.values()`` by its diamond key."""
    letters = set(letters) | set(g.terminals)
    fst, free = _encoder(letters, codes)
    return intersect_regular(apply_fst(g.with_terminals(letters), fst, stage), free, stage)


def _as_monadic(r: System, diamond: str, letters: set[str]) -> tuple[MonadicCfSystem, dict[str, Word]]:
    if isinstance(r, MonadicCfSystem):
        return r, {}
    codes = {diamond: r.alpha}
    lhs = encode_occurrences(r.lhs, codes, letters)
    return MonadicCfSystem(frozenset(letters) | {diamond}, {diamond: lhs}), codes


def alpha_monadic_ancestors(g: Cfg, s: AlphaMonadicSystem, stage: Optional[str] = None) -> Cfg:
    """Ancestors of L(g) under the rules of ``s``.

    Coding each occurrence of alpha by a diamond is unique because alpha is
    self-overlap free, and it commutes with rewriting because every
    left-hand side begins and ends with alpha.  The coded rules are monadic
    with target the diamond, so the monadic construction applies; decoding
    maps the diamond back to alpha.
    """
    if not isinstance(s, AlphaMonadicSystem):
        raise ValueError("alpha_monadic_ancestors needs an AlphaMonadicSystem")
    letters = set(g.terminals) | s.alphabet
    d = _fresh_diamond(letters)
    if not s.lhs_core.productions:
        return g.with_terminals(letters)
    system, codes = _as_monadic(s, d, letters)
    coded = encode_occurrences(g, codes, letters, stage)
    anc = monadic_ancestors(coded, system, stage)
    _, free = _encoder(letters, codes)
    anc = intersect_regular(anc, free, stage)
    return hom_image(anc, {d: s.alpha}).with_terminals(letters)


def ancestors(g: Cfg, r: System, stage: Optional[str] = None) -> Cfg:
    if isinstance(r, AlphaMonadicSystem):
        return alpha_monadic_ancestors(g, r, stage)
    return monadic_ancestors(g, r, stage)


# --- alternating products ------------------------------------------------


def _check_marked(g: Cfg, name: str, marker: str, bound: int = 4) -> None:
    """Sampled precondition: one marker per word, closed under
    u1 u2 # v2 v1 recombination."""
    sample = enumerate_language(g, bound)
    for w in sample:
        if w.count(marker) != 1:
            raise ValueError(f"{name} contains {w}, which does not have exactly one {marker!r}")
    split = [(w[:w.index(marker)], w[w.index(marker) + 1:]) for w in sample]
    for u1, v1 in split:
        for u2, v2 in split:
            w = u1 + u2 + (marker,) + v2 + v1
            if not accepts(g, w):
                raise ValueError(f"{name} is not concatenation-closed: misses {w}")


def alternating_product(g1: Cfg, g2: Cfg, marker: str = MARKER, check: bool = True) -> Cfg:
    """L1 * L2: words u1 u2 ... uk # vk ... v2 v1 whose blocks u_i # v_i come
    alternately from L1 and L2 (starting with either).

    H1 stands for the inner part of an L1 block: the marker, or a whole L2
    block nested around its own inner part H2, and symmetrically.
    """
    if check:
        _check_marked(g1, "first factor", marker)
        _check_marked(g2, "second factor", marker)
    b = GrammarBuilder()
    h1, h2 = b.nt("H1"), b.nt("H2")
    s1 = b.copy(g1, 1, terminal=lambda a: (h1,) if a == marker else (a,))
    s2 = b.copy(g2, 2, terminal=lambda a: (h2,) if a == marker else (a,))
    for h, other in ((h1, s2), (h2, s1)):
        b.add(h, [marker])
        b.add(h, [other])
    s = b.nt("S")
    b.add(s, [s1])
    b.add(s, [s2])
    return b.build(s, g1.terminals | g2.terminals | {marker})


# --- bipartisan ancestors --------------------------------------------------


def _primer(letters: Iterable[str], taken: Iterable[str]) -> dict[str, str]:
    taken = set(taken) | set(letters)
    out = {}
    for a in sorted(set(letters)):
        p = a + "'"
        while p in taken:
            p += "'"
        taken.add(p)
        out[a] = p
    return out


def _rename(r: System, prime: Mapping[str, str]) -> System:
    def ren(g: Cfg) -> Cfg:
        return hom_image(g, {a: (prime[a],) for a in g.terminals})

    if isinstance(r, AlphaMonadicSystem):
        return AlphaMonadicSystem(tuple(prime[a] for a in r.alpha), ren(r.lhs_core), r.suffix)
    return MonadicCfSystem(frozenset(prime[a] for a in r.alphabet),
                           {(t if t is None else prime[t]): ren(g) for t, g in r.rules.items()})


def bipartisan_ancestors(g: Cfg, r1: System, r2: System, marker: str = MARKER,
                         stage: Optional[str] = None) -> Cfg:
    """{ w1 # w2 : w1 -> u1 under r1, w2 -> u2 under r2, u1 # u2 in L(g) }.

    The right side is renamed to primed letters so one combined system can
    act on both sides without interference; alpha-rules on either side are
    coded by their own diamond first.
    """
    letters = (set(g.terminals) | set(r1.alphabet) | set(r2.alphabet)) - {marker}
    prime = _primer(letters, {marker})
    primed = set(prime.values())
    marked = Fst.substitution({a: (a,) for a in letters}, {a: (prime[a],) for a in letters}, marker)
    gp = apply_fst(g.with_terminals(letters), marked, stage)
    r2p = _rename(r2, prime)

    everything = letters | primed | {marker}
    d1 = _fresh_diamond(everything)
    d2 = _fresh_diamond(everything | {d1}, d1 + "'")
    m1, codes1 = _as_monadic(r1, d1, letters)
    m2, codes2 = _as_monadic(r2p, d2, primed)
    codes = {**codes1, **codes2}

    combined: dict[Target, Cfg] = {}
    for m in (m1, m2):
        for t, lhs in m.rules.items():
            combined[t] = union(combined[t], lhs) if t in combined else lhs
    system = MonadicCfSystem(frozenset(everything) | set(codes), combined)

    coded = encode_occurrences(gp, codes, everything, stage) if codes else gp
    anc = monadic_ancestors(coded, system, stage)
    left = set(letters) | set(codes1)
    right = set(primed) | set(codes2)
    shape = Nfa.universal(left).concat(Nfa.from_words([(marker,)], [marker])).concat(Nfa.universal(right))
    if codes:
        _, free = _encoder(everything, codes)
        shape = shape.with_alphabet(free.alphabet).intersect(free)
    anc = intersect_regular(anc, shape.with_alphabet(anc.terminals), stage)
    unprime = {p: (a,) for a, p in prime.items()}
    decode = {**{d: w for d, w in codes1.items()},
              **{d: tuple(unprime[c][0] for c in w) for d, w in codes2.items()}}
    return hom_image(anc, {**unprime, **decode}).with_terminals(letters | {marker})


# --- word problems of complete monadic systems ---------------------------


def irreducible_words(r: RewriteSystem, letters: Iterable[str]) -> Nfa:
    """Automaton for the words containing no left-hand side of ``r``."""
    letters = frozenset(letters)
    out = Nfa.universal(letters)
    for lhs, _ in r.rules:
        out = out.intersect(Nfa.avoiding(letters, lhs)).minimize()
    return out


def wp_from_complete_monadic(r: RewriteSystem, marker: str = MARKER) -> Cfg:
    """Word problem grammar of the monoid defined by a finite complete
    monadic system: u = v iff both reduce to the same irreducible word, so
    the word problem is the two-sided ancestor set of { w # w^rev : w
    irreducible }."""
    if not r.finite or not r.monadic:
        raise ValueError("need a finite monadic rewriting system")
    if check_confluence_lengthreducing(r).status is not Confluence.COMPLETE:
        raise ValueError("the rewriting system is not complete")
    letters = list(r.alphabet)
    irr = irreducible_words(r, letters)
    shape = irr.concat(Nfa.from_words([(marker,)], [marker])).concat(irr.reverse())
    d = intersect_regular(wp_free_monoid_grammar(letters, marker), shape.with_alphabet([marker]))
    system = MonadicCfSystem.from_rules(r.rules, letters)
    return bipartisan_ancestors(d, system, system.reversed(), marker, stage="complete monadic word problem")
