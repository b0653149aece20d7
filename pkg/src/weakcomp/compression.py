"""Weak compression of sealed presentations and the word problem through it.

For a presentation whose relations are all sealed by a self-overlap-free
word alpha, every relation side factors uniquely as pieces ``alpha z``
(z free of alpha) followed by a final alpha.  Renaming the pieces to fresh
letters gives the compressed ("left") presentation, and equality in the
original monoid reduces to the canonical form u' u+ u'' plus equality of
the piece images inside a free product with a free monoid.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Protocol, Sequence, Tuple

from .grammars.cfg import Cfg, accepts
from .presentations import (
    MARKER,
    Alphabet,
    MonoidPresentation,
    Word,
    classify,
    is_self_overlap_free,
    is_special,
    is_subspecial,
    occurrences,
    spell,
)
from .rewriting import BoundedCongruence, RewriteSystem, Verdict, complete_bounded, normal_form


def split_pieces(w: Word, alpha: Word) -> list[Word]:
    """Factor ``w`` (which must begin with alpha, or be empty) at the
    occurrences of alpha.  Each factor is alpha followed by an alpha-free
    word, so the factorization is the unique one over that suffix code."""
    if not w:
        return []
    starts = occurrences(w, alpha)
    if not starts or starts[0] != 0:
        raise ValueError(f"{spell(w)} does not begin with {spell(alpha)}")
    bounds = starts + [len(w)]
    return [w[bounds[i]:bounds[i + 1]] for i in range(len(starts))]


def strip_alpha(w: Word, alpha: Word) -> Word:
    if w[len(w) - len(alpha):] != alpha:
        raise ValueError(f"{spell(w)} does not end with {spell(alpha)}")
    return w[:len(w) - len(alpha)]


def piece_letter(piece: Word) -> str:
    """Deterministic fresh letter for a piece."""
    if all(len(a) == 1 for a in piece):
        return "gamma_" + "".join(piece)
    return "gamma_(" + ".".join(piece) + ")"


def left_pieces(p: MonoidPresentation, alpha: Word) -> list[Word]:
    """The pieces used by the relation sides, in order of first occurrence."""
    alpha = tuple(alpha)
    if not is_self_overlap_free(alpha):
        raise ValueError(f"{spell(alpha)} is not self-overlap free")
    seen: dict[Word, None] = {}
    for u, v in p.relations:
        for side in (u, v):
            if side[:len(alpha)] != alpha:
                raise ValueError(f"{spell(alpha)} does not seal {spell(side)}")
            for piece in split_pieces(strip_alpha(side, alpha), alpha):
                seen.setdefault(piece, None)
    return list(seen)


@dataclass(frozen=True)
class CompressionStep:
    alpha: Word
    sigma: Tuple[Word, ...]
    gamma: Alphabet
    phi: Tuple[Tuple[Word, str], ...]
    source: MonoidPresentation
    target: MonoidPresentation

    @property
    def letter_of(self) -> dict[Word, str]:
        return dict(self.phi)

    @property
    def piece_of(self) -> dict[str, Word]:
        return {g: w for w, g in self.phi}

    def encode(self, w: Word) -> Word:
        """phi applied to a word over the pieces (``w`` ends before the final
        alpha); raises if a factor is not a piece."""
        table = self.letter_of
        out = []
        for piece in split_pieces(w, self.alpha):
            if piece not in table:
                raise ValueError(f"{spell(piece)} is not a piece of this compression")
            out.append(table[piece])
        return tuple(out)

    def decode(self, g: Sequence[str]) -> Word:
        table = self.piece_of
        return tuple(a for letter in g for a in table[letter])

    def as_dict(self) -> dict:
        return {
            "alpha": spell(self.alpha),
            "sigma": [spell(w) for w in self.sigma],
            "phi": {g: spell(w) for w, g in self.phi},
            "source": self.source.to_text(),
            "target": self.target.to_text(),
        }


def compress(p: MonoidPresentation) -> CompressionStep:
    """One weak-compression step."""
    info = classify(p)
    if info.incompressible:
        raise ValueError(f"{p} is incompressible")
    if len(p.alphabet) == 1:
        raise ValueError("one-letter presentations define cyclic monoids and are not compressed")
    alpha = info.sealing_word
    sigma = left_pieces(p, alpha)
    phi = tuple((w, piece_letter(w)) for w in sigma)
    gamma = Alphabet(tuple(g for _, g in phi))
    table = dict(phi)
    rels = []
    for u, v in p.relations:
        rels.append(tuple(tuple(table[w] for w in split_pieces(strip_alpha(s, alpha), alpha)) for s in (u, v)))
    return CompressionStep(alpha, tuple(sigma), gamma, phi, p, MonoidPresentation(gamma, tuple(rels)))


@dataclass(frozen=True)
class CompressionChain:
    start: MonoidPresentation
    steps: Tuple[CompressionStep, ...] = ()

    @property
    def terminal(self) -> MonoidPresentation:
        return self.steps[-1].target if self.steps else self.start

    def __len__(self) -> int:
        return len(self.steps)

    def as_dict(self) -> dict:
        return {
            "start": self.start.to_text(),
            "steps": [s.as_dict() for s in self.steps],
            "terminal": self.terminal.to_text(),
            "terminal_incompressible": classify(self.terminal).incompressible,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, ensure_ascii=False)


def compress_chain(p: MonoidPresentation) -> CompressionChain:
    """Compress until the presentation is incompressible (or cyclic)."""
    steps = []
    current = p
    while classify(current).weakly_compressible and len(current.alphabet) > 1:
        step = compress(current)
        steps.append(step)
        current = step.target
    return CompressionChain(p, tuple(steps))


def compress_to_special(p: MonoidPresentation) -> Optional[MonoidPresentation]:
    if len(p.relations) != 1:
        raise ValueError("expects a one-relation presentation")
    if is_special(p):
        return p
    if not is_subspecial(p):
        return None
    terminal = compress_chain(p).terminal
    return terminal if is_special(terminal) else None


# --- canonical forms -------------------------------------------------------


@dataclass(frozen=True)
class CanonicalForm:
    prefix: Word
    core: Word
    suffix: Word

    @property
    def word(self) -> Word:
        return self.prefix + self.core + self.suffix


def canonical_form(w: Word, alpha: Word) -> Optional[CanonicalForm]:
    """u' u+ u'' with u', u'' free of alpha and u+ beginning and ending with
    alpha; None if alpha does not occur."""
    w, alpha = tuple(w), tuple(alpha)
    if not is_self_overlap_free(alpha):
        raise ValueError(f"{spell(alpha)} is not self-overlap free")
    hits = occurrences(w, alpha)
    if not hits:
        return None
    first, last = hits[0], hits[-1] + len(alpha)
    return CanonicalForm(w[:first], w[first:last], w[last:])


def gamma_part(w: Word, step: CompressionStep) -> Word:
    """phi of the alpha-part minus its final alpha.  Pieces outside the
    compression's own pieces get fresh primed letters: they generate a free
    factor, where only literal equality matters."""
    cf = canonical_form(w, step.alpha)
    if cf is None:
        raise ValueError(f"{spell(w)} does not contain {spell(step.alpha)}")
    table = step.letter_of
    return tuple(table.get(piece, piece_letter(piece) + "'")
                 for piece in split_pieces(strip_alpha(cf.core, step.alpha), step.alpha))


# --- equality ---------------------------------------------------------------


class BaseSolver(Protocol):
    def __call__(self, p: MonoidPresentation, u: Word, v: Word) -> Verdict: ...


class CompletionSolver:
    """Normal forms under a Knuth-Bendix completion (cached per
    presentation); UNKNOWN when completion gives up."""

    def __init__(self, maxrules: int = 200, maxsteps: int = 50_000):
        self.maxrules, self.maxsteps = maxrules, maxsteps
        self._systems: dict[MonoidPresentation, Optional[RewriteSystem]] = {}

    def system(self, p: MonoidPresentation) -> Optional[RewriteSystem]:
        if p not in self._systems:
            self._systems[p] = complete_bounded(RewriteSystem.from_presentation(p), self.maxrules, self.maxsteps)
        return self._systems[p]

    def __call__(self, p, u, v):
        r = self.system(p)
        if r is None:
            return Verdict.UNKNOWN
        same = normal_form(tuple(u), r.rules) == normal_form(tuple(v), r.rules)
        return Verdict.EQUAL if same else Verdict.DISTINCT


class BfsSolver:
    """Bounded search of the congruence class (tri-state)."""

    def __init__(self, maxlen: int = 12, maxstates: int = 200_000):
        self.maxlen, self.maxstates = maxlen, maxstates
        self._graphs: dict[MonoidPresentation, BoundedCongruence] = {}

    def __call__(self, p, u, v):
        if max(len(u), len(v)) > self.maxlen:
            return Verdict.UNKNOWN
        if p not in self._graphs:
            self._graphs[p] = BoundedCongruence(RewriteSystem.from_presentation(p), self.maxlen, self.maxstates)
        return self._graphs[p].compare(tuple(u), tuple(v))


class GrammarSolver:
    """Membership of u # v^rev in a word-problem grammar."""

    def __init__(self, wp: Cfg, marker: str = MARKER):
        self.wp, self.marker = wp, marker

    def __call__(self, p, u, v):
        w = tuple(u) + (self.marker,) + tuple(v)[::-1]
        return Verdict.EQUAL if accepts(self.wp, w) else Verdict.DISTINCT


class AutoSolver:
    """Completion first, bounded search as the fallback."""

    def __init__(self, maxlen: int = 12):
        self.completion = CompletionSolver()
        self.bfs = BfsSolver(maxlen)

    def __call__(self, p, u, v):
        verdict = self.completion(p, u, v)
        return verdict if verdict is not Verdict.UNKNOWN else self.bfs(p, u, v)


@lru_cache(maxsize=None)
def _cyclic_parameters(p: MonoidPresentation) -> Optional[tuple[int, int]]:
    """(index, period) of a one-generator monoid, None if it is free."""
    pairs = [(len(u), len(v)) for u, v in p.relations if len(u) != len(v)]
    if not pairs:
        return None
    index = min(min(m, n) for m, n in pairs)
    period = 0
    for m, n in pairs:
        period = math.gcd(period, abs(m - n))
    return index, period


@lru_cache(maxsize=None)
def _step(p: MonoidPresentation) -> CompressionStep:
    return compress(p)


def _blocks(g: Word, own: frozenset) -> list[tuple[bool, Word]]:
    out: list[tuple[bool, Word]] = []
    for letter in g:
        kind = letter in own
        if out and out[-1][0] == kind:
            out[-1] = (kind, out[-1][1] + (letter,))
        else:
            out.append((kind, (letter,)))
    return out


def word_equal(p: MonoidPresentation, u: Word, v: Word, base: Optional[BaseSolver] = None) -> Verdict:
    """Decide u = v in the monoid presented by ``p``.

    Compressible presentations go through canonical forms; the gamma-parts
    are compared in the free product of the compressed monoid with a free
    monoid: trivial blocks of compressed letters are deleted, neighbouring
    free blocks merge, and the surviving blocks are matched one by one.
    Incompressible presentations are handed to ``base``.
    """
    u, v = tuple(u), tuple(v)
    if base is None:
        base = AutoSolver()
    if u == v:
        return Verdict.EQUAL
    if len(p.alphabet) == 1:
        params = _cyclic_parameters(p)
        if params is None:
            return Verdict.DISTINCT
        index, period = params
        m, n = len(u), len(v)
        same = m == n or (m >= index and n >= index and (m - n) % period == 0)
        return Verdict.EQUAL if same else Verdict.DISTINCT
    if classify(p).incompressible:
        return base(p, u, v)

    step = _step(p)
    alpha = step.alpha
    cu, cv = canonical_form(u, alpha), canonical_form(v, alpha)
    if cu is None or cv is None:
        return Verdict.DISTINCT  # one contains alpha and the other does not, or neither does and u != v
    if cu.prefix != cv.prefix or cu.suffix != cv.suffix:
        return Verdict.DISTINCT
    return _free_product_equal(step, gamma_part(u, step), gamma_part(v, step), base)


def _reduce(step: CompressionStep, g: Word, base: BaseSolver) -> Optional[list[tuple[bool, Word]]]:
    own = frozenset(step.gamma)
    out: list[tuple[bool, Word]] = []
    for kind, block in _blocks(g, own):
        if kind:
            trivial = word_equal(step.target, block, (), base)
            if trivial is Verdict.UNKNOWN:
                return None
            if trivial is Verdict.EQUAL:
                continue
        if out and out[-1][0] == kind:
            out[-1] = (kind, out[-1][1] + block)
        else:
            out.append((kind, block))
    return out


def _free_product_equal(step: CompressionStep, gu: Word, gv: Word, base: BaseSolver) -> Verdict:
    bu, bv = _reduce(step, gu, base), _reduce(step, gv, base)
    if bu is None or bv is None:
        return Verdict.UNKNOWN
    if len(bu) != len(bv):
        return Verdict.DISTINCT
    unknown = False
    for (ku, wu), (kv, wv) in zip(bu, bv):
        if ku != kv:
            return Verdict.DISTINCT
        if not ku:
            if wu != wv:
                return Verdict.DISTINCT
            continue
        verdict = word_equal(step.target, wu, wv, base)
        if verdict is Verdict.DISTINCT:
            return Verdict.DISTINCT
        unknown |= verdict is Verdict.UNKNOWN
    return Verdict.UNKNOWN if unknown else Verdict.EQUAL
