"""Words, alphabets and finite monoid presentations.

A word is a plain tuple of letter tokens.  Letters are opaque strings; most
presentations use single characters (``x``, ``y``) but compressed
presentations use longer tokens such as ``gamma_xyx``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence, Tuple

Word = Tuple[str, ...]

MARKER = "#"
DIAMOND = "◊"
RESERVED = frozenset({MARKER, DIAMOND})
EMPTY_TOKEN = "1"

EPSILON: Word = ()


class PresentationError(ValueError):
    """Malformed presentation text or an invalid presentation."""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


def word(text: str) -> Word:
    """Split a string of single-character letters into a word."""
    return tuple(text)


def reverse(w: Word) -> Word:
    return tuple(reversed(w))


def spell(w: Sequence[str]) -> str:
    """Render a word; single-character letters are run together."""
    if not w:
        return EMPTY_TOKEN
    if all(len(a) == 1 for a in w):
        return "".join(w)
    return " ".join(w)


def occurrences(w: Word, pattern: Word) -> list[int]:
    """Start positions of every occurrence of ``pattern`` in ``w``."""
    n, k = len(w), len(pattern)
    if k == 0:
        return list(range(n + 1))
    return [i for i in range(n - k + 1) if w[i:i + k] == pattern]


def contains(w: Word, pattern: Word) -> bool:
    k = len(pattern)
    return any(w[i:i + k] == pattern for i in range(len(w) - k + 1))


@dataclass(frozen=True)
class Alphabet:
    letters: Tuple[str, ...]

    def __post_init__(self):
        letters = tuple(self.letters)
        object.__setattr__(self, "letters", letters)
        if not letters:
            raise PresentationError("alphabet must be non-empty")
        if len(set(letters)) != len(letters):
            raise PresentationError(f"duplicate letters in {letters}")
        bad = [a for a in letters if a in RESERVED or a == EMPTY_TOKEN or not a or any(c.isspace() for c in a)]
        if bad:
            raise PresentationError(f"reserved or malformed letters {bad}")

    def __iter__(self) -> Iterator[str]:
        return iter(self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __contains__(self, letter) -> bool:
        return letter in self.letters

    def index(self, letter: str) -> int:
        return self.letters.index(letter)

    def words(self, maxlen: int, minlen: int = 0) -> Iterator[Word]:
        """All words of length ``minlen..maxlen`` in shortlex order."""
        layer: list[Word] = [()]
        for n in range(maxlen + 1):
            if n >= minlen:
                yield from layer
            layer = [w + (a,) for w in layer for a in self.letters]

    def tokenize(self, text: str, extra: Iterable[str] = ()) -> Word:
        """Parse a word: whitespace-separated tokens, each split greedily
        into the longest matching letters.  ``1`` is the empty word."""
        vocab = sorted(set(self.letters) | set(extra), key=len, reverse=True)
        out: list[str] = []
        for chunk in text.split():
            if chunk == EMPTY_TOKEN:
                continue
            i = 0
            while i < len(chunk):
                for letter in vocab:
                    if chunk.startswith(letter, i):
                        out.append(letter)
                        i += len(letter)
                        break
                else:
                    raise PresentationError(f"cannot tokenize {chunk!r} at {chunk[i:]!r}")
        return tuple(out)


def is_self_overlap_free(w: Word) -> bool:
    """True iff no proper non-empty prefix of ``w`` is also a suffix."""
    return all(w[:k] != w[len(w) - k:] for k in range(1, len(w)))


def is_sealed_by(u: Word, v: Word, w: Word) -> bool:
    if not w:
        raise ValueError("a sealing word must be non-empty")
    k = len(w)
    return all(len(s) >= k and s[:k] == w and s[-k:] == w for s in (u, v))


def oriented(u: Word, v: Word) -> tuple[Word, Word]:
    """Order a relation so the longer side comes first (stable on ties)."""
    return (u, v) if len(u) >= len(v) else (v, u)


@dataclass(frozen=True)
class MonoidPresentation:
    alphabet: Alphabet
    relations: Tuple[Tuple[Word, Word], ...] = ()

    def __post_init__(self):
        rels = tuple((tuple(u), tuple(v)) for u, v in self.relations)
        object.__setattr__(self, "relations", rels)
        for u, v in rels:
            for a in u + v:
                if a not in self.alphabet:
                    raise PresentationError(f"relation letter {a!r} not in alphabet")

    @classmethod
    def of(cls, letters: Iterable[str], *relations: tuple[str, str]) -> "MonoidPresentation":
        """Shorthand for single-character presentations:
        ``MonoidPresentation.of("xy", ("xyx", "1"))``."""
        alphabet = Alphabet(tuple(letters))
        rels = tuple((alphabet.tokenize(u), alphabet.tokenize(v)) for u, v in relations)
        return cls(alphabet, rels)

    @property
    def total_length(self) -> int:
        return sum(len(u) + len(v) for u, v in self.relations)

    def oriented_relations(self) -> list[tuple[Word, Word]]:
        return [oriented(u, v) for u, v in self.relations]

    def to_text(self) -> str:
        lines = ["gens: " + " ".join(self.alphabet)]
        for u, v in self.relations:
            lines.append(f"rel: {spell(u)} = {spell(v)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "MonoidPresentation":
        alphabet = None
        raw: list[tuple[int, str, str]] = []
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.lstrip().startswith(("//", "#")):
                continue
            key, sep, rest = line.partition(":")
            if not sep:
                raise PresentationError(f"expected 'key: value', got {line!r}", lineno)
            key = key.strip()
            if key == "gens":
                if alphabet is not None:
                    raise PresentationError("duplicate gens line", lineno)
                try:
                    alphabet = Alphabet(tuple(rest.split()))
                except PresentationError as exc:
                    raise PresentationError(str(exc), lineno) from None
            elif key == "rel":
                lhs, eq, rhs = rest.partition("=")
                if not eq:
                    raise PresentationError("relation needs '='", lineno)
                raw.append((lineno, lhs, rhs))
            else:
                raise PresentationError(f"unknown key {key!r}", lineno)
        if alphabet is None:
            raise PresentationError("missing gens line")
        rels = []
        for lineno, lhs, rhs in raw:
            try:
                rels.append((alphabet.tokenize(lhs), alphabet.tokenize(rhs)))
            except PresentationError as exc:
                raise PresentationError(str(exc), lineno) from None
        return cls(alphabet, tuple(rels))

    def __str__(self) -> str:
        rels = ", ".join(f"{spell(u)} = {spell(v)}" for u, v in self.relations)
        return f"<{', '.join(self.alphabet)} | {rels}>"


def sealing_words(u: Word, v: Word) -> list[Word]:
    """Every word sealing the pair (u, v); used by the uniqueness checks."""
    shortest = min(u, v, key=len)
    return [shortest[:k] for k in range(1, len(shortest) + 1) if is_sealed_by(u, v, shortest[:k])]


def find_sealing_word(p: MonoidPresentation) -> Optional[Word]:
    """The self-overlap-free word sealing every relation, if one exists.

    Any common seal is a prefix of every relation side, so candidates are
    the prefixes of the shortest side.  A presentation without relations has
    no seal to speak of and is reported as unsealed.
    """
    if not p.relations:
        return None
    shortest = min((s for rel in p.relations for s in rel), key=len)
    for k in range(1, len(shortest) + 1):
        alpha = shortest[:k]
        if is_self_overlap_free(alpha) and all(is_sealed_by(u, v, alpha) for u, v in p.relations):
            return alpha
    return None


@dataclass(frozen=True)
class Classification:
    special: bool
    subspecial: bool
    weakly_compressible: bool
    sealing_word: Optional[Word] = None

    @property
    def incompressible(self) -> bool:
        return not self.weakly_compressible

    def as_dict(self) -> dict:
        return {
            "special": self.special,
            "subspecial": self.subspecial,
            "weakly_compressible": self.weakly_compressible,
            "incompressible": self.incompressible,
            "sealing_word": None if self.sealing_word is None else spell(self.sealing_word),
        }


def is_special(p: MonoidPresentation) -> bool:
    return all(not v for _, v in p.oriented_relations())


def is_subspecial(p: MonoidPresentation) -> bool:
    if len(p.relations) != 1:
        return False
    u, v = p.oriented_relations()[0]
    k = len(v)
    return u[:k] == v and u[len(u) - k:] == v


def classify(p: MonoidPresentation) -> Classification:
    alpha = find_sealing_word(p)
    return Classification(
        special=is_special(p),
        subspecial=is_subspecial(p),
        weakly_compressible=alpha is not None,
        sealing_word=alpha,
    )


class Answer(str, enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


def has_nontrivial_idempotent(p: MonoidPresentation, bound: int = 8) -> Answer:
    """Lallement's criterion for one-relation monoids.

    Subspecial with |u| > |v| > 0 gives a definite yes.  In the special case a
    non-trivial idempotent exists iff the monoid is not right cancellative;
    we only ever find witnesses of non-cancellativity (words up to ``bound``
    letters, compared through a completed rewriting system), so a failed
    search yields ``UNKNOWN`` rather than ``NO``.
    """
    if len(p.relations) != 1:
        raise ValueError("the idempotent criterion needs exactly one relation")
    u, v = p.oriented_relations()[0]
    if is_subspecial(p) and len(u) > len(v) > 0:
        return Answer.YES
    if v:
        return Answer.NO
    if not u:
        return Answer.NO  # 1 = 1 presents a free monoid
    return Answer.YES if right_cancellativity_witness(p, bound) is not None else Answer.UNKNOWN


def right_cancellativity_witness(p: MonoidPresentation, bound: int = 8, maxrules: int = 200):
    """Find (x, y, z) with xz = yz but x != y, |x|,|y| < bound, z a letter.

    A single letter z suffices: peel letters off a longer witness until the
    prefixes first become distinct.  Needs a finite complete system.
    """
    from .rewriting import RewriteSystem, complete_bounded, normal_form

    system = complete_bounded(RewriteSystem.from_presentation(p), maxrules=maxrules)
    if system is None:
        return None
    rules = system.rules
    # one representative per element of M
    seen: dict[Word, Word] = {}
    for x in p.alphabet.words(bound - 1):
        seen.setdefault(normal_form(x, rules), x)
    reps = list(seen.values())
    for z in p.alphabet:
        buckets: dict[Word, Word] = {}
        for x in reps:
            key = normal_form(x + (z,), rules)
            other = buckets.setdefault(key, x)
            if other != x:
                return other, x, (z,)
    return None
