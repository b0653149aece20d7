"""Word-problem grammars along a weak compression.

``build_wp_grammar`` lifts a word-problem grammar of the compressed monoid
to one of the original monoid, keeping every intermediate language;
``extract_lm_wp_grammar`` goes back down by rational transductions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .closures import (
    AlphaMonadicSystem,
    MonadicCfSystem,
    alternating_product,
    bipartisan_ancestors,
    monadic_ancestors,
    wp_from_complete_monadic,
)
from .compression import CompressionChain, CompressionStep, compress, compress_chain
from .grammars.automata import Nfa
from .grammars.cfg import (
    Cfg,
    GrammarBuilder,
    GrammarTooLarge,
    hom_image,
    nonempty,
    union,
    wp_free_monoid_grammar,
)
from .grammars.transduce import Fst, apply_fst, identity_language_grammar, intersect_regular
from .presentations import MARKER, MonoidPresentation, Word, has_nontrivial_idempotent, is_special
from .rewriting import Confluence, RewriteSystem, check_confluence_lengthreducing, complete_bounded

# Stage names, in build order.
STAGES = (
    "left_wp",          # word problem of the compressed monoid, spelled in pieces
    "free_palindromes",  # w # w^rev over the pieces that are not relation pieces
    "alternating",      # alternating product of the two
    "marked",           # the marker widened to alpha # alpha^rev
    "identity_cores",   # non-empty piece words w with w alpha = alpha
    "sealed_wp",        # u # v^rev for equal u, v beginning and ending with alpha
    "alpha_wp",         # u # v^rev for equal u, v containing alpha
    "alpha_free_wp",    # w # w^rev for w free of alpha
    "built_wp",
)


@dataclass(frozen=True, eq=False)
class WpGrammarBundle:
    presentation: MonoidPresentation
    step: CompressionStep
    base_wp: Cfg
    built_wp: Cfg
    intermediates: Mapping[str, Cfg] = field(default_factory=dict)

    def manifest(self) -> dict:
        return {
            "presentation": self.presentation.to_text(),
            "compression": self.step.as_dict(),
            "stages": {name: {"file": f"{name}.cfg", "productions": g.size}
                       for name, g in self.intermediates.items()},
            "base_wp": {"file": "base_wp.cfg", "productions": self.base_wp.size},
        }

    def save(self, directory: Path) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for name, g in self.intermediates.items():
            (directory / f"{name}.cfg").write_text(g.to_text(), encoding="utf-8")
        (directory / "base_wp.cfg").write_text(self.base_wp.to_text(), encoding="utf-8")
        (directory / "presentation.pres").write_text(self.presentation.to_text(), encoding="utf-8")
        (directory / "manifest.json").write_text(json.dumps(self.manifest(), indent=2, ensure_ascii=False),
                                                 encoding="utf-8")
        return directory


def _letters_nfa(words: Sequence[Word], letters) -> Nfa:
    return Nfa.from_words(words, letters)


def _marker(letters) -> Nfa:
    return Nfa.from_words([(MARKER,)], set(letters) | {MARKER})


def wp_shape(letters) -> Nfa:
    """A* # A*."""
    letters = set(letters)
    return Nfa.universal(letters).concat(_marker(letters)).concat(Nfa.universal(letters))


def check_wp_shape(g: Cfg, letters) -> None:
    """Every word has exactly one marker, with letters from ``letters``."""
    full = set(letters) | {MARKER}
    foreign = set(g.terminals) - full
    if foreign:
        raise ValueError(f"grammar uses letters {sorted(foreign)} outside the alphabet")
    bad = wp_shape(letters).with_alphabet(full).complement()
    if nonempty(intersect_regular(g.with_terminals(full), bad)):
        raise ValueError("grammar has words without exactly one marker")


def sigma_star(alpha: Word, letters) -> Nfa:
    """alpha (A* - A* alpha A*): the words with exactly one alpha, at the start."""
    return Nfa.from_words([alpha], letters).concat(Nfa.avoiding(letters, alpha))


def free_pieces(step: CompressionStep) -> Nfa:
    letters = list(step.source.alphabet)
    return sigma_star(step.alpha, letters).difference(_letters_nfa(step.sigma, letters)).minimize()


def build_wp_grammar(p: MonoidPresentation, base_wp: Cfg, step: Optional[CompressionStep] = None) -> WpGrammarBundle:
    """Word-problem grammar for ``p`` from one for its compression.

    Each stage is simplified and guarded; a guard violation is re-raised
    with the stage name.
    """
    step = step or compress(p)
    letters = list(p.alphabet)
    alpha = step.alpha
    arev = alpha[::-1]
    gammas = list(step.gamma)
    check_wp_shape(base_wp, gammas)
    stages: dict[str, Cfg] = {}
    current = "left_wp"
    try:
        pieces = step.piece_of
        spell_sides = Fst.substitution({g: pieces[g] for g in gammas},
                                       {g: pieces[g][::-1] for g in gammas})
        stages["left_wp"] = apply_fst(base_wp.with_terminals(gammas + [MARKER]), spell_sides, current)

        current = "free_palindromes"
        free = free_pieces(step).star()
        shape = free.concat(_marker(letters)).concat(free.reverse())
        wp_free = wp_free_monoid_grammar(letters)
        stages[current] = intersect_regular(wp_free, shape.with_alphabet([MARKER]), current)

        current = "alternating"
        stages[current] = alternating_product(stages["left_wp"], stages["free_palindromes"])

        current = "marked"
        stages[current] = hom_image(stages["alternating"], {MARKER: alpha + (MARKER,) + arev})

        current = "identity_cores"
        ip = identity_language_grammar(base_wp, gammas)
        core = hom_image(ip, {g: pieces[g] for g in gammas}).with_terminals(letters)
        nonempty_words = Nfa.from_words([(a,) for a in letters], letters).concat(Nfa.universal(letters))
        stages[current] = intersect_regular(core, nonempty_words, current)

        current = "sealed_wp"
        system = AlphaMonadicSystem(alpha, stages["identity_cores"])
        stages[current] = bipartisan_ancestors(stages["marked"], system, system.reversed(), stage=current)

        current = "alpha_wp"
        r_alpha = MonadicCfSystem(frozenset(letters) | {MARKER}, {MARKER: union(stages["sealed_wp"], wp_free)})
        has_alpha = Nfa.containing(letters, alpha)
        shape = has_alpha.concat(_marker(letters)).concat(has_alpha.reverse())
        stages[current] = intersect_regular(monadic_ancestors(wp_free, r_alpha, current),
                                            shape.with_alphabet([MARKER]), current)

        current = "alpha_free_wp"
        no_alpha = Nfa.avoiding(letters, alpha)
        shape = no_alpha.concat(_marker(letters)).concat(no_alpha.reverse())
        stages[current] = intersect_regular(wp_free, shape.with_alphabet([MARKER]), current)

        current = "built_wp"
        stages[current] = union(stages["alpha_wp"], stages["alpha_free_wp"]).with_terminals(letters + [MARKER])
    except GrammarTooLarge as exc:
        raise GrammarTooLarge(exc.count, exc.guard, current) from None
    check_wp_shape(stages["built_wp"], letters)
    return WpGrammarBundle(p, step, base_wp, stages["built_wp"], stages)


def extract_lm_wp_grammar(p: MonoidPresentation, wp_m: Cfg, step: Optional[CompressionStep] = None) -> Cfg:
    """Word-problem grammar of the compressed monoid from one for ``p``:
    keep u alpha # alpha^rev v^rev with u, v piece words, cut the two
    alphas, and read the pieces back as compressed letters."""
    step = step or compress(p)
    letters = list(p.alphabet)
    alpha = step.alpha
    full = letters + [MARKER]
    pieces = _letters_nfa(step.sigma, letters).star()
    middle = Nfa.from_words([alpha + (MARKER,) + alpha[::-1]], full)
    shape = pieces.concat(middle).concat(pieces.reverse())
    kept = intersect_regular(wp_m.with_terminals(full), shape.with_alphabet(full))
    unmark = Fst.inverse_substitution({**{a: (a,) for a in letters}, MARKER: alpha + (MARKER,) + alpha[::-1]})
    narrowed = apply_fst(kept, unmark)
    table = step.piece_of
    decode = Fst.inverse_substitution({g: w for g, w in table.items()}, {g: w[::-1] for g, w in table.items()})
    return apply_fst(narrowed, decode).with_terminals(list(step.gamma) + [MARKER])


def complete_monadic_wp(p: MonoidPresentation) -> Optional[Cfg]:
    """Word-problem grammar when ``p`` (after completion) is a finite complete
    monadic system; None otherwise."""
    r = RewriteSystem.from_presentation(p)
    if not (r.monadic and check_confluence_lengthreducing(r).status is Confluence.COMPLETE):
        r = complete_bounded(r)
        if r is None or not r.monadic:
            return None
    return wp_from_complete_monadic(r)


def build_wp_chain(p: MonoidPresentation, base_wp: Optional[Cfg] = None) -> tuple[CompressionChain, list[WpGrammarBundle]]:
    """Compress to the bottom and lift a word-problem grammar back up.
    Without ``base_wp`` the bottom must have a complete monadic system."""
    chain = compress_chain(p)
    if not chain.steps:
        raise ValueError(f"{p} is incompressible")
    if base_wp is None:
        base_wp = complete_monadic_wp(chain.terminal)
        if base_wp is None:
            raise ValueError("the compressed presentation has no complete monadic system; supply its word-problem grammar")
    bundles = []
    wp = base_wp
    for step in reversed(chain.steps):
        bundle = build_wp_grammar(step.source, wp, step)
        bundles.append(bundle)
        wp = bundle.built_wp
    return chain, bundles[::-1]


def rational_membership(wp: Cfg, w: Word, r: Nfa) -> bool:
    """Is w equal to some word of L(r)?  Nonempty iff L(wp) meets w # R^rev."""
    w = tuple(w)
    letters = set(wp.terminals) | set(r.alphabet) | set(w)
    query = Nfa.from_words([w + (MARKER,)], letters).concat(r.reverse().with_alphabet(letters))
    return nonempty(intersect_regular(wp.with_terminals(letters), query))


def integer_valuation_wp(values: Mapping[str, int]) -> Cfg:
    """Word-problem grammar for a monoid embedded in the integers by the
    given letter values: { u # v^rev : val(u) = val(v) }.

    Built from balanced words over unit steps with one marker, then
    pulled back along the sided step encoding.
    """
    b = GrammarBuilder()
    s, t = b.nt("S"), b.nt("T")
    b.add(s, [])
    b.add(t, [MARKER, s])
    for up, down in (("u", "d"), ("d", "u")):
        b.add(s, [up, s, down, s])
        b.add(t, [up, t, down, s])
        b.add(t, [up, s, down, t])
    steps = b.build(t, {"u", "d", MARKER})

    def encode(k: int) -> Word:
        return ("u",) * k if k >= 0 else ("d",) * -k

    left = {a: encode(k) for a, k in values.items()}
    right = {a: encode(-k) for a, k in values.items()}
    return apply_fst(steps, Fst.inverse_substitution(left, right)).with_terminals(list(values) + [MARKER])


def decide_word_problem_cf(p: MonoidPresentation, base_wp: Optional[Cfg] = None) -> dict:
    """Compression-side report for a one-relation monoid."""
    if len(p.relations) != 1:
        raise ValueError("expects a one-relation presentation")
    chain = compress_chain(p)
    terminal = chain.terminal
    report: dict = {
        "presentation": p.to_text(),
        "idempotent": has_nontrivial_idempotent(p).value,
        "compressible": bool(chain.steps),
        "chain_length": len(chain),
        "chain": chain.as_dict(),
        "terminal_special": terminal.to_text() if chain.steps and is_special(terminal) else None,
        "virtually_free_verdict": "not computed: deciding whether the maximal subgroups are virtually free "
                                  "is outside this toolkit",
        "built_wp": None,
    }
    if chain.steps:
        try:
            _, bundles = build_wp_chain(p, base_wp)
        except ValueError as exc:
            report["built_wp_error"] = str(exc)
        else:
            report["built_wp"] = {"productions": bundles[0].built_wp.size,
                                  "stages": {k: g.size for k, g in bundles[0].intermediates.items()}}
            report["wp_grammar"] = bundles[0].built_wp
    return report
