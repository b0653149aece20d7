"""Context-free grammars, finite automata and transducers."""

from .automata import Nfa
from .cfg import (
    Cfg,
    GrammarBuilder,
    GrammarTooLarge,
    accepts,
    concat,
    enumerate_language,
    finite_language,
    hom_image,
    member,
    nonempty,
    reverse,
    set_production_guard,
    simplify,
    star,
    union,
    wp_free_monoid_grammar,
)
from .transduce import Fst, apply_fst, identity_language_grammar, intersect_regular, inverse_hom

__all__ = [
    "Cfg", "Fst", "GrammarBuilder", "GrammarTooLarge", "Nfa", "accepts", "apply_fst", "concat",
    "enumerate_language", "finite_language", "hom_image", "identity_language_grammar", "intersect_regular",
    "inverse_hom", "member", "nonempty", "reverse", "set_production_guard", "simplify", "star", "union",
    "wp_free_monoid_grammar",
]
