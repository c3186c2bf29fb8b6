"""Finitely presented groups: free words, presentations, coset enumeration,
Reidemeister-Schreier rewriting and membership criteria for right-angled
Baumslag-Solitar-Artin groups."""

from .freewords import Alphabet, Word, parse_word
from .presentations import Presentation, abelianization, parse_presentation, presentations_match, tietze_simplify
from .cosets import CosetOverflow, CosetTable, schreier_transversal, todd_coxeter
from .reidschreier import Rewriter, subgroup_presentation
from .graphs import LabelledDigraph, build_bgamma, classify_membership
from .catalog import build_family, recipe, verify

__all__ = [
    "Alphabet", "Word", "parse_word",
    "Presentation", "abelianization", "parse_presentation", "presentations_match", "tietze_simplify",
    "CosetOverflow", "CosetTable", "schreier_transversal", "todd_coxeter",
    "Rewriter", "subgroup_presentation",
    "LabelledDigraph", "build_bgamma", "classify_membership",
    "build_family", "recipe", "verify",
]
__version__ = "0.1.0"
