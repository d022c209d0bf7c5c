"""Toolkit for low-resource verbal inflection experiments.

Modules: :mod:`~morphkit.corpus` (triples and TSV I/O), :mod:`~morphkit.grammar`
(slot-template generator), :mod:`~morphkit.align`, :mod:`~morphkit.baseline`
(affix-rule learner), :mod:`~morphkit.augment` (hallucination),
:mod:`~morphkit.sampling` (splits), :mod:`~morphkit.evaluate` and the
``morphkit`` command line.
"""

from morphkit.corpus import Corpus, FeatureBundle, Triple, VerbClass, parse_corpus, read_corpus, write_corpus
from morphkit.grammar import GrammarConfig, analyze, enumerate_paradigm, generate, load_grammar, nen_fragment

__version__ = "0.1.0"

__all__ = [
    "Corpus", "FeatureBundle", "Triple", "VerbClass", "parse_corpus", "read_corpus", "write_corpus",
    "GrammarConfig", "analyze", "enumerate_paradigm", "generate", "load_grammar", "nen_fragment",
]
