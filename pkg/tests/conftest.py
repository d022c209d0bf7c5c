import pytest

from morphkit.grammar import nen_fragment


@pytest.fixture(scope="session")
def nen():
    return nen_fragment()


@pytest.fixture(scope="session")
def lexicon():
    from morphkit.synth import make_lexicon
    return make_lexicon(seed=0)


@pytest.fixture(scope="session")
def full_corpus(nen, lexicon):
    from morphkit.synth import synthetic_corpus
    return synthetic_corpus(nen, lexicon, seed=0)


@pytest.fixture(scope="session")
def canonical(full_corpus):
    """Frequency-ranked corpus of 2,231 forms."""
    from morphkit.corpus import Corpus
    return Corpus(full_corpus[:2231], "canonical")


ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, seconds, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  ({seconds:.2f}s)  {detail}")
