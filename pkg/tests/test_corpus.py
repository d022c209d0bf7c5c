import pytest

from morphkit.corpus import (Corpus, CorpusError, FeatureBundle, Triple, VerbClass, classify_verb, nfc,
                             parse_corpus, read_corpus, serialize_corpus, write_corpus)


def test_parse_single_line():
    c = parse_corpus("tar\tytanan\tV;3SGU;1SGA;NPH")
    assert len(c) == 1
    t = c[0]
    assert (t.lemma, t.form, t.frequency) == ("tar", "ytanan", 1)
    assert t.bundle.tags == {"V", "3SGU", "1SGA", "NPH"}


def test_parse_empty_text():
    assert len(parse_corpus("")) == 0


def test_frequency_column():
    assert parse_corpus("a\tb\tV\t7")[0].frequency == 7


@pytest.mark.parametrize("line, fragment", [
    ("a\tb", "fields"),
    ("a\tb\tV\tseven", "frequency"),
    ("a\t\tV", "empty"),
    ("a\tb\tV;V", "duplicate"),
    ("a\tb\tV\t-1", "frequency"),
])
def test_malformed_lines_report_line_number(line, fragment):
    with pytest.raises(CorpusError, match=r"line 2: .*" + fragment):
        parse_corpus("x\ty\tV\n" + line)


def test_comments_and_blank_lines_skipped():
    c = parse_corpus("# header\n\na\tb\tV\t3\n")
    assert [t.form for t in c] == ["b"]


def test_bundle_canonical_order():
    assert FeatureBundle(["NPH", "V", "1SGA"]).key == "1SGA;NPH;V"
    assert FeatureBundle.parse("V;NPH") == FeatureBundle.parse("NPH;V")
    assert str(FeatureBundle.parse("V;NPH")) == "NPH;V"


@pytest.mark.parametrize("tags", [[], ["a b"], ["a;b"], ["V", "V"]])
def test_bundle_rejects_bad_tags(tags):
    with pytest.raises(ValueError):
        FeatureBundle(tags)


def test_bundle_replace():
    b = FeatureBundle.parse("V;2SGA;PSTPFV")
    assert b.replace("2SGA", "3SGA") == FeatureBundle.parse("V;3SGA;PSTPFV")


def test_triple_validation():
    with pytest.raises(ValueError):
        Triple("", FeatureBundle(["V"]), "x")
    with pytest.raises(ValueError):
        Triple("a", FeatureBundle(["V"]), "x", -1)
    assert Triple("a", FeatureBundle(["V"]), "x", 0).frequency == 0


def test_nfc_applied_on_parse():
    decomposed = "yng\u0304iti"
    t = parse_corpus(f"ḡis\t{decomposed}\tV")[0]
    assert t.form == nfc("ynḡiti") == "ynḡiti"


def test_serialize_single():
    c = Corpus([Triple("a", FeatureBundle(["V"]), "b", 2)])
    assert serialize_corpus(c) == "a\tb\tV\t2\n"
    assert serialize_corpus(c, with_frequency=False) == "a\tb\tV\n"


def test_serialize_zero_frequency():
    c = Corpus([Triple("a", FeatureBundle(["V"]), "b", 0)])
    assert serialize_corpus(c).rstrip("\n").split("\t")[3] == "0"


def test_round_trip_hundred(tmp_path):
    entries = [Triple(f"lem{i}s", FeatureBundle(["V", f"T{i % 7}"]), f"yform{i}", i % 5) for i in range(100)]
    c = Corpus(entries)
    assert parse_corpus(serialize_corpus(c)) == c
    path = tmp_path / "c.tsv"
    write_corpus(path, c, header="made by a test\nseed: 1")
    assert read_corpus(path) == c
    assert path.read_text().startswith("# made by a test\n# seed: 1\n")


def test_order_and_free_variants_preserved():
    text = "b\tx2\tV\t1\na\tx1\tV\t5\na\tx1b\tV\t5\n"
    c = parse_corpus(text)
    assert [t.form for t in c] == ["x2", "x1", "x1b"]


def test_classify_verb():
    assert classify_verb(Triple("owabs", FeatureBundle(["V", "M"]), "x")) is VerbClass.MIDDLE
    assert classify_verb(Triple("m", FeatureBundle(["V"]), "x"), {"m"}) is VerbClass.PREFIXING
    assert classify_verb(Triple("yis", FeatureBundle(["V"]), "x"), {"m"}) is VerbClass.AMBIFIXING
    # the M tag wins over list membership
    assert classify_verb(Triple("m", FeatureBundle(["V", "M"]), "x"), {"m"}) is VerbClass.MIDDLE


def test_corpus_slicing():
    c = parse_corpus("a\tb\tV\nc\td\tV\ne\tf\tV\n")
    assert isinstance(c[:2], Corpus) and len(c[:2]) == 2
    assert len(c + c) == 6
