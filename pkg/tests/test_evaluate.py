import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morphkit.corpus import Corpus, FeatureBundle, Triple, VerbClass
from morphkit.evaluate import (HIERARCHY, EvalReport, Instance, Label, LoopThresholds, Oracle, ProbeCategory,
                               StemKind, VariantRules, classify_error, detect_loop, error_flags, error_report,
                               error_table, exact_accuracy, format_table, normalize_orthography, per_class_table,
                               pick_label, probe_categories, stem_preserved, syncretism_probe)
from morphkit.grammar import grammar_from_dict
from morphkit.sampling import PROBE_BUNDLE, syncretism_testset

B = FeatureBundle.parse

MONSTER = ("ynawemaylmyylmyylmyylmy" "ylmyylmyymayamawemyymamyamawemyymamya" "mawemyymamyamawemyymamyamawemyymamyam"
           "awemyylmyamyamawemyymamyamawemyymamya" "mawemyylmyylmyy")


# -- accuracy and orthography ----------------------------------------------------------

def test_exact_accuracy():
    gold = Corpus([Triple("a", B("V"), f"f{i}") for i in range(200)])
    forms = [t.form for t in gold]
    assert exact_accuracy(forms, gold) == 1.0
    assert exact_accuracy(["x"] * 200, gold) == 0.0
    assert exact_accuracy(forms[:102] + ["x"] * 98, gold) == pytest.approx(0.51)
    with pytest.raises(ValueError):
        exact_accuracy(forms[:5], gold)
    assert exact_accuracy([], []) == 0.0


def test_free_variants_count_as_wrong():
    gold = [Triple("rniwis", B("V"), "yrniwi")]
    assert exact_accuracy(["yérniwi"], gold) == 0.0


def test_normalize_examples():
    assert normalize_orthography("yérniwi") == "yrniwi"
    assert normalize_orthography("yawakatan") == "yawakatan"


def test_normalize_pairs():
    rules = VariantRules(pairs={"ä": "a", "q": "k"})
    assert normalize_orthography("yéqä", rules) == "yéka" if "é" not in rules.strip else "yka"
    with pytest.raises(ValueError):
        VariantRules(pairs={"a": "b", "b": "c"})


def test_normalize_idempotent_on_corpus_forms(full_corpus):
    forms = random.Random(0).sample([t.form for t in full_corpus], 1000)
    rules = VariantRules(strip=frozenset("é"), pairs={"e": "i", "o": "u"})
    for form in forms:
        once = normalize_orthography(form, rules)
        assert normalize_orthography(once, rules) == once


@settings(max_examples=200)
@given(st.text(alphabet="aeéioukntyw", max_size=20))
def test_normalize_idempotent_property(form):
    once = normalize_orthography(form)
    assert normalize_orthography(once) == once


# -- loops --------------------------------------------------------------------------------

def test_detect_loop():
    assert detect_loop(MONSTER, "ysnewem")
    assert not detect_loop("ysnewem", "ysnewem")
    # six characters is not more than four times two, and "ab" is below the minimum unit
    assert not detect_loop("ababab", "ab")
    assert detect_loop("ababab", "a")
    assert detect_loop("xabcabcabcx", "xabcabcabcx")
    assert not detect_loop("abcabc", "abcabc")


def test_loop_thresholds_configurable():
    assert detect_loop("ababab", "ababab", LoopThresholds(unit=2))


def test_stem_preserved():
    assert stem_preserved("tar", "ytanan")
    assert stem_preserved("renz", "yrenzawem")
    assert not stem_preserved("renz", "ymryawem")
    assert not stem_preserved("sn", "ygmtandn")


# -- taxonomy goldens ----------------------------------------------------------------------

@pytest.fixture(scope="module")
def renz_oracle():
    g = grammar_from_dict({
        "slots": ["UNDERGOER", "DIRECTIONAL", "STEM", "DESINENCE"],
        "attributes": {"pos": ["V"], "tam": ["NPH", "PSTPFV"], "actor": ["1SGA", "3SGA"], "number": ["DU"]},
        "exponents": {
            "UNDERGOER": [{"surface": "y"}],
            "DIRECTIONAL": [{"surface": "n"}],
            "DESINENCE": [{"surface": "ng", "when": {"tam": "PSTPFV", "actor": "1SGA"}},
                          {"surface": "nga", "when": {"tam": "PSTPFV", "actor": "3SGA"}},
                          {"surface": "ann", "when": {"tam": "NPH", "actor": "1SGA"}},
                          {"surface": "an", "when": {"tam": "NPH", "actor": "3SGA"}}],
        },
        "classes": {"Ambifixing": {}},
    })
    return Oracle(g, stems={"renzas": "renz"})


def test_golden_allomorphy_future_imperative(nen):
    r = classify_error("yngita", "yngangwita", "is", B("V;ALPHA;3SGU;AND;ND;FUT.IMP;2SGA"), Oracle(nen))
    assert r.label is Label.ALLOMORPHY


def test_golden_target_bad_tags():
    bundle = B("V;M;ALPHA;ND;NPH;3SGA")
    r = classify_error("nnganztat", "ynganztat", "nganzs", bundle, badgold=[("nganzs", bundle)])
    assert r.label is Label.TARGET


def test_golden_generated_stem():
    r = classify_error("ymryawem", "yrenzawem", "renzas", B("V;ALPHA;2|3NSGU;DU;NPH;3SGA"))
    assert (r.label, r.sublabel) == (Label.STEM, StemKind.GENERATED_STEM)


def test_golden_remapping():
    r = classify_error("ygmtandn", "ysnendn", "sns", B("V;ALPHA;3SGU;ND;PSTPFV;2SGA"), known_stems={"gm", "sn"})
    assert (r.label, r.sublabel) == (Label.STEM, StemKind.REMAPPING)


def test_golden_free_variation():
    assert classify_error("yérniwi", "yrniwi", "rniwis", B("V;ALPHA;3SGU;ND;NPH;3SGA")).label is Label.FREE_VARIATION


def test_golden_category_misapplication(renz_oracle):
    bundle = B("V;PSTPFV;1SGA;DU")
    assert renz_oracle.generate("renzas", bundle) == "ynrenzng"
    r = classify_error("ynrenzan", "ynrenzng", "renzas", bundle, renz_oracle)
    assert r.label is Label.ALLOMORPHY
    assert renz_oracle.analyze("renzas", "ynrenzan") == {B("V;NPH;3SGA;DU")}


def test_correct():
    assert classify_error("yakate", "yakate", "akas", B("V")).label is Label.CORRECT


def test_looping_is_stem():
    r = classify_error(MONSTER, "ysnewem", "sns", B("V"))
    assert (r.label, r.sublabel) == (Label.STEM, StemKind.LOOPING)


def test_rewrite_violation_is_allomorphy(nen):
    # r+t -> n not applied: the unrewritten concatenation of a real cell
    oracle = Oracle(nen)
    bundle = B("V;ALPHA;3SGU;ND;NPH;1SGA")
    assert oracle.skips_rewrite("tars", "ytartan")
    assert classify_error("ytartan", "ytanan", "tars", bundle, oracle).label is Label.ALLOMORPHY


def test_oracle_rejecting_gold_is_target(nen):
    oracle = Oracle(nen)
    bundle = B("V;ALPHA;3SGU;ND;NPH;1SGA")
    r = classify_error("ytanan", "ytaretan", "tars", bundle, oracle)
    assert r.label is Label.TARGET


# -- hierarchy ---------------------------------------------------------------------------------

@pytest.mark.parametrize("flags", [
    {Label.TARGET, Label.ALLOMORPHY}, {Label.TARGET, Label.STEM}, {Label.TARGET, Label.FREE_VARIATION},
    {Label.STEM, Label.ALLOMORPHY}, {Label.STEM, Label.FREE_VARIATION}, {Label.ALLOMORPHY, Label.FREE_VARIATION},
    set(HIERARCHY),
])
def test_pick_label(flags):
    assert pick_label(flags) is next(label for label in HIERARCHY if label in flags)


def test_dominance_target_over_allomorphy(nen):
    bundle = B("V;ALPHA;3SGU;ND;NPH;1SGA")
    flags, _ = error_flags("ytartan", "ytanan", "tars", bundle, Oracle(nen), badgold=[("tars", bundle)])
    assert {Label.TARGET, Label.ALLOMORPHY} <= flags
    assert classify_error("ytartan", "ytanan", "tars", bundle, Oracle(nen), [("tars", bundle)]).label is Label.TARGET


def test_dominance_target_over_stem():
    bundle = B("V")
    r = classify_error("ymryawem", "yrenzawem", "renzas", bundle, badgold=[("renzas", bundle.key)])
    assert {Label.TARGET, Label.STEM} <= r.flags and r.label is Label.TARGET and r.sublabel is None


def test_dominance_stem_over_allomorphy():
    r = classify_error("ymryawem", "yrenzawem", "renzas", B("V"))
    assert {Label.STEM, Label.ALLOMORPHY} <= r.flags and r.label is Label.STEM


def test_dominance_allomorphy_over_free_variation(nen):
    # with "a" treated as a free variant, the 2SG form also matches the 3SG gold after normalization
    variants = VariantRules(strip=frozenset("a"))
    r = classify_error("yakand", "yakanda", "akas", B("V;ALPHA;3SGU;ND;PSTPFV;3SGA"), Oracle(nen), variants=variants)
    assert {Label.ALLOMORPHY, Label.FREE_VARIATION} <= r.flags
    assert r.label is Label.ALLOMORPHY


@settings(max_examples=300)
@given(st.text(alphabet="yaknrte", min_size=1, max_size=12), st.text(alphabet="yaknrte", min_size=1, max_size=12),
       st.booleans())
def test_label_is_highest_flag(pred, gold, bad):
    bundle = B("V")
    r = classify_error(pred, gold, "akas", bundle, badgold=[("akas", bundle)] if bad else [])
    if pred == gold:
        assert r.label is Label.CORRECT
    else:
        assert r.label in r.flags and r.label is pick_label(r.flags)


# -- reports ----------------------------------------------------------------------------------

def test_badgold_only_report():
    gold = [Triple(f"lem{i}s", B("V;ALPHA;NPH"), f"ylem{i}e") for i in range(200)]
    badgold = [(t.lemma, t.bundle) for t in gold[:8]]
    instances = [Instance.from_triple(t, t.form if i >= 8 else t.form + "n") for i, t in enumerate(gold)]
    report = error_report(instances, badgold=badgold)
    assert dict(report.error_counts) == {Label.TARGET: 8}
    assert report.correct == 192 and report.total == 200
    assert report.heuristic


def test_empty_report():
    report = error_report([])
    assert (report.total, report.correct, report.accuracy, sum(report.error_counts.values())) == (0, 0, 0.0, 0)


def test_report_cross_foots(full_corpus, nen, lexicon):
    rng = random.Random(5)
    sample = rng.sample(list(full_corpus), 300)
    instances = []
    for t in sample:
        roll = rng.random()
        pred = t.form if roll < 0.5 else t.form[:-1] if roll < 0.8 else "y" + "".join(rng.sample("abcdefg", 4))
        instances.append(Instance.from_triple(t, pred))
    report = error_report(instances, Oracle(nen, lexicon.prefixing), prefixing_lexemes=set(lexicon.prefixing))
    assert report.correct + sum(report.error_counts.values()) == report.total == 300
    assert sum(report.per_class_total.values()) == 300
    assert all(report.per_class[c] <= report.per_class_total[c] for c in VerbClass)
    assert sum(report.per_class.values()) == report.correct
    assert not report.heuristic


def test_report_tsv_and_tables():
    report = EvalReport(total=3, correct=1)
    report.error_counts[Label.STEM] = 2
    tsv = report.to_tsv()
    assert "accuracy\t0.333\n" in tsv and "errors.Stem\t2\n" in tsv
    table = error_table({"LR": report, "MR": report})
    lines = table.splitlines()
    assert lines[0].split("|")[1].strip() == "LR"
    assert lines[-1].split("|")[0].strip() == "Total" and lines[-1].split("|")[1].strip() == "2"
    assert "Ambifixing" in per_class_table({"A": report})
    assert format_table(["a", "bb"], [["x", 1]]) == "a | bb\n--+---\nx |  1\n"


# -- syncretism probe -------------------------------------------------------------------------------

def test_probe_categories(nen, lexicon):
    probe = syncretism_testset(nen, lexicon.ambifixing, size=100)
    oracle = Oracle(nen)
    t = probe[0]
    stem = oracle.stem(t.lemma)
    three = oracle.generate(t.lemma, t.bundle.replace("2SGA", "3SGA"))
    dual = oracle.generate(t.lemma, t.bundle.replace("2SGA", "2DUA"))
    preds = [t.form, three, dual, "y" + stem + "ngt"]
    cats = probe_categories(preds, [t] * 4, oracle)
    assert three.endswith("nda") and dual.endswith("and")
    assert cats == [ProbeCategory.CORRECT_2SG, ProbeCategory.SYNCRETIC_WITH_3SG, ProbeCategory.OTHER_CELL,
                    ProbeCategory.NONCE]
    counts = syncretism_probe(preds, [t] * 4, nen)
    assert set(counts) == set(ProbeCategory) and sum(counts.values()) == 4
    with pytest.raises(ValueError):
        syncretism_probe(preds[:2], [t] * 4, nen)
    assert PROBE_BUNDLE == t.bundle
