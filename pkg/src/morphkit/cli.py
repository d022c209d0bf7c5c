"""``morphkit`` command line.

Exit status: 0 on success, 2 for user or configuration errors (bad flags,
missing files, malformed corpora or grammars, undersized corpora), 1 for
anything else. Every file written embeds a ``#`` header with the invocation
and seed.
"""

from __future__ import annotations

import argparse
import logging
import os
import shlex
import subprocess
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from morphkit.augment import HallucinationError, HallucinationSpec, hallucinate
from morphkit.baseline import RuleSet, extract_rules, predict_all
from morphkit.corpus import (DEFAULT_PREFIXING_LEXEMES, Corpus, CorpusError, FeatureBundle, Triple, VerbClass,
                             nfc, read_corpus, write_corpus)
from morphkit.evaluate import (EvalReport, Instance, Oracle, error_report, error_table, format_table,
                               per_class_table, strip_infinitive, syncretism_probe)
from morphkit.grammar import FRAGMENT_PATH, GrammarConfig, GrammarError, enumerate_paradigm, load_grammar
from morphkit.sampling import (DEFAULT_SIZES, SIZE_TAGS, SizingError, SplitSpec, composition_sets, make_splits,
                               redistribute_syncretic, strip_cells, syncretism_testset, write_splits)
from morphkit.synth import make_lexicon, synthetic_corpus

log = logging.getLogger("morphkit")

SEED_ENV = "MORPHKIT_SEED"
EXPERIMENTS = ("sizes", "composition", "syncretism")


class UserError(Exception):
    """Reported with exit status 2."""


class ExperimentError(RuntimeError):
    pass


USER_ERRORS = (UserError, CorpusError, GrammarError, SizingError, HallucinationError, FileNotFoundError,
               IsADirectoryError, ExperimentError)


# -- shared helpers ----------------------------------------------------------------

def header(args) -> str:
    return f"morphkit {' '.join(shlex.quote(a) for a in args.argv)}\nseed: {args.seed}"


def _write_text(path: Path, text: str, args) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = "".join(f"# {line}\n" for line in header(args).splitlines())
    path.write_text(lines + text, encoding="utf-8")


def _grammar(args) -> GrammarConfig:
    return load_grammar(args.grammar or FRAGMENT_PATH)


def _prefixing(args, g: GrammarConfig | None = None) -> frozenset[str]:
    names = set(DEFAULT_PREFIXING_LEXEMES)
    if g is not None:
        names |= g.prefixing_lexemes
    if getattr(args, "prefixing", None):
        names |= {line.strip() for line in Path(args.prefixing).read_text(encoding="utf-8").splitlines()
                  if line.strip() and not line.startswith("#")}
    return frozenset(names)


def read_inputs(path) -> list[tuple[str, FeatureBundle]]:
    """Lemma and bundle per line.

    Accepts two-column ``lemma<TAB>tags`` files and corpus files
    (``lemma<TAB>form<TAB>tags[<TAB>frequency]``, form ignored).
    """
    out = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) not in (2, 3, 4):
            raise CorpusError(f"expected lemma and tags, or a corpus row; got {len(fields)} fields", lineno)
        tags = fields[1] if len(fields) == 2 else fields[2]
        try:
            out.append((nfc(fields[0]), FeatureBundle.parse(tags)))
        except ValueError as e:
            raise CorpusError(str(e), lineno) from e
    return out


def read_predictions(path) -> list[str]:
    text = Path(path).read_text(encoding="utf-8")
    return [nfc(line) for line in text.splitlines() if not line.startswith("#")]


def write_predictions(path: Path, preds: Sequence[str], args) -> None:
    _write_text(path, "".join(p + "\n" for p in preds), args)


def read_badgold(path) -> list[tuple[str, str]]:
    if not path:
        return []
    return [(lemma, FeatureBundle.parse(bundle).key) for lemma, bundle in read_inputs(path)]


def _parse_sizes(text: str | None) -> dict[str, int]:
    sizes = dict(DEFAULT_SIZES)
    if text:
        for item in text.split(","):
            tag, _, value = item.partition("=")
            if tag not in SIZE_TAGS or not value.isdigit():
                raise UserError(f"bad size specification {item!r}; expected e.g. LR=100,MR=1000")
            sizes[tag] = int(value)
    return sizes


def _split_spec(args) -> SplitSpec:
    try:
        return SplitSpec(args.mode, _parse_sizes(args.sizes), args.test_size, args.dev_size, args.seed)
    except ValueError as e:
        raise UserError(str(e)) from e


# -- external predictors -------------------------------------------------------------

@dataclass(frozen=True)
class AdapterSpec:
    """Shell command template for an external system.

    Placeholders ``{train}``, ``{dev}``, ``{test_inputs}`` and ``{predictions}``
    are replaced with quoted file paths. The command must write one form per
    test line to ``{predictions}``.
    """

    command: str
    timeout: float = 3600.0

    def run(self, train: Corpus, dev: Corpus, test: Corpus, workdir: Path) -> list[str]:
        workdir.mkdir(parents=True, exist_ok=True)
        paths = {name: workdir / f"{name}.tsv" for name in ("train", "dev", "test_inputs", "predictions")}
        write_corpus(paths["train"], train, with_frequency=False)
        write_corpus(paths["dev"], dev, with_frequency=False)
        paths["test_inputs"].write_text("".join(f"{t.lemma}\t{t.bundle}\n" for t in test), encoding="utf-8")
        command = self.command.format(**{k: shlex.quote(str(v)) for k, v in paths.items()})
        try:
            proc = subprocess.run(command, shell=True, capture_output=True, text=True, timeout=self.timeout)
        except subprocess.TimeoutExpired as e:
            raise ExperimentError(f"adapter timed out after {self.timeout}s: {command}\n{e.stderr or ''}") from e
        if proc.returncode != 0:
            raise ExperimentError(f"adapter exited with status {proc.returncode}: {command}\n"
                                  f"stdout:\n{proc.stdout}\nstderr:\n{proc.stderr}")
        if not paths["predictions"].exists():
            raise ExperimentError(f"adapter wrote no predictions file: {command}")
        preds = read_predictions(paths["predictions"])
        if len(preds) != len(test):
            raise ExperimentError(f"adapter produced {len(preds)} predictions for {len(test)} test items")
        return preds


def _predict(args, train: Corpus, dev: Corpus, test: Corpus, workdir: Path) -> list[str]:
    if args.adapter:
        return AdapterSpec(args.adapter, args.timeout).run(train, dev, test, workdir)
    return predict_all(extract_rules(train), test)


def _report(args, g: GrammarConfig | None, train: Corpus, test: Corpus, preds: Sequence[str],
            prefixing) -> EvalReport:
    oracle = None if g is None else Oracle(g, prefixing)
    known = {oracle.stem(t.lemma) if oracle else strip_infinitive(t.lemma) for t in train}
    instances = [Instance.from_triple(t, p) for t, p in zip(test, preds)]
    return error_report(instances, oracle, read_badgold(args.badgold), known, prefixing)


# -- subcommands -------------------------------------------------------------------------

def cmd_synth(args) -> None:
    g = _grammar(args)
    lexicon = make_lexicon(args.ambifixing, args.middle, args.prefixing_count, args.seed)
    corpus = synthetic_corpus(g, lexicon, args.size, args.seed)
    write_corpus(args.out, corpus, header=header(args))
    if args.prefixing_out:
        _write_text(Path(args.prefixing_out), "".join(f"{lemma}\n" for lemma in lexicon.prefixing), args)


def cmd_sample(args) -> None:
    spec = _split_spec(args)
    corpus = read_corpus(args.corpus)
    if not args.no_redistribute:
        corpus = redistribute_syncretic(corpus, _grammar(args))
    write_splits(make_splits(corpus, spec), args.out, args.mode, header(args))


def cmd_hallucinate(args) -> None:
    corpus = read_corpus(args.corpus)
    spec = HallucinationSpec(args.total, args.min_stem, seed=args.seed)
    write_corpus(args.out, hallucinate(corpus, spec), header=header(args))


def cmd_train(args) -> None:
    rules = extract_rules(read_corpus(args.train))
    _write_text(Path(args.out), rules.dump(), args)


def cmd_predict(args) -> None:
    rules = RuleSet.load(Path(args.rules).read_text(encoding="utf-8"))
    items = [Triple(lemma, bundle, lemma) for lemma, bundle in read_inputs(args.inputs)]
    write_predictions(Path(args.out), predict_all(rules, items), args)


def cmd_evaluate(args) -> None:
    gold = read_corpus(args.gold)
    preds = read_predictions(args.predictions)
    if len(preds) != len(gold):
        raise UserError(f"{len(preds)} predictions for {len(gold)} gold items")
    g = None if args.no_oracle else _grammar(args)
    train = read_corpus(args.train) if args.train else Corpus()
    report = _report(args, g, train, gold, preds, _prefixing(args, g))
    if args.out:
        _write_text(Path(args.out), report.to_tsv(), args)
    sys.stdout.write(report.to_tsv() if args.format == "tsv" else render_report(report))


def render_report(report: EvalReport) -> str:
    out = f"accuracy: {report.accuracy:.3f} ({report.correct}/{report.total})\n"
    if report.heuristic:
        out += "note: no grammar oracle; Stem/Allomorphy labels are heuristic\n"
    return out + error_table({"errors": report}) + per_class_table({"correct": report})


def cmd_paradigm(args) -> None:
    g = _grammar(args)
    try:
        cls = VerbClass.parse(args.verb_class)
    except ValueError as e:
        raise UserError(str(e)) from e
    for cell in enumerate_paradigm(g, nfc(args.stem), cls):
        sys.stdout.write(f"{cell.bundle}\t{cell.form}\n")


def cmd_probe(args) -> None:
    gold = read_corpus(args.gold)
    preds = read_predictions(args.predictions)
    g = _grammar(args)
    counts = syncretism_probe(preds, gold, Oracle(g, _prefixing(args, g)))
    text = "".join(f"{cat}\t{n}\n" for cat, n in counts.items())
    if args.out:
        _write_text(Path(args.out), "category\tcount\n" + text, args)
    sys.stdout.write(text)


def cmd_experiment(args) -> None:
    runner = {"sizes": _experiment_sizes, "composition": _experiment_composition,
              "syncretism": _experiment_syncretism}[args.experiment]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    g = _grammar(args)
    corpus = read_corpus(args.corpus)
    with tempfile.TemporaryDirectory(prefix="morphkit-") as tmp:
        runner(args, g, corpus, out, Path(tmp))


def _experiment_sizes(args, g, corpus, out: Path, tmp: Path) -> None:
    spec = _split_spec(args)
    prefixing = _prefixing(args, g)
    splits = make_splits(redistribute_syncretic(corpus, g), spec)
    write_splits(splits, out / "splits", args.mode, header(args))
    reports = {}
    for split in splits:
        preds = _predict(args, split.train, split.dev, split.test, tmp / split.label)
        write_predictions(out / f"{args.mode}.{split.label}.predictions.txt", preds, args)
        reports[split.label] = report = _report(args, g, split.train, split.test, preds, prefixing)
        _write_text(out / f"{args.mode}.{split.label}.report.tsv", report.to_tsv(), args)
    accuracy = format_table(["", args.mode], [[tag, f"{r.accuracy:.3f}"] for tag, r in reports.items()])
    _write_text(out / f"{args.mode}.summary.txt", accuracy + "\n" + error_table(reports), args)
    sys.stdout.write(accuracy)


def _experiment_composition(args, g, corpus, out: Path, tmp: Path) -> None:
    prefixing = _prefixing(args, g)
    result = composition_sets(corpus, args.set_size, args.seed, prefixing, within=args.within)
    write_corpus(out / "composition.test.tsv", result.test, header=header(args))
    write_corpus(out / "composition.dev.tsv", result.dev, header=header(args))
    reports = {}
    for label, train in result.sets.items():
        write_corpus(out / f"composition.{label}.train.tsv", train, header=header(args))
        preds = _predict(args, train, result.dev, result.test, tmp / label)
        reports[label] = report = _report(args, g, train, result.test, preds, prefixing)
        _write_text(out / f"composition.{label}.report.tsv", report.to_tsv(), args)
    table = per_class_table(reports)
    _write_text(out / "composition.summary.txt", table, args)
    sys.stdout.write(table)


def _experiment_syncretism(args, g, corpus, out: Path, tmp: Path) -> None:
    prefixing = _prefixing(args, g)
    lemmas = [t.lemma for t in corpus if "M" not in t.bundle and t.lemma not in prefixing]
    probe = syncretism_testset(g, lemmas, size=args.probe_size, prefixing_lexemes=prefixing)
    train = strip_cells(corpus)
    write_corpus(out / "syncretism.train.tsv", train, header=header(args))
    write_corpus(out / "syncretism.test.tsv", probe, header=header(args))
    preds = _predict(args, train, Corpus(), probe, tmp / "syncretism")
    write_predictions(out / "syncretism.predictions.txt", preds, args)
    counts = syncretism_probe(preds, probe, Oracle(g, prefixing))
    text = "".join(f"{cat}\t{n}\n" for cat, n in counts.items())
    _write_text(out / "syncretism.probe.tsv", "category\tcount\n" + text, args)
    sys.stdout.write(text)


# -- argument parsing -------------------------------------------------------------------

def _default_seed() -> int:
    value = os.environ.get(SEED_ENV, "0")
    try:
        return int(value)
    except ValueError:
        raise UserError(f"{SEED_ENV} must be an integer, got {value!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help=f"random seed (default: ${SEED_ENV} or 0)")
    common.add_argument("--grammar", help="grammar YAML (default: the shipped Nen fragment)")
    common.add_argument("-v", "--verbose", action="store_true")

    splits = argparse.ArgumentParser(add_help=False)
    splits.add_argument("--mode", choices=("zipfian", "random"), default="zipfian")
    splits.add_argument("--sizes", help="override train sizes, e.g. LR=100,MR=1000,ALL=1931,HR=10000")
    splits.add_argument("--test-size", type=int, default=200)
    splits.add_argument("--dev-size", type=int, default=100)

    scoring = argparse.ArgumentParser(add_help=False)
    scoring.add_argument("--badgold", help="TSV of lemma/bundle pairs whose gold forms are known to be wrong")
    scoring.add_argument("--prefixing", help="file listing prefixing-class lemmas, one per line")

    p = argparse.ArgumentParser(prog="morphkit", description="Low-resource verbal inflection toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", parents=[common], help="generate a synthetic Zipfian corpus from a grammar")
    s.add_argument("--out", required=True)
    s.add_argument("--size", type=int, help="keep only the N top-ranked triples")
    s.add_argument("--ambifixing", type=int, default=120, help="number of ambifixing lexemes")
    s.add_argument("--middle", type=int, default=40, help="number of middle lexemes")
    s.add_argument("--prefixing-count", type=int, default=60, help="number of prefixing lexemes")
    s.add_argument("--prefixing-out", help="write the prefixing lemmas to this file")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("sample", parents=[common, splits], help="write LR/MR/ALL/HR train splits plus dev/test")
    s.add_argument("corpus")
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--no-redistribute", action="store_true", help="skip syncretic frequency redistribution")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("hallucinate", parents=[common], help="pad a corpus with stem-swapped triples")
    s.add_argument("corpus")
    s.add_argument("--total", type=int, required=True)
    s.add_argument("--min-stem", type=int, default=3)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_hallucinate)

    s = sub.add_parser("train", parents=[common], help="extract baseline rules")
    s.add_argument("train")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("predict", parents=[common], help="apply baseline rules to lemma/bundle inputs")
    s.add_argument("rules")
    s.add_argument("inputs")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_predict)

    s = sub.add_parser("evaluate", parents=[common, scoring], help="score predictions against gold")
    s.add_argument("gold")
    s.add_argument("predictions")
    s.add_argument("--train", help="training corpus, used to recognise remapped stems")
    s.add_argument("--no-oracle", action="store_true", help="heuristic labels only")
    s.add_argument("--format", choices=("table", "tsv"), default="table")
    s.add_argument("--out")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("paradigm", parents=[common], help="print a stem's paradigm as TSV")
    s.add_argument("stem")
    s.add_argument("--class", dest="verb_class", default="Ambifixing")
    s.set_defaults(func=cmd_paradigm)

    s = sub.add_parser("probe", parents=[common, scoring], help="categorise held-out-cell predictions")
    s.add_argument("gold")
    s.add_argument("predictions")
    s.add_argument("--out")
    s.set_defaults(func=cmd_probe)

    s = sub.add_parser("experiment", parents=[common, splits, scoring], help="run a full experiment")
    s.add_argument("experiment", choices=EXPERIMENTS)
    s.add_argument("--corpus", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--adapter", help="external system command template; see AdapterSpec")
    s.add_argument("--timeout", type=float, default=3600.0)
    s.add_argument("--set-size", type=int, default=386)
    s.add_argument("--within", choices=("random", "zipfian"), default="random")
    s.add_argument("--probe-size", type=int, default=100)
    s.set_defaults(func=cmd_experiment)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.seed is None:
            args.seed = _default_seed()
        args.func(args)
    except USER_ERRORS as e:
        print(f"morphkit: error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001
        log.exception("internal error")
        print(f"morphkit: internal error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
