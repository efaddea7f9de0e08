"""Command-line entry point: ``dialcorpus <stage> ...``."""

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import pipeline
from .config import PipelineConfig, load_config, with_match
from .errors import ConfigError, CorpusError
from .evaluation import agreement, load_gold
from .lm import adaptation_study, load_attribute_map
from .projection import compute_stats, emit_xml, format_stats_table, parse_xml

EXIT_OK, EXIT_INPUT, EXIT_CONFIG = 0, 1, 2


def _write(text, dest):
    data = text if isinstance(text, bytes) else text.encode("utf-8")
    if dest is None or dest == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        Path(dest).write_bytes(data)


def _base_config(args):
    cfg = load_config(args.config) if getattr(args, "config", None) else PipelineConfig()
    return with_match(cfg, getattr(args, "threshold", None), getattr(args, "window", None),
                      getattr(args, "weighting", None), getattr(args, "recover_after", None))


def _read(path):
    return Path(path).read_text(encoding="utf-8")


def cmd_parse_script(args):
    _write(pipeline.stage_parse_script(args.script, _base_config(args)), args.output)


def cmd_parse_subs(args):
    cfg = _base_config(args)
    name = Path(args.subtitle).name + (f"+{Path(args.target).name}" if args.target else "")
    tsv, malformed = pipeline.stage_parse_subs(
        args.subtitle, Path(args.target) if args.target else None, cfg, name)
    if malformed:
        print(f"warning: {malformed} malformed block(s) skipped", file=sys.stderr)
    _write(tsv, args.output)


def cmd_match(args):
    _write(pipeline.stage_match(_read(args.script), _read(args.lines), _base_config(args)), args.output)


def cmd_project(args):
    corpus = pipeline.stage_project(_read(args.script), _read(args.lines), _read(args.decisions))
    _write(emit_xml(corpus), args.output)


def _corpora(paths):
    return [parse_xml(Path(p).read_bytes()) for p in paths]


def cmd_stats(args):
    _write(format_stats_table(compute_stats(_corpora(args.corpus))), args.output)


def cmd_eval(args):
    auto = parse_xml(Path(args.auto).read_bytes()).lines()
    report = agreement(auto, load_gold(Path(args.gold).read_bytes()))
    _write(report.table() + "\n" + report.key_values(), args.output)


def cmd_lm_study(args):
    attrs = load_attribute_map(_read(args.attributes))
    report = adaptation_study(_corpora(args.corpus), attrs, args.order, args.k, args.holdout, args.seed)
    _write(report.table(), args.output)


def cmd_pipeline(args):
    cfg = _base_config(args)
    if args.out:
        cfg = replace(cfg, out=Path(args.out))
    if args.jobs is not None:
        cfg = replace(cfg, jobs=args.jobs)
    if args.seed is not None:
        cfg = replace(cfg, lm=replace(cfg.lm, seed=args.seed))
    status = pipeline.run_pipeline(cfg)
    if status:
        print(f"error: no pair could be processed; see {cfg.out / 'manifest.txt'}", file=sys.stderr)
    return status


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dialcorpus",
        description="Build a speaker-annotated parallel dialogue corpus from scripts and subtitles.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def stage(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("-o", "--output", help="output file (default: stdout)")
        return p

    def match_flags(p):
        p.add_argument("--threshold", type=float)
        p.add_argument("--window", type=int)
        p.add_argument("--weighting", choices=("tfidf", "boolean"))
        p.add_argument("--recover-after", type=int, dest="recover_after",
                       help="misses before a script-wide search (0 disables)")

    p = stage("parse-script", cmd_parse_script, "screenplay -> utterance TSV")
    p.add_argument("script")
    p.add_argument("--config")

    p = stage("parse-subs", cmd_parse_subs, "SRT/ASS -> parallel line TSV")
    p.add_argument("subtitle")
    p.add_argument("--target", help="separate target-language subtitle file")
    p.add_argument("--config")

    p = stage("match", cmd_match, "utterance TSV + line TSV -> decision TSV")
    p.add_argument("--script", required=True)
    p.add_argument("--lines", required=True)
    p.add_argument("--config")
    match_flags(p)

    p = stage("project", cmd_project, "project annotations and emit corpus XML")
    p.add_argument("--script", required=True)
    p.add_argument("--lines", required=True)
    p.add_argument("--decisions", required=True)

    p = stage("stats", cmd_stats, "corpus statistics table")
    p.add_argument("corpus", nargs="+")

    p = stage("eval", cmd_eval, "agreement against gold labels")
    p.add_argument("--auto", required=True)
    p.add_argument("--gold", required=True)

    p = stage("lm-study", cmd_lm_study, "speaker-group LM perplexity study")
    p.add_argument("corpus", nargs="+")
    p.add_argument("--attributes", required=True)
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--k", type=float, default=0.1)
    p.add_argument("--holdout", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("pipeline", help="run every stage for the pairs in a config file")
    p.set_defaults(func=cmd_pipeline)
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--jobs", type=int)
    p.add_argument("--seed", type=int)
    match_flags(p)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args) or EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CorpusError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
