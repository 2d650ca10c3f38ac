"""Command-line entry point: preprocess / train / generate / evaluate.

Exit codes: 0 success, 2 I/O or input format problem, 3 empty result,
4 incompatible checkpoints, 5 numeric fault during training.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from pathlib import Path

import numpy as np

from . import encoding, evaluate, generate, preprocess
from .errors import (
    ConfigError,
    EmptyInputError,
    IncompatibleCheckpointError,
    LeadSheetError,
    NumericFaultError,
)
from .midi import export_midi_file
from .models import VARIANTS, load_model
from .musicxml import export_musicxml_file, parse_musicxml_file
from .train import TrainConfig, load_config_file, train

EXIT_OK = 0
EXIT_IO = 2
EXIT_EMPTY = 3
EXIT_INCOMPATIBLE = 4
EXIT_NUMERIC = 5


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leadsheetgen",
        description="Two-stage recurrent lead sheet generation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="clean MusicXML files into an encoded corpus")
    p.add_argument("--input", required=True, help="directory of .xml/.musicxml files")
    p.add_argument("--output", required=True, help="encoded corpus file to write")
    p.add_argument("--report", help="per-sheet report path (default: <output>.report.txt)")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("train", help="train one model variant on an encoded corpus")
    p.add_argument("--variant", required=True, choices=sorted(VARIANTS))
    p.add_argument("--input", required=True, help="encoded corpus file")
    p.add_argument("--config", required=True, help="key=value training config file")
    p.add_argument("--output", required=True, help="output directory for checkpoints/metrics")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--deterministic", action="store_true", help="force deterministic mode")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("generate", help="sample a lead sheet from trained checkpoints")
    p.add_argument("--stage1", help="stage-one checkpoint (template model)")
    p.add_argument("--stage2", required=True, help="stage-two checkpoint (melody model)")
    p.add_argument("--output", required=True, help="output path prefix")
    p.add_argument("--config", help="key=value sampling config file")
    p.add_argument("--template", help="MusicXML file whose chords/rhythms to reuse")
    p.add_argument("--seed", type=int, help="sampling seed")
    p.add_argument("--bars", type=int, help="bars to generate")
    p.add_argument("--tau-melody", type=float, dest="tau_melody")
    p.add_argument("--tau-chord", type=float, dest="tau_chord")
    p.add_argument("--tau-rhythm", type=float, dest="tau_rhythm")
    p.add_argument("--deterministic", action="store_true")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("evaluate", help="standardize ratings and report group scores")
    p.add_argument("--input", required=True, help="ratings file: user,clip,question,rating")
    p.add_argument("--groups", required=True, help="groups file: clip,label")
    p.add_argument("--output", required=True, help="report path")
    p.set_defaults(func=cmd_eval)
    return parser


def cmd_preprocess(args) -> int:
    input_dir = Path(args.input)
    if not input_dir.is_dir():
        print(f"error: {input_dir} is not a readable directory", file=sys.stderr)
        return EXIT_IO
    paths = sorted(
        p for p in input_dir.iterdir() if p.suffix.lower() in (".xml", ".musicxml")
    )
    sheets, reports = preprocess.preprocess_corpus(paths)
    report_path = args.report or f"{args.output}.report.txt"
    preprocess.write_report(reports, report_path)
    if not sheets:
        print("error: no sheets survived preprocessing", file=sys.stderr)
        return EXIT_EMPTY
    encoding.save_corpus([encoding.encode(sheet) for sheet in sheets], args.output)
    kept = sum(1 for r in reports if r.kept)
    print(f"kept {kept}/{len(reports)} sheets -> {args.output}")
    return EXIT_OK


def cmd_train(args) -> int:
    config = load_config_file(args.config, TrainConfig, required=("max_steps",))
    if args.seed is not None:
        config.seed = args.seed
    if args.deterministic:
        config.deterministic = True
    corpus = encoding.load_corpus(args.input)
    result = train(args.variant, corpus, config, args.output)
    summary = " ".join(f"{k}={v:.4f}" for k, v in result.final_metrics.items())
    print(f"trained {args.variant} for {result.steps} steps {summary}".rstrip())
    print(f"final checkpoint: {result.final_checkpoint}")
    return EXIT_OK


def _sample_config(args) -> generate.SampleConfig:
    if args.config:
        config = load_config_file(args.config, generate.SampleConfig, required=())
    else:
        config = generate.SampleConfig()
    overrides = {
        "seed": args.seed,
        "target_bars": args.bars,
        "tau_melody": args.tau_melody,
        "tau_chord": args.tau_chord,
        "tau_rhythm": args.tau_rhythm,
    }
    for name, value in overrides.items():
        if value is not None:
            setattr(config, name, value)
    return config.validate()


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def cmd_generate(args) -> int:
    config = _sample_config(args)
    rng = np.random.default_rng(config.seed)
    stage_two = load_model(args.stage2)
    metadata = {
        "seed": config.seed,
        "tau_melody": config.tau_melody,
        "tau_chord": config.tau_chord,
        "tau_rhythm": config.tau_rhythm,
        "target_bars": config.target_bars,
        "stage2_checkpoint_sha256": _sha256(args.stage2),
    }

    if args.template:
        source = preprocess.preprocess_score(parse_musicxml_file(args.template))
        sheet = generate.condition_on_existing(stage_two, source, config, rng=rng)
        metadata["template_source"] = args.template
        metadata["truncated"] = False
    else:
        if not args.stage1:
            print("error: --stage1 is required unless --template is given", file=sys.stderr)
            return EXIT_IO
        stage_one = load_model(args.stage1)
        metadata["stage1_checkpoint_sha256"] = _sha256(args.stage1)
        result = generate.generate_lead_sheet(stage_one, stage_two, config, rng=rng)
        sheet = result.sheet
        metadata["truncated"] = result.truncated

    prefix = Path(args.output)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    export_musicxml_file(sheet, prefix.with_suffix(".musicxml"))
    export_midi_file(sheet, prefix.with_suffix(".mid"))
    generate.write_metadata(prefix.with_suffix(".meta"), metadata)
    print(f"wrote {prefix.with_suffix('.musicxml')} / .mid / .meta")
    return EXIT_OK


def cmd_eval(args) -> int:
    tables = evaluate.read_ratings(args.input)
    groups = evaluate.read_groups(args.groups)
    per_question = {}
    for question, table in sorted(tables.items()):
        for user in evaluate.constant_raters(table):
            print(
                f"warning: user {user!r} rated every clip identically; "
                f"excluded from {question}",
                file=sys.stderr,
            )
        scores = evaluate.z_score(table)
        if not scores:
            print(f"error: no standardizable ratings for {question}", file=sys.stderr)
            return EXIT_EMPTY
        per_question[question] = evaluate.aggregate(scores, groups)
    evaluate.write_group_report(args.output, per_question)
    print(f"wrote {args.output}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FileNotFoundError, PermissionError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumericFaultError as exc:
        print(f"error: numeric fault: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except IncompatibleCheckpointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCOMPATIBLE
    except EmptyInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except (ConfigError, LeadSheetError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
