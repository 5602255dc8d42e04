"""Command-line interface.

Subcommands: synth, campaigns, hmps, features, train, eval, pipeline.
Exit codes: 0 on success, 1 on usage errors, 2 on data errors. Every command
that writes artifacts also writes the resolved configuration (defaults
included) into the output directory as run_config.json.

A ``--config FILE`` may hold ``key = value`` lines (keys are the long option
names with dashes replaced by underscores); explicit flags override the file.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import asdict, fields, replace
from pathlib import Path

from .campaigns import ClusteringParams
from .corpus import Corpus, CorpusError, load_corpus
from .evaluation import ablation_suite, setting1_loo, setting2_holdout
from .occ import TrainConfig
from .pipeline import (
    RunConfig,
    detect,
    feature_vectors,
    prepare,
    write_campaigns,
    write_features,
    write_feedback_log,
    write_predictions,
    write_scores,
)
from .synth import SynthConfig, generate

__all__ = ["main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit 1 on usage errors, not 2
        raise _UsageError(message)


def _add_corpus_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tweets", required=True, help="tweets.jsonl path")
    parser.add_argument("--users", required=True, help="users.jsonl path")
    parser.add_argument("--edges", default=None, help="edges.csv path (optional)")


def _add_clustering_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--top-unigrams", type=int, default=30,
                        help="signature size per phone document")
    parser.add_argument("--min-common", type=int, default=5,
                        help="minimum shared signature unigrams per kept tweet")
    parser.add_argument("--jaccard-threshold", type=float, default=0.7,
                        help="strict merge threshold on signature Jaccard")


def _add_detect_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mode", choices=("hmps", "hmps+osn2"), default="hmps+osn2")
    parser.add_argument("--no-feedback", action="store_true",
                        help="single pass without cross-campaign transfers")
    parser.add_argument("--smote-ratio", type=float, default=None,
                        help="oversample training sets by this ratio")
    parser.add_argument("--max-levels", type=int, default=None)
    parser.add_argument("--grid-search", action="store_true",
                        help="cross-validated (nu, gamma) search instead of "
                             "the first grid entry")
    parser.add_argument("--nu", type=float, default=None,
                        help="pin nu (replaces the search grid)")
    parser.add_argument("--gamma", type=float, default=None,
                        help="pin gamma (replaces the search grid)")
    parser.add_argument("--kernel", choices=("rbf", "linear"), default="rbf")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--config", default=None, help="key = value defaults file")
    parser.add_argument("--verbose", action="store_true")


def build_parser() -> _Parser:
    parser = _Parser(prog="phonespam", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_synth = sub.add_parser("synth", help="generate a labeled synthetic corpus")
    _add_common(p_synth)
    for f in fields(SynthConfig):
        if f.name == "seed":
            continue
        flag = "--" + f.name.replace("_", "-")
        p_synth.add_argument(flag, type=type(f.default), default=f.default)

    p_campaigns = sub.add_parser("campaigns", help="cluster phone documents into campaigns")
    _add_corpus_args(p_campaigns)
    _add_clustering_args(p_campaigns)
    _add_common(p_campaigns)

    p_hmps = sub.add_parser("hmps", help="hierarchical meta-path scores per campaign user")
    _add_corpus_args(p_hmps)
    _add_clustering_args(p_hmps)
    _add_common(p_hmps)

    p_features = sub.add_parser("features", help="assemble per-user feature vectors")
    _add_corpus_args(p_features)
    _add_clustering_args(p_features)
    _add_common(p_features)
    p_features.add_argument("--mode", choices=("hmps", "hmps+osn2"), default="hmps+osn2")

    p_train = sub.add_parser("train", help="train classifiers and emit predictions")
    _add_corpus_args(p_train)
    _add_clustering_args(p_train)
    _add_detect_args(p_train)
    _add_common(p_train)

    p_eval = sub.add_parser("eval", help="run an evaluation protocol")
    p_eval.add_argument("setting", choices=("setting1", "setting2", "ablation"))
    _add_corpus_args(p_eval)
    _add_clustering_args(p_eval)
    _add_detect_args(p_eval)
    _add_common(p_eval)
    p_eval.add_argument("--holdout-frac", type=float, default=0.2)
    p_eval.add_argument("--repeats", type=int, default=20)

    p_pipe = sub.add_parser("pipeline", help="corpus to predictions end to end")
    _add_corpus_args(p_pipe)
    _add_clustering_args(p_pipe)
    _add_detect_args(p_pipe)
    _add_common(p_pipe)
    return parser


def _apply_config_file(argv: list[str], parser: _Parser) -> list[str]:
    """Load ``--config FILE`` defaults before the real parse."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise _UsageError("--config needs a file argument")
    path = Path(argv[idx + 1])
    if not path.is_file():
        raise CorpusError(f"missing config file: {path}")
    overrides: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise _UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        overrides[key.replace("-", "_")] = value
    extra: list[str] = []
    for key, value in overrides.items():
        flag = "--" + key.replace("_", "-")
        if flag in argv:
            continue  # explicit flags win
        if value.lower() in ("true", "false"):
            if value.lower() == "true":
                extra.append(flag)
        else:
            extra.extend([flag, value])
    # insert after the subcommand so subparser flags resolve
    return argv + extra


def _run_config(args: argparse.Namespace) -> RunConfig:
    clustering = ClusteringParams(
        top_k=args.top_unigrams,
        min_common=args.min_common,
        jaccard_threshold=args.jaccard_threshold,
    )
    train = TrainConfig(kernel=getattr(args, "kernel", "rbf"))
    if getattr(args, "nu", None) is not None:
        train = replace(train, nu_grid=(args.nu,))
    if getattr(args, "gamma", None) is not None:
        train = replace(train, gamma_grid=(args.gamma,))
    return RunConfig(
        clustering=clustering,
        train=train,
        mode=getattr(args, "mode", "hmps+osn2"),
        feedback=not getattr(args, "no_feedback", False),
        smote_ratio=getattr(args, "smote_ratio", None),
        max_levels=getattr(args, "max_levels", None),
        use_grid_search=getattr(args, "grid_search", False),
        workers=args.workers,
        seed=args.seed,
    )


def _load(args: argparse.Namespace) -> Corpus:
    return load_corpus(args.tweets, args.users, args.edges)


def _write_resolved(args: argparse.Namespace, out: Path) -> None:
    resolved = {
        key: (str(value) if isinstance(value, Path) else value)
        for key, value in sorted(vars(args).items())
    }
    out.mkdir(parents=True, exist_ok=True)
    (out / "run_config.json").write_text(
        json.dumps(resolved, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _write_metrics(report, out: Path) -> None:
    (out / "metrics.json").write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _cmd_synth(args: argparse.Namespace) -> int:
    kwargs = {
        f.name: getattr(args, f.name) for f in fields(SynthConfig) if f.name != "seed"
    }
    config = SynthConfig(seed=args.seed, **kwargs)
    out = Path(args.out)
    _write_resolved(args, out)
    paths = generate(config, out)
    for name, path in paths.items():
        print(f"{name}: {path}")
    return 0


def _cmd_campaigns(args: argparse.Namespace) -> int:
    corpus = _load(args)
    config = _run_config(args)
    out = Path(args.out)
    _write_resolved(args, out)
    prepared = prepare(corpus, replace(config, mode="hmps"))
    write_campaigns(prepared.campaigns, out / "campaigns.jsonl")
    print(
        f"{len(prepared.docs)} phone documents -> {len(prepared.campaigns)} campaigns "
        f"({len(prepared.kept)} with known spammers)"
    )
    return 0


def _cmd_hmps(args: argparse.Namespace) -> int:
    corpus = _load(args)
    config = _run_config(args)
    out = Path(args.out)
    _write_resolved(args, out)
    prepared = prepare(corpus, replace(config, mode="hmps"))
    write_scores(prepared.hmps_scores, out / "scores.csv")
    print(f"scored {sum(len(s) for s in prepared.hmps_scores.values())} campaign users")
    return 0


def _cmd_features(args: argparse.Namespace) -> int:
    corpus = _load(args)
    config = _run_config(args)
    out = Path(args.out)
    _write_resolved(args, out)
    prepared = prepare(corpus, config)
    write_features(feature_vectors(prepared), config.mode, out / "features.csv")
    print(f"assembled features for {len(prepared.kept)} campaigns")
    return 0


def _cmd_train(args: argparse.Namespace) -> int:
    corpus = _load(args)
    config = _run_config(args)
    out = Path(args.out)
    _write_resolved(args, out)
    prepared = prepare(corpus, config)
    state, predictions = detect(prepared, config)
    write_predictions(predictions, out / "predictions.csv")
    write_feedback_log(state, out / "feedback_log.jsonl")
    models = {
        str(cid): st.model.to_dict()
        for cid, st in sorted(state.campaigns.items())
        if st.model is not None
    }
    (out / "models.json").write_text(
        json.dumps(models, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    n_spam = sum(
        1 for p in predictions if p.campaign_id is not None and p.label == "spammer"
    )
    print(
        f"levels: {state.level}, converged: {state.converged}, "
        f"transfers: {len(state.log)}, spammer rows: {n_spam}"
    )
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    corpus = _load(args)
    config = _run_config(args)
    out = Path(args.out)
    _write_resolved(args, out)
    if args.setting == "setting1":
        report = setting1_loo(corpus, config)
        _write_metrics(report, out)
        print(f"setting1 LOO accuracy: {report.accuracy:.4f}")
    elif args.setting == "setting2":
        report = setting2_holdout(
            corpus, config, holdout_frac=args.holdout_frac, repeats=args.repeats
        )
        _write_metrics(report, out)
        print(
            f"setting2 precision {report.precision:.4f} recall {report.recall:.4f} "
            f"f1 {report.f1:.4f} auc {report.auc if report.auc is None else round(report.auc, 4)}"
        )
    else:
        rows = ablation_suite(corpus, config)
        path = out / "ablation.csv"
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["config", "precision", "recall", "f1", "auc", "accuracy"])
            for name, report in rows:
                writer.writerow(
                    [
                        name,
                        *(
                            "" if v is None else repr(round(v, 6))
                            for v in (
                                report.precision,
                                report.recall,
                                report.f1,
                                report.auc,
                                report.accuracy,
                            )
                        ),
                    ]
                )
        for name, report in rows:
            print(f"{name}: f1={report.f1:.4f} precision={report.precision:.4f} "
                  f"recall={report.recall:.4f}")
    return 0


def _cmd_pipeline(args: argparse.Namespace) -> int:
    corpus = _load(args)
    config = _run_config(args)
    out = Path(args.out)
    _write_resolved(args, out)
    prepared = prepare(corpus, config)
    state, predictions = detect(prepared, config)
    artifacts = {
        "campaigns": "campaigns.jsonl",
        "scores": "scores.csv",
        "features": "features.csv",
        "predictions": "predictions.csv",
        "feedback_log": "feedback_log.jsonl",
        "run_config": "run_config.json",
    }
    write_campaigns(prepared.campaigns, out / artifacts["campaigns"])
    write_scores(prepared.hmps_scores, out / artifacts["scores"])
    write_features(feature_vectors(prepared), config.mode, out / artifacts["features"])
    write_predictions(predictions, out / artifacts["predictions"])
    write_feedback_log(state, out / artifacts["feedback_log"])
    (out / "manifest.json").write_text(
        json.dumps({"artifacts": artifacts}, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    print(
        f"{len(prepared.campaigns)} campaigns, {len(prepared.kept)} classified, "
        f"levels: {state.level}, converged: {state.converged}"
    )
    return 0


_COMMANDS = {
    "synth": _cmd_synth,
    "campaigns": _cmd_campaigns,
    "hmps": _cmd_hmps,
    "features": _cmd_features,
    "train": _cmd_train,
    "eval": _cmd_eval,
    "pipeline": _cmd_pipeline,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config_file(argv, parser)
        args = parser.parse_args(argv)
        logging.basicConfig(
            level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
        )
        return _COMMANDS[args.command](args)
    except (CorpusError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (_UsageError, ValueError) as exc:
        # invalid parameter values behave like usage errors
        print(f"usage error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
