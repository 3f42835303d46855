"""Command-line entry point: the pipeline as reproducible subcommands.

Stages read and write artifacts inside a workspace directory:

    harvest        corpus.jsonl
    dedup          corpus.jsonl, dedup_report.json
    label-serve    labels.jsonl (via /api/export), ballots.log.jsonl
    train          vocabulary.json, model.json
    evaluate       eval_report.json
    classify       predictions.json
    detect-source  source.json
    tag            tags.json
    report         report.json, figures/*.csv, figures/*.png

Exit status: 0 success, 1 validation/config error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analytics, featurize, figures, harvest, labelsvc, nbayes, srcdetect, taxonomy, textprep
from .config import ConfigError, RunConfig, build_config, parse_budgets
from .corpus import CorpusSnapshot, CorpusStore, StorageError, export_tier, find_exact_duplicates
from .featurize import DegenerateCorpus
from .records import TIERS, ValidationError


def _dump_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _require(path: Path, stage: str, hint: str) -> Path:
    if not path.exists():
        raise ConfigError(path.name, f"{stage} needs {path.name}; {hint}")
    return path


class Workspace:
    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        return self.root / name

    def store(self) -> CorpusStore:
        return CorpusStore(self.path("corpus.jsonl"), self.path("labels.jsonl"))


def _load_labeled_tokens(snapshot: CorpusSnapshot, cfg: RunConfig):
    """Tokenized (repo, class) pairs for the configured tier's labeled subset."""
    tier_names = {rec.full_name for rec in export_tier(snapshot, cfg.tier)}
    labeled = []
    for name in sorted(snapshot.labels):
        if name in tier_names:
            labeled.append(
                (textprep.prepare_repository(snapshot.records[name]), snapshot.labels[name])
            )
    if not labeled:
        raise ConfigError("labels.jsonl", f"no labeled repositories inside tier {cfg.tier}")
    return labeled


def cmd_harvest(cfg: RunConfig, args, ws: Workspace) -> int:
    keywords = harvest.load_keyword_tier(cfg.tier, args.keywords_dir)
    if args.live:
        transport = harvest.LiveTransport()
        limiter = harvest.SlidingWindowLimiter(harvest.policy_from_env())
        client = harvest.ArchiveClient(transport=transport, limiter=limiter)
    else:
        from .mockapi import SimulatedClock, make_demo_archive

        clock = SimulatedClock()
        limiter = harvest.SlidingWindowLimiter(harvest.policy_from_env(), clock=clock)
        client = harvest.ArchiveClient(
            transport=make_demo_archive(), limiter=limiter, clock=clock, sleeper=clock.sleep
        )
    store = ws.store()
    snapshot = store.load()
    stats = harvest.harvest_tier(client, snapshot, keywords, cfg.tier)
    store.save(snapshot)
    print(
        f"harvest[{cfg.tier}]: {stats['tasks']} tasks, {stats['discovered']} discovered, "
        f"{stats['fetched']} stored, {stats['gone']} gone, {stats['pathological']} dropped"
    )
    return 0


def cmd_dedup(cfg: RunConfig, args, ws: Workspace) -> int:
    _require(ws.path("corpus.jsonl"), "dedup", "run harvest first")
    store = ws.store()
    snapshot = store.load()
    groups = find_exact_duplicates(snapshot)
    dropped = []
    for group in groups:
        keep = min(group, key=lambda name: (snapshot.records[name].created_at, name))
        for name in group:
            if name != keep:
                del snapshot.records[name]
                snapshot.labels.pop(name, None)
                dropped.append(name)
    store.save(snapshot)
    _dump_json(ws.path("dedup_report.json"), {"groups": groups, "dropped": sorted(dropped)})
    print(f"dedup: {len(groups)} duplicate groups, {len(dropped)} records dropped")
    return 0


def cmd_label_serve(cfg: RunConfig, args, ws: Workspace) -> int:
    _require(ws.path("corpus.jsonl"), "label-serve", "run harvest first")
    seed = cfg.require_seed("label-serve")
    snapshot = ws.store().load()
    judges = [j.strip() for j in args.judges.split(",") if j.strip()]
    service = labelsvc.LabelService(
        snapshot.records,
        judges=judges,
        quorum=cfg.quorum,
        seed=seed,
        log_path=ws.path("ballots.log.jsonl"),
    )
    ui_dir = Path(args.ui_dir) if args.ui_dir else None
    server = labelsvc.make_server(
        service, host=args.host, port=args.port, ui_dir=ui_dir, export_path=ws.path("labels.jsonl")
    )
    host, port = server.server_address[:2]
    print(f"label service listening on http://{host}:{port}/ (judges: {', '.join(judges)})", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def cmd_train(cfg: RunConfig, args, ws: Workspace) -> int:
    _require(ws.path("corpus.jsonl"), "train", "run harvest first")
    _require(ws.path("labels.jsonl"), "train", "label repositories and export ground truth first")
    snapshot = ws.store().load()
    labeled = _load_labeled_tokens(snapshot, cfg)
    budgets = [featurize.FieldBudget(kind, k) for kind, k in cfg.budgets.items()]
    vocab = featurize.select_vocabulary(labeled, budgets, mode=cfg.mode)
    vocab.config_hash = cfg.train_hash()
    vocab.save(ws.path("vocabulary.json"))
    examples = [(featurize.vectorize(repo, vocab), label) for repo, label in labeled]
    model = nbayes.train(examples, alpha=cfg.alpha)
    model.vocabulary_sha = vocab.sha256()
    model.config_hash = cfg.train_hash()
    model.save(ws.path("model.json"))
    print(
        f"train[{cfg.tier}]: {len(examples)} examples, vocabulary width {vocab.width}, "
        f"alpha {cfg.alpha}"
    )
    return 0


def cmd_evaluate(cfg: RunConfig, args, ws: Workspace) -> int:
    _require(ws.path("corpus.jsonl"), "evaluate", "run harvest first")
    _require(ws.path("labels.jsonl"), "evaluate", "label repositories and export ground truth first")
    seed = cfg.require_seed("evaluate")
    snapshot = ws.store().load()
    labeled = _load_labeled_tokens(snapshot, cfg)
    budgets = [featurize.FieldBudget(kind, k) for kind, k in cfg.budgets.items()]
    vocab = featurize.select_vocabulary(labeled, budgets, mode=cfg.mode)
    examples = [(featurize.vectorize(repo, vocab), label) for repo, label in labeled]
    report = nbayes.cross_validate(examples, folds=cfg.folds, alpha=cfg.alpha, seed=seed)
    _dump_json(
        ws.path("eval_report.json"),
        {
            "config_hash": cfg.train_hash(),
            "tier": cfg.tier,
            "folds": cfg.folds,
            "seed": seed,
            "report": report.to_dict(),
        },
    )
    for cls in featurize.CLASSES:
        m = report.per_class[cls]
        print(f"evaluate[{cls}]: precision {m.precision:.3f} recall {m.recall:.3f} f1 {m.f1:.3f}")
    print(f"evaluate: accuracy {report.accuracy:.3f} over {report.n} examples ({cfg.folds} folds)")
    return 0


def cmd_classify(cfg: RunConfig, args, ws: Workspace) -> int:
    _require(ws.path("corpus.jsonl"), "classify", "run harvest first")
    vocab_path = _require(ws.path("vocabulary.json"), "classify", "run train first")
    model_path = _require(ws.path("model.json"), "classify", "run train first")
    vocab = featurize.Vocabulary.load(vocab_path)
    model = nbayes.NaiveBayesModel.load(model_path, expected_vocabulary_sha=vocab.sha256())
    snapshot = ws.store().load()
    results = []
    malware = []
    for rec in export_tier(snapshot, cfg.tier):
        vector = featurize.vectorize(textprep.prepare_repository(rec), vocab)
        label, posterior = nbayes.predict(model, vector)
        results.append({"full_name": rec.full_name, "label": label, "log_posterior": posterior})
        if label == featurize.MALWARE:
            malware.append(rec.full_name)
    _dump_json(
        ws.path("predictions.json"),
        {
            "config_hash": model.config_hash,
            "tier": cfg.tier,
            "malware": malware,
            "results": results,
        },
    )
    print(f"classify[{cfg.tier}]: {len(malware)} of {len(results)} repositories classified malware")
    return 0


def cmd_detect_source(cfg: RunConfig, args, ws: Workspace) -> int:
    _require(ws.path("corpus.jsonl"), "detect-source", "run harvest first")
    pred_path = _require(ws.path("predictions.json"), "detect-source", "run classify first")
    predictions = json.loads(pred_path.read_text())
    if args.detect_config:
        det_cfg = srcdetect.load_config(Path(args.detect_config))
    else:
        det_cfg = srcdetect.SourceDetectConfig(threshold=cfg.threshold)
    snapshot = ws.store().load()
    results = []
    with_source = []
    for name in predictions["malware"]:
        rec = snapshot.records.get(name)
        if rec is None:
            continue
        verdict = srcdetect.detect(rec.file_paths, det_cfg)
        results.append(
            {
                "full_name": name,
                "is_source": verdict.is_source,
                "source_ratio": verdict.source_ratio,
                "source_file_count": verdict.source_file_count,
                "total_file_count": verdict.total_file_count,
            }
        )
        if verdict.is_source:
            with_source.append(name)
    _dump_json(
        ws.path("source.json"),
        {
            "config_hash": predictions["config_hash"],
            "threshold": det_cfg.threshold,
            "malware_with_source": with_source,
            "results": results,
        },
    )
    print(f"detect-source: {len(with_source)} of {len(results)} malware repositories contain source")
    return 0


def cmd_tag(cfg: RunConfig, args, ws: Workspace) -> int:
    _require(ws.path("corpus.jsonl"), "tag", "run harvest first")
    snapshot = ws.store().load()
    if args.scope == "all":
        names = sorted(snapshot.records)
        config_hash = ""
    elif args.scope == "malware":
        payload = json.loads(_require(ws.path("predictions.json"), "tag", "run classify first").read_text())
        names, config_hash = payload["malware"], payload["config_hash"]
    else:
        payload = json.loads(_require(ws.path("source.json"), "tag", "run detect-source first").read_text())
        names, config_hash = payload["malware_with_source"], payload["config_hash"]
    lexicon = taxonomy.load_lexicon(Path(args.lexicon) if args.lexicon else None)
    assignments = []
    for name in names:
        rec = snapshot.records.get(name)
        if rec is None:
            continue
        tags = taxonomy.tag_repository(textprep.prepare_repository(rec), lexicon)
        assignments.append(
            {"full_name": name, "types": sorted(tags.types), "platforms": sorted(tags.platforms)}
        )
    _dump_json(
        ws.path("tags.json"),
        {"config_hash": config_hash, "scope": args.scope, "assignments": assignments},
    )
    tagged = sum(1 for a in assignments if a["types"] or a["platforms"])
    print(f"tag[{args.scope}]: {tagged} of {len(assignments)} repositories tagged")
    return 0


def cmd_report(cfg: RunConfig, args, ws: Workspace) -> int:
    _require(ws.path("corpus.jsonl"), "report", "run harvest first")
    predictions = json.loads(_require(ws.path("predictions.json"), "report", "run classify first").read_text())
    source = json.loads(_require(ws.path("source.json"), "report", "run detect-source first").read_text())
    tags_payload = json.loads(_require(ws.path("tags.json"), "report", "run tag first").read_text())
    hashes = {predictions["config_hash"], source["config_hash"]}
    if tags_payload["config_hash"]:
        hashes.add(tags_payload["config_hash"])
    if len(hashes) > 1:
        raise ConfigError(
            "config_hash", "predictions/source/tags were produced under different configs; re-run the pipeline"
        )
    snapshot = ws.store().load()
    assignments = [
        taxonomy.TagAssignment(a["full_name"], set(a["types"]), set(a["platforms"]))
        for a in tags_payload["assignments"]
    ]
    lexicon = taxonomy.load_lexicon()
    matrix = taxonomy.build_matrix(assignments, lexicon)
    report = analytics.build_report(
        snapshot.records,
        malware_names=set(predictions["malware"]),
        source_names=set(source["malware_with_source"]),
        assignments=assignments,
        matrix=matrix,
    )
    report["config_hash"] = predictions["config_hash"]
    _dump_json(ws.path("report.json"), report)
    written = figures.write_figures(report, ws.path("figures"))
    print(f"report: report.json plus {len(written)} figure files under figures/")
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--workspace", default=".", help="directory holding all artifacts")
    parser.add_argument("--config", default=None, help="JSON config file; flags override it")
    parser.add_argument("--tier", choices=TIERS, default=None, help="keyword tier (default Q137)")
    parser.add_argument("--mode", choices=featurize.WEIGHTING_MODES, default=None,
                        help="feature weighting (default count)")
    parser.add_argument("--alpha", type=float, default=None, help="Laplace smoothing (default 1.0)")
    parser.add_argument("--folds", type=int, default=None, help="cross-validation folds (default 10)")
    parser.add_argument("--seed", type=int, default=None, help="seed for stochastic stages")
    parser.add_argument("--threshold", type=float, default=None,
                        help="source-ratio threshold (default 0.75)")
    parser.add_argument("--quorum", type=int, default=None, help="judge quorum (default 3)")
    parser.add_argument("--budgets", type=str, default=None,
                        help='per-field word budgets, e.g. "title=30,description=400"')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="repominer",
                                     description="mine a public code archive for malware source-code repositories")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("harvest", help="query the archive and store repository records")
    p.add_argument("--live", action="store_true", help="use the live archive API (default: built-in mock)")
    p.add_argument("--keywords-dir", default=None, help="directory with q1.txt/q50.txt/q137.txt")
    _add_common(p)
    p.set_defaults(func=cmd_harvest)

    p = sub.add_parser("dedup", help="drop exact-duplicate repositories")
    _add_common(p)
    p.set_defaults(func=cmd_dedup)

    p = sub.add_parser("label-serve", help="serve the judge labeling API and UI")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8130)
    p.add_argument("--judges", default="judge1,judge2,judge3", help="comma-separated judge ids")
    p.add_argument("--ui-dir", default=None, help="static directory with the labeling UI build")
    _add_common(p)
    p.set_defaults(func=cmd_label_serve)

    p = sub.add_parser("train", help="select vocabulary and fit the classifier")
    _add_common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="stratified cross-validation on the labeled set")
    _add_common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("classify", help="apply the trained model to the corpus")
    _add_common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("detect-source", help="flag malware repositories that contain source code")
    p.add_argument("--detect-config", default=None, help="key=value file overriding threshold/extensions")
    _add_common(p)
    p.set_defaults(func=cmd_detect_source)

    p = sub.add_parser("tag", help="assign malware types and target platforms")
    p.add_argument("--scope", choices=("source", "malware", "all"), default="source")
    p.add_argument("--lexicon", default=None, help="taxonomy JSON overriding the shipped lexicon")
    _add_common(p)
    p.set_defaults(func=cmd_tag)

    p = sub.add_parser("report", help="ecosystem statistics, figures and plot data")
    _add_common(p)
    p.set_defaults(func=cmd_report)
    return parser


_CONFIG_KEYS = ("tier", "mode", "alpha", "folds", "seed", "threshold", "quorum")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    stage = args.command
    try:
        overrides = {key: getattr(args, key) for key in _CONFIG_KEYS}
        if args.budgets:
            overrides["budgets"] = parse_budgets(args.budgets)
        cfg = build_config(Path(args.config) if args.config else None, overrides)
        ws = Workspace(Path(args.workspace))
        return args.func(cfg, args, ws)
    except (ConfigError, ValidationError, StorageError, DegenerateCorpus, nbayes.TooFewExamples,
            nbayes.VocabularyMismatch) as exc:
        print(f"{stage}: {exc}", file=sys.stderr)
        return 1
    except harvest.AuthError as exc:
        print(f"{stage}: authentication rejected: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001  - runtime failures exit 2 by contract
        print(f"{stage}: unexpected error: {exc.__class__.__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
