"""Command-line interface.

Commands: synth-corpus, extract, train, grid-search, evaluate, classify,
listen. Every command takes --out for its artifacts and writes a
run_metadata.json echoing the configuration, the seed and timings.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .corpus import (
    AudioSegment,
    Label,
    VadConfig,
    frame_stream,
    load_segments,
    load_wav,
    split_corpus,
    vad_segments,
)
from .errors import ConfigError, DataError, DetectorError, NumericalError
from .evaluate import (
    CvReport,
    EvalReport,
    frame_metrics,
    roc_auc,
    segment_metrics,
    speaker_frames,
)
from .featset import FeatureKind, FeatureSetConfig, extract, feature_matrix
from .learn import (
    DEFAULT_SVM_PARAMS,
    ModelBundle,
    SvmHyperParams,
    grid_search,
    load_model,
    save_model,
    save_model_json,
    train_svm,
)
from .learn.cv_core import SpeakerFrames, balance_classes, fit_transform_chain, run_louo_folds
from .pipeline import OnlineClassifier, decision_from_scores, segment_score, trigger_time_ms
from .synth import SynthConfig, generate_corpus

PCA_EPSILON = 0.95


@dataclass
class RunContext:
    out_dir: Path
    started: float
    args: dict

    def finish(self, extra: dict | None = None) -> None:
        meta = {
            "version": __version__,
            "command": self.args.get("command"),
            "config": {k: v for k, v in self.args.items() if k != "command"},
            "duration_s": round(time.perf_counter() - self.started, 3),
        }
        if extra:
            meta.update(extra)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        (self.out_dir / "run_metadata.json").write_text(json.dumps(meta, indent=2, default=str))


def _context(args: argparse.Namespace) -> RunContext:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    return RunContext(out_dir=out_dir, started=time.perf_counter(), args=vars(args).copy())


def _feature_kinds(spec_str: str) -> list[FeatureKind]:
    if spec_str.strip().lower() == "all":
        return list(FeatureKind)
    kinds = []
    for part in spec_str.split(","):
        part = part.strip().lower()
        try:
            kinds.append(FeatureKind(part))
        except ValueError:
            valid = ", ".join(k.value for k in FeatureKind)
            raise ConfigError(f"unknown feature set {part!r}; expected one of: {valid}, all")
    return kinds


def _single_kind(spec_str: str) -> FeatureKind:
    kinds = _feature_kinds(spec_str)
    if len(kinds) != 1:
        raise ConfigError("this command takes exactly one feature set")
    return kinds[0]


def _explicit_params(args: argparse.Namespace) -> SvmHyperParams | None:
    given = [args.svm_c, args.svm_eps, args.svm_gamma]
    if all(v is None for v in given):
        return None
    if any(v is None for v in given):
        raise ConfigError("--svm-c, --svm-eps and --svm-gamma must be given together")
    try:
        return SvmHyperParams(C=args.svm_c, eps=args.svm_eps, gamma=args.svm_gamma)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _train_bundle(
    speakers: list[SpeakerFrames],
    kind: FeatureKind,
    params: SvmHyperParams,
    seed: int,
    pca_epsilon: float,
    normalize: bool = True,
) -> ModelBundle:
    config = FeatureSetConfig(kind)
    if not speakers:
        raise DataError("no usable training data (no speaker with confirmations)")
    x = np.concatenate([s.vectors for s in speakers])
    y = np.concatenate([s.labels for s in speakers])
    bal_x, bal_y = balance_classes(x, y, seed)
    normalizer, pca, projected = fit_transform_chain(bal_x, config.uses_pca, pca_epsilon,
                                                     normalize=normalize)
    svm = train_svm(projected, bal_y, params)
    return ModelBundle(
        feature_config=config,
        hyperparams=params,
        normalizer=normalizer,
        pca=pca,
        svm=svm,
    )


def _segment_features(segments, config):
    """(segment, matrix, frame_indices) for every segment long enough to score."""
    out = []
    for seg in segments:
        frames = frame_stream(seg)
        vectors = extract(frames, config)
        indices = np.array([v.frame_index for v in vectors])
        out.append((seg, feature_matrix(vectors), indices))
    return out


# --- commands -----------------------------------------------------------------


def cmd_synth_corpus(args: argparse.Namespace) -> int:
    ctx = _context(args)
    config = SynthConfig(
        speakers=args.speakers,
        segments_per_speaker=args.segments_per_speaker,
        confirmation_rate=args.confirmation_rate,
        seed=args.seed,
    )
    manifest = generate_corpus(ctx.out_dir, config)
    print(f"wrote {manifest}")
    ctx.finish({"manifest": str(manifest)})
    return 0


def cmd_extract(args: argparse.Namespace) -> int:
    ctx = _context(args)
    kind = _single_kind(args.features)
    config = FeatureSetConfig(kind)
    segments = load_segments(args.manifest)
    feature_dir = ctx.out_dir / "features"
    feature_dir.mkdir(parents=True, exist_ok=True)
    index = []
    for seg, matrix, frame_indices in _segment_features(segments, config):
        name = f"{seg.segment_id}.csv"
        with (feature_dir / name).open("w") as fh:
            fh.write(",".join(f"f{i}" for i in range(matrix.shape[1])) + "\n")
            for row in matrix:
                fh.write(",".join(f"{v:.12g}" for v in row) + "\n")
        index.append({
            "segment_id": seg.segment_id,
            "file": f"features/{name}",
            "speaker_id": seg.speaker_id,
            "label": seg.label.value if seg.label else None,
            "rows": int(matrix.shape[0]),
            "first_frame_index": int(frame_indices[0]),
        })
    sidecar = {"config": config.to_dict(), "segments": index}
    (ctx.out_dir / "features.json").write_text(json.dumps(sidecar, indent=2))
    print(f"extracted {len(index)} segments -> {feature_dir}")
    ctx.finish({"segments": len(index)})
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    ctx = _context(args)
    kind = _single_kind(args.features)
    config = FeatureSetConfig(kind)
    speakers = speaker_frames(load_segments(args.manifest), config)
    params = _explicit_params(args)
    searched = None
    if params is None and args.grid_search:
        result = grid_search(
            speakers, use_pca=config.uses_pca,
            pca_epsilon=args.pca_epsilon, seed=args.seed,
        )
        params = result.best
        searched = result
    if params is None:
        params = DEFAULT_SVM_PARAMS[kind]
    bundle = _train_bundle(speakers, kind, params, args.seed, args.pca_epsilon,
                           normalize=not args.no_normalize)
    model_path = ctx.out_dir / args.model_name
    save_model(bundle, model_path)
    save_model_json(bundle, model_path.with_suffix(model_path.suffix + ".json"))
    print(f"trained {kind.value} (C={params.C}, eps={params.eps}, gamma={params.gamma}) "
          f"with {bundle.svm.alphas_signed.size} support vectors -> {model_path}")
    ctx.finish({
        "model": str(model_path),
        "params": params.to_dict(),
        "grid_searched": searched is not None,
    })
    return 0


def cmd_grid_search(args: argparse.Namespace) -> int:
    ctx = _context(args)
    kind = _single_kind(args.features)
    config = FeatureSetConfig(kind)
    segments = load_segments(args.manifest)
    speakers = speaker_frames(segments, config)
    result = grid_search(
        speakers, use_pca=config.uses_pca, pca_epsilon=args.pca_epsilon, seed=args.seed
    )
    rows = []
    print(f"{'C':>6} {'eps':>7} {'gamma':>7} {'weighted CV accuracy':>22}")
    for point in result.points:
        p = point.params
        print(f"{p.C:>6g} {p.eps:>7g} {p.gamma:>7g} {point.weighted_accuracy:>22.4f}")
        rows.append({"params": p.to_dict(), "weighted_accuracy": point.weighted_accuracy})
    best = result.best
    print(f"best: C={best.C} eps={best.eps} gamma={best.gamma}")
    (ctx.out_dir / f"grid_{kind.value}.json").write_text(json.dumps({
        "feature_kind": kind.value, "best": best.to_dict(), "points": rows,
    }, indent=2))
    ctx.finish({"best": best.to_dict(), "points": len(rows)})
    return 0


def _evaluate_kind(
    kind: FeatureKind,
    train_segments: list[AudioSegment],
    test_segments: list[AudioSegment],
    args: argparse.Namespace,
) -> EvalReport:
    config = FeatureSetConfig(kind)
    params = _explicit_params(args)
    speakers = speaker_frames(train_segments, config)
    if args.grid_search and params is None:
        params = grid_search(
            speakers, use_pca=config.uses_pca, pca_epsilon=args.pca_epsilon, seed=args.seed
        ).best
    if params is None:
        params = DEFAULT_SVM_PARAMS[kind]
    cv = CvReport(folds=run_louo_folds(
        speakers, params, use_pca=config.uses_pca,
        pca_epsilon=args.pca_epsilon, seed=args.seed,
    ))
    bundle = _train_bundle(speakers, kind, params, args.seed, args.pca_epsilon,
                           normalize=not args.no_normalize)

    all_scores, all_labels, decisions, truth = [], [], [], []
    for seg, matrix, frame_indices in _segment_features(test_segments, config):
        scores = bundle.decide_many(matrix)
        all_scores.append(scores)
        all_labels.append(np.full(scores.size, 1 if seg.label is Label.CONFIRMATION else -1))
        decisions.append(decision_from_scores(
            seg.segment_id, frame_indices, scores, args.majority_threshold
        ))
        truth.append(seg.label)
    scores = np.concatenate(all_scores)
    labels = np.concatenate(all_labels)
    seg_roc = None
    if args.segment_roc:
        seg_scores = np.array([segment_score(d) for d in decisions])
        seg_labels = np.array([1 if t is Label.CONFIRMATION else -1 for t in truth])
        seg_roc = roc_auc(seg_scores, seg_labels)
    return EvalReport(
        feature_kind=kind.value,
        raw_dimension=config.raw_dimension,
        model_dimension=bundle.svm.dimension,
        params=params,
        cv=cv,
        frame_confusion=frame_metrics(scores, labels),
        roc=roc_auc(scores, labels),
        segment_confusion=segment_metrics(decisions, truth),
        segment_roc=seg_roc,
    )


def cmd_evaluate(args: argparse.Namespace) -> int:
    ctx = _context(args)
    kinds = _feature_kinds(args.features)
    if args.test_manifest:
        train_segments = load_segments(args.manifest)
        test_segments = load_segments(args.test_manifest)
    else:
        segments = load_segments(args.manifest)
        split = split_corpus(segments, args.train_fraction, args.seed)
        train_segments, test_segments = split.train, split.test
    header = (f"{'feature set':<18} {'dim':>9} {'cv accuracy':>15} "
              f"{'TPR%':>6} {'FPR%':>6} {'AUC':>6} {'seg acc':>8}")
    print(header)
    print("-" * len(header))
    summary = []
    for kind in kinds:
        report = _evaluate_kind(kind, train_segments, test_segments, args)
        dim = (f"{report.raw_dimension}->{report.model_dimension}"
               if report.model_dimension != report.raw_dimension else f"{report.raw_dimension}")
        cv_range = f"{report.cv.min_accuracy * 100:.1f}-{report.cv.max_accuracy * 100:.1f}"
        print(f"{report.feature_kind:<18} {dim:>9} {cv_range:>15} "
              f"{report.frame_confusion.tpr * 100:>6.1f} {report.frame_confusion.fpr * 100:>6.1f} "
              f"{report.roc.auc:>6.2f} {report.segment_confusion.accuracy:>8.2f}")
        report.save_json(ctx.out_dir / f"eval_{kind.value}.json")
        report.save_roc_csv(ctx.out_dir / f"roc_{kind.value}.csv")
        summary.append({"feature_kind": kind.value, "auc": report.roc.auc,
                        "segment_accuracy": report.segment_confusion.accuracy})
    ctx.finish({"results": summary,
                "train_segments": len(train_segments), "test_segments": len(test_segments)})
    return 0


def cmd_classify(args: argparse.Namespace) -> int:
    ctx = _context(args)
    bundle = load_model(args.model)
    segments = load_segments(args.manifest)
    frame_dir = ctx.out_dir / "frames"
    frame_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for segment in segments:
        classifier = OnlineClassifier(bundle, args.majority_threshold)
        for frame in frame_stream(segment):
            classifier.push_frame(frame)
        classifier.finish_segment()
        decision = classifier.decision()
        with (frame_dir / f"{segment.segment_id}.csv").open("w") as fh:
            fh.write("frame_index,decision_value,prediction\n")
            for idx, score in zip(decision.frame_indices, decision.frame_scores):
                label = Label.CONFIRMATION if score > 0 else Label.OTHER
                fh.write(f"{idx},{score:.12g},{label.value}\n")
        rows.append((segment, decision))
    with (ctx.out_dir / "segment_decisions.csv").open("w") as fh:
        fh.write("segment_id,decided_label,trigger_frame,true_label\n")
        for segment, decision in rows:
            trigger = "" if decision.trigger_frame is None else decision.trigger_frame
            true = segment.label.value if segment.label else ""
            fh.write(f"{segment.segment_id},{decision.decided_label.value},{trigger},{true}\n")
    n_conf = sum(1 for _, d in rows if d.decided_label is Label.CONFIRMATION)
    print(f"classified {len(rows)} segments ({n_conf} confirmations) -> {ctx.out_dir}")
    ctx.finish({"segments": len(rows), "confirmations": n_conf})
    return 0


def cmd_listen(args: argparse.Namespace) -> int:
    ctx = _context(args)
    bundle = load_model(args.model)
    audio = load_wav(args.wav)
    if args.manifest:
        segments = [s for s in load_segments(args.manifest)
                    if Path(s.source_id).name == Path(args.wav).name]
        if not segments:
            raise DataError(f"manifest has no segments for {args.wav}")
    else:
        segments = vad_segments(
            audio, VadConfig(threshold=args.vad_threshold, hangover_ms=args.hangover_ms),
            source_id=Path(args.wav).name,
        )
    classifier = OnlineClassifier(bundle, args.majority_threshold)
    events = []
    audio_seconds = sum(len(s.samples) for s in segments) / audio.sample_rate
    start = time.perf_counter()
    for segment in segments:
        classifier.reset_segment()
        triggers = []
        for frame in frame_stream(segment):
            event = classifier.push_frame(frame)
            if event:
                triggers.append(event)
        event = classifier.finish_segment()
        if event:
            triggers.append(event)
        for event in triggers:
            events.append({
                "segment_id": segment.segment_id,
                "trigger_time_ms": trigger_time_ms(segment, event.frame_index),
                "rolling_mean": event.rolling_mean,
            })
    wall = time.perf_counter() - start
    rtf = wall / audio_seconds if audio_seconds else 0.0
    with (ctx.out_dir / "triggers.ndjson").open("w") as fh:
        for event in events:
            fh.write(json.dumps(event) + "\n")
    print(f"listened to {audio_seconds:.1f} s in {wall:.2f} s "
          f"(real-time factor {rtf:.3f}); {len(events)} triggers")
    ctx.finish({"triggers": len(events), "audio_seconds": audio_seconds,
                "wall_seconds": wall, "real_time_factor": rtf})
    return 0


# --- argument plumbing ----------------------------------------------------------


def _load_config_file(path: str) -> dict:
    """key = value lines; '#' starts a comment."""
    values: dict[str, str] = {}
    for line_no, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def _coerce(raw: str, action: argparse.Action) -> object:
    if isinstance(action, argparse._StoreTrueAction):
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"expected a boolean for {action.dest}, got {raw!r}")
    if action.type is not None:
        try:
            return action.type(raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for {action.dest}: {raw!r}") from exc
    return raw


def _apply_config_file(args: argparse.Namespace) -> None:
    """Fill arguments from the config file; explicit flags keep priority.

    A flag counts as explicit when its parsed value differs from the
    parser default.
    """
    if not getattr(args, "config", None):
        return
    file_values = _load_config_file(args.config)
    actions = _COMMAND_ACTIONS[args.command]
    for key, raw in file_values.items():
        if key not in actions:
            raise ConfigError(f"unknown config key {key!r} for command {args.command}")
        action = actions[key]
        if getattr(args, key) == action.default:
            setattr(args, key, _coerce(raw, action))


def _add_common(parser: argparse.ArgumentParser, *, manifest: bool = True) -> None:
    parser.add_argument("--out", required=True, help="output directory for artifacts")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--config", help="key = value config file; flags override it")
    if manifest:
        parser.add_argument("--manifest", required=True, help="segment manifest CSV")


def _add_svm_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--svm-c", type=float, default=None, help="SVM C (with --svm-eps/--svm-gamma)")
    parser.add_argument("--svm-eps", type=float, default=None, help="SMO stopping tolerance")
    parser.add_argument("--svm-gamma", type=float, default=None, help="RBF width")
    parser.add_argument("--pca-epsilon", type=float, default=PCA_EPSILON,
                        help="retained-variance ratio for PCA feature sets")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlconfirm",
        description="Detect non-lexical confirmations (mhm-style backchannels) in speech audio.",
    )
    parser.add_argument("--version", action="version", version=f"nlconfirm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth-corpus", help="generate the synthetic test corpus")
    _add_common(p, manifest=False)
    p.add_argument("--speakers", type=int, default=10)
    p.add_argument("--segments-per-speaker", type=int, default=40)
    p.add_argument("--confirmation-rate", type=float, default=0.08)

    p = sub.add_parser("extract", help="dump per-segment feature matrices")
    _add_common(p)
    p.add_argument("--features", required=True, help="one feature set name")

    p = sub.add_parser("train", help="train a model on a manifest")
    _add_common(p)
    p.add_argument("--features", required=True)
    p.add_argument("--model-name", default="model.nlcm")
    p.add_argument("--grid-search", action="store_true",
                   help="pick SVM parameters by grid search instead of the shipped defaults")
    p.add_argument("--no-normalize", action="store_true",
                   help="skip z-scoring for feature sets without PCA")
    _add_svm_flags(p)

    p = sub.add_parser("grid-search", help="score the SVM parameter grid by cross-validation")
    _add_common(p)
    p.add_argument("--features", required=True)
    _add_svm_flags(p)

    p = sub.add_parser("evaluate", help="cross-validate, train and score on a test split")
    _add_common(p)
    p.add_argument("--features", default="all", help="comma list of feature sets, or 'all'")
    p.add_argument("--test-manifest", default=None,
                   help="separate test manifest (otherwise --train-fraction split)")
    p.add_argument("--train-fraction", type=float, default=0.7)
    p.add_argument("--grid-search", action="store_true")
    p.add_argument("--majority-threshold", type=float, default=0.0)
    p.add_argument("--segment-roc", action="store_true",
                   help="also report segment-level ROC (score = max rolling vote mean)")
    p.add_argument("--no-normalize", action="store_true",
                   help="skip z-scoring for feature sets without PCA")
    _add_svm_flags(p)

    p = sub.add_parser("classify", help="offline per-frame classification of a manifest")
    _add_common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--majority-threshold", type=float, default=0.0)

    p = sub.add_parser("listen", help="stream a WAV through the online classifier")
    _add_common(p, manifest=False)
    p.add_argument("--wav", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--manifest", default=None,
                   help="use these segment spans instead of running VAD")
    p.add_argument("--vad-threshold", type=float, default=0.01)
    p.add_argument("--hangover-ms", type=int, default=200)
    p.add_argument("--majority-threshold", type=float, default=0.0)

    global _COMMAND_ACTIONS
    _COMMAND_ACTIONS = {
        name: {a.dest: a for a in sp._actions if a.dest != "help"}
        for name, sp in sub.choices.items()
    }
    return parser


_COMMAND_ACTIONS: dict[str, dict[str, argparse.Action]] = {}

_COMMANDS = {
    "synth-corpus": cmd_synth_corpus,
    "extract": cmd_extract,
    "train": cmd_train,
    "grid-search": cmd_grid_search,
    "evaluate": cmd_evaluate,
    "classify": cmd_classify,
    "listen": cmd_listen,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        _apply_config_file(args)
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 4
    except DetectorError as exc:  # pragma: no cover - base-class fallback
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
