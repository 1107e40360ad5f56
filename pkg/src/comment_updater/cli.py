"""Command line: train, predict, eval, inspect."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import edit_script as es
from .config import Config
from .corpus import CorpusError, LoadReport, Sample, load_corpus, parse_field_map
from .inference import Prediction, predict
from .metrics import EvalRecord, evaluation_report
from .model.checkpoint import CheckpointVersionError, load_checkpoint, save_checkpoint
from .model.training import TrainingDivergedError, train
from .pipeline import Example, PreprocessError, preprocess

log = logging.getLogger("comment_updater")


class FatalError(RuntimeError):
    pass


def preprocess_all(samples: Sequence[Sample], cfg: Config) -> list[Example]:
    examples = []
    for s in samples:
        try:
            examples.append(preprocess(s, cfg))
        except PreprocessError as exc:
            log.warning("rejected: %s", exc)
    return examples


def _load(path: str, require_new: bool, field_map: dict[str, str]) -> list[Sample]:
    report = LoadReport()
    try:
        samples = load_corpus(path, require_new, field_map, report)
    except CorpusError as exc:
        raise FatalError(str(exc)) from exc
    log.info("%s: %d samples, %d malformed lines skipped, %d duplicates", path, report.loaded, report.skipped, report.duplicates)
    return samples


def _mask_dump(examples: Sequence[Example]) -> list[dict]:
    def matrix(m):
        return None if m is None else m.tolist()

    return [
        {
            "id": e.id,
            "light": e.light,
            "change_mask": matrix(e.change_mask),
            "dependency_mask": matrix(e.dependency_mask),
            "fused_mask": matrix(e.mask),
        }
        for e in examples
    ]


def run_train(cfg: Config, train_path: str, out: str, valid_path: str | None = None, loss_log: str | None = None,
              field_map: dict[str, str] | None = None) -> list[dict]:
    train_ex = preprocess_all(_load(train_path, True, field_map or {}), cfg)
    valid_ex = preprocess_all(_load(valid_path, True, field_map or {}), cfg) if valid_path else None
    if not train_ex:
        raise FatalError("no usable training samples")
    try:
        result = train(train_ex, cfg, valid_ex, on_epoch=lambda r: log.info("epoch %(epoch)d loss %(train_loss).4f ppl %(val_perplexity).4f", r))
    except TrainingDivergedError as exc:
        raise FatalError(str(exc)) from exc
    save_checkpoint(out, result.model, result.vocabs, cfg, {"best_epoch": result.best_epoch})
    if loss_log:
        Path(loss_log).write_text(json.dumps(result.history, indent=1))
    return result.history


def run_predict(checkpoint: str, examples: Sequence[Example], k: int | None = None) -> list[Prediction]:
    model, vocabs, cfg = _load_model(checkpoint)
    return predict(model, vocabs, examples, k or cfg.beam_width, cfg.max_decode_len, cfg.batch_size)


def run_eval(checkpoint: str, examples: Sequence[Example], k: int = 5) -> dict:
    model, vocabs, cfg = _load_model(checkpoint)
    examples = [e for e in examples if e.new_comment_tokens]
    if not examples:
        raise FatalError("no evaluable samples")
    preds = predict(model, vocabs, examples, max(k, cfg.beam_width), cfg.max_decode_len, cfg.batch_size)
    records = [EvalRecord(p.old_comment, e.new_comment_tokens, p.candidates) for p, e in zip(preds, examples)]
    return evaluation_report(records, k)


def _load_model(path: str):
    try:
        return load_checkpoint(path)
    except CheckpointVersionError as exc:
        raise FatalError(str(exc)) from exc
    except (OSError, RuntimeError, KeyError) as exc:
        raise FatalError(f"cannot load checkpoint {path}: {exc}") from exc


def inspect_example(e: Example) -> dict:
    old = [] if e.comment_tokens == ["<s>"] else e.comment_tokens
    out = {
        "id": e.id,
        "light": e.light,
        "code_edit": e.code_tokens,
        "old_comment": old,
        "comment_edit": e.target,
        "syntax_nodes": e.syntax_tokens,
    }
    if e.change_graph is not None:
        out["change_graph"] = e.change_graph.to_dict()
        out["flow_edges"] = e.dependencies.to_list()
    if e.target is not None:
        out["applied"] = es.apply_edits(old, es.deserialize(e.target))
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="comment-updater", description="Update stale method comments from code changes.")
    p.add_argument("--config", help="JSON file with configuration overrides")
    p.add_argument("--seed", type=int, help="random seed (overrides the config)")
    p.add_argument("--dump-masks", metavar="PATH", help="write the attention masks of every processed sample as JSON")
    p.add_argument("--field-map", help="rename input fields, e.g. src_method=old_code,dst_method=new_code")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train a model on a JSONL corpus")
    t.add_argument("--train", required=True)
    t.add_argument("--valid")
    t.add_argument("--out", required=True, help="checkpoint path")
    t.add_argument("--loss-log", help="write per-epoch losses as JSON")
    t.add_argument("--epochs", type=int)

    pr = sub.add_parser("predict", help="print the top-k updated comments")
    pr.add_argument("--model", required=True)
    pr.add_argument("--input", required=True)
    pr.add_argument("-k", type=int)

    ev = sub.add_parser("eval", help="write the metric report")
    ev.add_argument("--model", required=True)
    ev.add_argument("--corpus", required=True)
    ev.add_argument("--report", help="also write the report to this file")
    ev.add_argument("-k", type=int, default=5)

    ins = sub.add_parser("inspect", help="dump edit scripts, change graph, flow edges and masks")
    ins.add_argument("--input", required=True)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = Config.load(args.config) if args.config else Config()
        if args.seed is not None:
            cfg = cfg.replace(seed=args.seed)
        if getattr(args, "epochs", None):
            cfg = cfg.replace(epochs=args.epochs)
        field_map = parse_field_map(args.field_map)
        examples: list[Example] = []

        if args.command == "train":
            run_train(cfg, args.train, args.out, args.valid, args.loss_log, field_map)
        elif args.command == "predict":
            _, _, model_cfg = _load_model(args.model)
            examples = preprocess_all(_load(args.input, False, field_map), model_cfg)
            for pred in run_predict(args.model, examples, args.k):
                print(json.dumps({
                    "id": pred.id,
                    "comments": [" ".join(c) for c in pred.candidates],
                    "no_update": pred.no_update,
                    "diagnostics": pred.diagnostics,
                }))
        elif args.command == "eval":
            _, _, model_cfg = _load_model(args.model)
            examples = preprocess_all(_load(args.corpus, True, field_map), model_cfg)
            report = run_eval(args.model, examples, args.k)
            text = json.dumps(report, indent=1)
            print(text)
            if args.report:
                Path(args.report).write_text(text + "\n")
        elif args.command == "inspect":
            examples = preprocess_all(_load(args.input, False, field_map), cfg)
            for e in examples:
                print(json.dumps(inspect_example(e)))

        if args.dump_masks and examples:
            Path(args.dump_masks).write_text(json.dumps(_mask_dump(examples)))
    except (FatalError, ValueError, es.MalformedScriptError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
