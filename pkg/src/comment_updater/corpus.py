"""JSONL corpus ingestion."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .tokenizer import clean_comment, texts

log = logging.getLogger(__name__)

FIELDS = ("old_code", "new_code", "old_comment", "new_comment", "id")


@dataclass(frozen=True)
class Sample:
    old_code: str
    new_code: str
    old_comment: str
    new_comment: str | None
    id: str

    def to_dict(self) -> dict:
        return {f: getattr(self, f) for f in FIELDS if getattr(self, f) is not None}


@dataclass
class LoadReport:
    loaded: int = 0
    skipped: int = 0
    duplicates: int = 0


class CorpusError(OSError):
    pass


def parse_field_map(spec: str | None) -> dict[str, str]:
    """``"src_method=old_code,dst_method=new_code"`` -> ``{"src_method": "old_code", ...}``."""
    if not spec:
        return {}
    mapping = {}
    for part in spec.split(","):
        source, _, target = part.partition("=")
        if target not in FIELDS or not source:
            raise ValueError(f"bad field mapping {part!r}")
        mapping[source.strip()] = target.strip()
    return mapping


def _validate(record: dict, require_new: bool, lineno: int) -> Sample:
    for name in ("old_code", "new_code", "old_comment"):
        if not isinstance(record.get(name), str) or not record[name].strip():
            raise ValueError(f"missing or empty {name}")
    new = record.get("new_comment")
    if require_new:
        if not isinstance(new, str) or not new.strip():
            raise ValueError("missing or empty new_comment")
        if texts(clean_comment(new)) == texts(clean_comment(record["old_comment"])):
            raise ValueError("new_comment equals old_comment after cleaning")
    elif new is not None and not isinstance(new, str):
        raise ValueError("new_comment must be a string")
    sample_id = record.get("id")
    sample_id = str(sample_id) if sample_id is not None else f"line{lineno}"
    return Sample(record["old_code"], record["new_code"], record["old_comment"], new, sample_id)


def load_corpus(
    path: str | Path,
    require_new_comment: bool = True,
    field_map: dict[str, str] | None = None,
    report: LoadReport | None = None,
) -> list[Sample]:
    """Read one JSON object per line; malformed lines are skipped and counted, duplicate ids dropped."""
    report = report if report is not None else LoadReport()
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise CorpusError(f"cannot read corpus {path}: {exc}") from exc
    field_map = field_map or {}
    samples: list[Sample] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            if not isinstance(record, dict):
                raise ValueError("not a JSON object")
            record = {field_map.get(k, k): v for k, v in record.items()}
            sample = _validate(record, require_new_comment, lineno)
        except ValueError as exc:
            report.skipped += 1
            log.warning("%s:%d skipped: %s", path, lineno, exc)
            continue
        if sample.id in seen:
            report.duplicates += 1
            log.warning("%s:%d duplicate id %s dropped", path, lineno, sample.id)
            continue
        seen.add(sample.id)
        samples.append(sample)
    report.loaded = len(samples)
    if not samples:
        log.warning("corpus %s is empty", path)
    return samples


def write_corpus(path: str | Path, samples: list[Sample]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in samples:
            fh.write(json.dumps(s.to_dict()) + "\n")
