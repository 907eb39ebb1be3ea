"""Semi-automatic corpus validation.

Stage order is fixed: initial filter, language filter, contradiction
flagging, external label check, human decisions, corpus-specific rules for
the paired corpus, URL stripping. Automated stages remove records outright;
judgment calls become review items that a human adjudicates in a separate
pass, after which the decisions file feeds back into the pipeline. Every
removal is accounted for: input count always equals output count plus the
sum of per-stage removals.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

from . import resources
from .dedup import DedupConfig, near_duplicates
from .langid import LanguageDetector, TrigramDetector
from .providers import Backend, FactCheckRequest, ProviderFailure, factcheck_search
from .records import LABELS, NewsItem, SchemaError, replace
from .textprep import build_query, content_token_count, find_urls, strip_emoji, strip_quotes, strip_urls

STAGES = (
    "initial_filter",
    "language_filter",
    "contradiction_resolution",
    "external_label_check",
    "subset_inspection",
    "fakebr_specific",
)

REVIEW_KINDS = ("near_dup_conflict", "shared_url_conflict", "external_label_conflict", "random_inspection")
DECISION_ACTIONS = ("keep", "remove", "relabel")

_KIND_STAGE = {
    "near_dup_conflict": "contradiction_resolution",
    "shared_url_conflict": "contradiction_resolution",
    "external_label_conflict": "external_label_check",
    "random_inspection": "subset_inspection",
}


@dataclass
class ReviewItem:
    """One judgment call for a human, plus the eventual decision."""

    id: str
    kind: str
    record_ids: list[str]
    suggestion: str = "keep"
    context: dict[str, Any] = field(default_factory=dict)
    decision: dict[str, Any] | None = None
    decided_by: str | None = None
    decided_at: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in REVIEW_KINDS:
            raise SchemaError(f"unknown review kind {self.kind!r}")

    @property
    def stage(self) -> str:
        return _KIND_STAGE[self.kind]

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "id": self.id,
            "kind": self.kind,
            "record_ids": self.record_ids,
            "suggestion": self.suggestion,
            "context": self.context,
        }
        if self.decision is not None:
            out["decision"] = self.decision
        if self.decided_by is not None:
            out["decided_by"] = self.decided_by
        if self.decided_at is not None:
            out["decided_at"] = self.decided_at
        return out

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "ReviewItem":
        return cls(
            id=raw["id"],
            kind=raw["kind"],
            record_ids=list(raw["record_ids"]),
            suggestion=raw.get("suggestion", "keep"),
            context=dict(raw.get("context", {})),
            decision=raw.get("decision"),
            decided_by=raw.get("decided_by"),
            decided_at=raw.get("decided_at"),
        )


def validate_decision(item: ReviewItem) -> None:
    """Raise SchemaError when an adjudicated decision is malformed."""
    decision = item.decision
    if decision is None:
        return
    action = decision.get("action")
    if action not in DECISION_ACTIONS:
        raise SchemaError(f"review {item.id}: unknown action {action!r}")
    ids = decision.get("ids", item.record_ids)
    unknown = [i for i in ids if i not in item.record_ids]
    if unknown:
        raise SchemaError(f"review {item.id}: decision targets unknown records {unknown}")
    if action == "relabel":
        if decision.get("label") not in LABELS:
            raise SchemaError(f"review {item.id}: relabel needs a valid label")


def read_review_items(path: str | Path) -> list[ReviewItem]:
    items = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                items.append(ReviewItem.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, SchemaError) as exc:
                raise SchemaError(f"{path}:{lineno}: {exc}") from None
    return items


def write_review_items(path: str | Path, items: Iterable[ReviewItem]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for item in items:
            fh.write(json.dumps(item.to_dict(), ensure_ascii=False, sort_keys=True))
            fh.write("\n")


@dataclass
class ValidationReport:
    input_count: int = 0
    output_count: int = 0
    removed: dict[str, list[str]] = field(default_factory=lambda: {s: [] for s in STAGES})
    removal_reasons: dict[str, str] = field(default_factory=dict)
    corrected: dict[str, list[dict[str, Any]]] = field(default_factory=lambda: {s: [] for s in STAGES})
    flagged_language: list[str] = field(default_factory=list)
    review_items: list[ReviewItem] = field(default_factory=list)
    urls_stripped: int = 0

    def stage_counts(self) -> dict[str, int]:
        """Records corrected or removed per stage."""
        return {s: len(self.removed[s]) + len(self.corrected[s]) for s in STAGES}

    def total_removed(self) -> int:
        return sum(len(ids) for ids in self.removed.values())

    def conservation_holds(self) -> bool:
        return self.input_count == self.output_count + self.total_removed()

    def to_dict(self) -> dict[str, Any]:
        return {
            "input_count": self.input_count,
            "output_count": self.output_count,
            "stage_counts": self.stage_counts(),
            "removed": self.removed,
            "removal_reasons": self.removal_reasons,
            "corrected": self.corrected,
            "flagged_language": self.flagged_language,
            "urls_stripped": self.urls_stripped,
            "review_queue_size": len(self.review_items),
        }


def _remove(report: ValidationReport, stage: str, record_id: str, reason: str) -> None:
    report.removed[stage].append(record_id)
    report.removal_reasons[record_id] = reason


def filter_initial(
    records: Sequence[NewsItem], report: ValidationReport, min_content_tokens: int = 15
) -> list[NewsItem]:
    """Drop exact duplicates (first occurrence kept), URL-only texts and
    texts with fewer than ``min_content_tokens`` content tokens."""
    kept = []
    seen_texts: set[str] = set()
    for item in records:
        if item.text in seen_texts:
            _remove(report, "initial_filter", item.id, "exact_duplicate")
            continue
        seen_texts.add(item.text)
        if not strip_urls(item.text).strip():
            _remove(report, "initial_filter", item.id, "url_only")
            continue
        if content_token_count(item.text) < min_content_tokens:
            _remove(report, "initial_filter", item.id, "too_short")
            continue
        kept.append(item)
    return kept


def filter_language(
    records: Sequence[NewsItem],
    report: ValidationReport,
    detector: LanguageDetector | None = None,
    auto_remove_confidence: float = 0.95,
) -> list[NewsItem]:
    """Remove confident non-Portuguese records; flag borderline ones.

    Detector failures and low-confidence calls only flag, never drop.
    """
    detector = detector or TrigramDetector()
    kept = []
    for item in records:
        try:
            language, confidence = detector.detect(item.text)
        except Exception:
            language, confidence = "und", 0.0
        if language != "pt":
            if confidence >= auto_remove_confidence:
                _remove(report, "language_filter", item.id, f"language:{language}")
                continue
            report.flagged_language.append(item.id)
        kept.append(item)
    return kept


def flag_contradictions(
    records: Sequence[NewsItem],
    report: ValidationReport,
    dedup_cfg: DedupConfig = DedupConfig(),
) -> None:
    """Emit review items for near-duplicate clusters with mixed labels and
    for records that cite the same URL under different labels."""
    by_id = {item.id: item for item in records}
    counter = len(report.review_items)

    clusters = near_duplicates({item.id: item.text for item in records}, dedup_cfg)
    for cluster in clusters:
        labels = {by_id[m].label for m in cluster.members}
        if len(labels) > 1:
            counter += 1
            report.review_items.append(
                ReviewItem(
                    id=f"rev-{counter:04d}",
                    kind="near_dup_conflict",
                    record_ids=list(cluster.members),
                    suggestion="remove",
                    context={
                        "labels": {m: by_id[m].label for m in cluster.members},
                        "pairs": [{"a": a, "b": b, "jaccard": j} for a, b, j in cluster.pairs],
                    },
                )
            )

    cited: dict[str, list[str]] = {}
    for item in records:
        for url in set(find_urls(item.text)):
            cited.setdefault(url, []).append(item.id)
    for url in sorted(cited):
        ids = cited[url]
        labels = {by_id[i].label for i in ids}
        if len(ids) > 1 and len(labels) > 1:
            counter += 1
            report.review_items.append(
                ReviewItem(
                    id=f"rev-{counter:04d}",
                    kind="shared_url_conflict",
                    record_ids=sorted(ids),
                    suggestion="remove",
                    context={"url": url, "labels": {i: by_id[i].label for i in ids}},
                )
            )


def check_external_labels(
    records: Sequence[NewsItem],
    backend: Backend,
    report: ValidationReport,
    language_code: str = "pt-BR",
    page_size: int = 5,
) -> None:
    """Ask the fact-check service about each record; emit a review item when
    a normalized agency rating contradicts the stored label."""
    mapping = resources.rating_map()
    counter = len(report.review_items)
    for item in records:
        query, _ = build_query(strip_emoji(strip_quotes(item.text)))
        try:
            reviews = factcheck_search(
                FactCheckRequest(query=query, language_code=language_code, page_size=page_size), backend
            )
        except ProviderFailure:
            continue
        for review in reviews:
            bucket = mapping.get(review.textual_rating.strip().lower())
            if bucket is None:
                continue
            if bucket != item.label:
                counter += 1
                report.review_items.append(
                    ReviewItem(
                        id=f"rev-{counter:04d}",
                        kind="external_label_conflict",
                        record_ids=[item.id],
                        suggestion="relabel",
                        context={
                            "stored_label": item.label,
                            "external_bucket": bucket,
                            "textual_rating": review.textual_rating,
                            "publisher": review.publisher_name,
                            "review_url": review.review_url,
                        },
                    )
                )
            break  # first decisive rating settles the comparison


def random_inspection(
    records: Sequence[NewsItem], report: ValidationReport, sample_size: int, seed: int = 0
) -> None:
    """Emit a seeded random sample of records for manual quality review."""
    if sample_size <= 0 or not records:
        return
    rng = random.Random(seed)
    ids = sorted(item.id for item in records)
    sample = sorted(rng.sample(ids, min(sample_size, len(ids))))
    counter = len(report.review_items)
    for record_id in sample:
        counter += 1
        report.review_items.append(
            ReviewItem(id=f"rev-{counter:04d}", kind="random_inspection", record_ids=[record_id])
        )


def apply_decisions(
    records: Sequence[NewsItem], decisions: Sequence[ReviewItem], report: ValidationReport
) -> list[NewsItem]:
    """Apply adjudicated review items; attribution follows the item's kind."""
    by_id = {item.id: item for item in records}
    for item in decisions:
        validate_decision(item)
        if item.decision is None:
            continue
        action = item.decision["action"]
        ids = item.decision.get("ids", item.record_ids)
        if action == "keep":
            continue
        for record_id in ids:
            record = by_id.get(record_id)
            if record is None:
                continue  # already removed by an earlier stage or decision
            if action == "remove":
                _remove(report, item.stage, record_id, f"decision:{item.kind}")
                del by_id[record_id]
            elif action == "relabel":
                new_label = item.decision["label"]
                if new_label != record.label:
                    report.corrected[item.stage].append(
                        {"id": record_id, "field": "label", "old": record.label, "new": new_label,
                         "reason": item.kind}
                    )
                    by_id[record_id] = replace(record, label=new_label)
    return [by_id[item.id] for item in records if item.id in by_id]


def fakebr_rules(
    records: Sequence[NewsItem],
    report: ValidationReport,
    incomplete_ids: Iterable[str] = (),
    dedup_cfg: DedupConfig = DedupConfig(),
) -> list[NewsItem]:
    """Rules for the paired corpus: drop near-duplicates that share a source
    URL (lowest id kept), drop known-truncated records, then drop any record
    whose pair member is gone so the corpus stays strictly paired."""
    fakebr = [item for item in records if item.corpus == "fakebr"]
    if not fakebr:
        return list(records)
    for item in fakebr:
        if not item.pair_id:
            raise SchemaError(f"fakebr record {item.id} is missing pair_id")

    removed_here: set[str] = set()

    clusters = near_duplicates({item.id: item.text for item in fakebr}, dedup_cfg)
    by_id = {item.id: item for item in fakebr}
    for cluster in clusters:
        by_source: dict[str, list[str]] = {}
        for member in cluster.members:
            source = by_id[member].source_url or ""
            by_source.setdefault(source, []).append(member)
        for source, members in sorted(by_source.items()):
            if source and len(members) > 1:
                for member in sorted(members)[1:]:
                    if member not in removed_here:
                        removed_here.add(member)
                        _remove(report, "fakebr_specific", member, "same_source_near_dup")

    for record_id in sorted(set(incomplete_ids)):
        if record_id in by_id and record_id not in removed_here:
            removed_here.add(record_id)
            _remove(report, "fakebr_specific", record_id, "truncated_source")

    # Orphan sweep: a fakebr record survives only when its pair member does.
    # Records removed at earlier stages are already absent from the input.
    surviving = [item for item in fakebr if item.id not in removed_here]
    partners: dict[str, list[NewsItem]] = {}
    for item in surviving:
        partners.setdefault(item.pair_id, []).append(item)
    for pair_id, members in sorted(partners.items()):
        if len(members) == 1:
            orphan = members[0]
            removed_here.add(orphan.id)
            _remove(report, "fakebr_specific", orphan.id, "pair_member_removed")
        elif len(members) > 2:
            raise SchemaError(f"pair {pair_id} has {len(members)} members")

    return [item for item in records if item.id not in removed_here]


def strip_record_urls(records: Sequence[NewsItem], report: ValidationReport) -> list[NewsItem]:
    """Remove URLs from record texts, keeping the original under
    ``extra["text_raw"]`` whenever the text changed."""
    out = []
    for item in records:
        stripped = strip_urls(item.text)
        if stripped != item.text:
            extra = dict(item.extra)
            extra["text_raw"] = item.text
            out.append(replace(item, text=stripped, extra=extra))
            report.urls_stripped += 1
        else:
            out.append(item)
    return out


def run_validation(
    records: Sequence[NewsItem],
    *,
    detector: LanguageDetector | None = None,
    factcheck_backend: Backend | None = None,
    decisions: Sequence[ReviewItem] = (),
    incomplete_ids: Iterable[str] = (),
    dedup_cfg: DedupConfig = DedupConfig(),
    min_content_tokens: int = 15,
    auto_remove_confidence: float = 0.95,
    sample_size: int = 0,
    seed: int = 0,
) -> tuple[list[NewsItem], ValidationReport]:
    """Run the full pipeline in its fixed stage order."""
    report = ValidationReport(input_count=len(records))
    current = filter_initial(records, report, min_content_tokens)
    current = filter_language(current, report, detector, auto_remove_confidence)
    flag_contradictions(current, report, dedup_cfg)
    if factcheck_backend is not None:
        check_external_labels(current, factcheck_backend, report)
    random_inspection(current, report, sample_size, seed)
    if decisions:
        current = apply_decisions(current, decisions, report)
    current = fakebr_rules(current, report, incomplete_ids, dedup_cfg)
    current = strip_record_urls(current, report)
    report.output_count = len(current)
    assert report.conservation_holds(), "validation accounting out of balance"
    return current, report
