"""Bundled story corpus: loading, validation, running, benchmarking.

The corpus is one XML file of restaurant stories. Every entry carries a
prose excerpt, its provenance, a scenario type, and the hand-written logic
form the reader consumes. Loading validates each logic form against the
domain vocabulary and enforces corpus-level hygiene: unique ids and no two
entries that tell the same story modulo entity renaming.
"""

import csv
import io
import json
import os
import time
import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from typing import Dict, List, Optional, Sequence, Tuple

from restaurant_reader.domain import build_restaurant_domain
from restaurant_reader.logicform import Story, parse_story, validate_story
from restaurant_reader.reasoner import Config, Result, SolveTimeout, solve

SOURCES = ("youtube", "google_books", "gutenberg", "mueller", "hand_crafted")
SCENARIO_TYPES = ("normal", "exception", "variation")
VERDICTS = ("models-found", "no-models", "timeout")


class CorpusError(ValueError):
    """Raised when the corpus file or one of its entries is unusable."""


CORPUS_PATH_ENV = "RESTAURANT_READER_CORPUS"


def bundled_corpus_path() -> str:
    """Path of the corpus shipped with the package.

    The RESTAURANT_READER_CORPUS environment variable overrides it.
    """
    override = os.environ.get(CORPUS_PATH_ENV)
    if override:
        return override
    return str(resources.files("restaurant_reader") / "data" / "restaurant_corpus.xml")


# ============================================================================
# entries
# ============================================================================


@dataclass(frozen=True)
class CorpusEntry:
    """One corpus story.

    reconstructed marks entries that restate a story the literature already
    fixes word for word; the rest are synthetic fillers keeping the corpus
    distribution shape. limitation marks stories bundled as demonstrations
    of a known engine limitation (they stay solvable under the default
    configuration but not under every configuration).
    """

    id: str
    excerpt: str
    source: str
    scenario_type: str
    logic_form: str
    reconstructed: bool = False
    limitation: bool = False

    def story(self) -> Story:
        return parse_story(self.logic_form, story_id=self.id)


def _rename_signature(story: Story) -> Tuple:
    """A canonical shape for duplicate detection: entity names are replaced
    by sort-indexed placeholders in declaration order, so two stories that
    differ only in who is called what collapse to the same signature."""
    mapping: Dict[str, str] = {}
    per_sort: Dict[str, int] = {}
    for ent in story.entities:
        n = per_sort.get(ent.sort, 0)
        per_sort[ent.sort] = n + 1
        mapping[ent.name] = "%s_%d" % (ent.sort, n)

    def rename(term) -> str:
        head = mapping.get(term.functor, term.functor)
        if not term.args:
            return head
        return "%s(%s)" % (head, ",".join(rename(a) for a in term.args))

    obs = sorted(
        (o.kind, rename(o.subject), o.value, o.story_step)
        for o in story.observations
    )
    sorts = tuple(sorted(per_sort.items()))
    return (sorts, tuple(obs))


def _parse_bool(raw: Optional[str], entry_id: str, attr: str) -> bool:
    if raw is None or raw == "false":
        return False
    if raw == "true":
        return True
    raise CorpusError(
        "entry %s: attribute %s must be true or false, got %r"
        % (entry_id, attr, raw)
    )


def load_corpus(path: str) -> List[CorpusEntry]:
    """Load and validate a corpus XML file.

    Raises CorpusError on malformed XML, missing fields, unknown source or
    scenario type, duplicate ids, logic forms that fail validation (the
    entry id is named), and entries that coincide up to entity renaming.
    """
    try:
        tree = ET.parse(path)
    except ET.ParseError as exc:
        raise CorpusError("malformed corpus XML: %s" % exc)
    root = tree.getroot()
    entries: List[CorpusEntry] = []
    seen_ids: Dict[str, bool] = {}
    seen_shapes: Dict[Tuple, str] = {}
    for node in root.findall("story"):
        entry_id = node.get("id")
        if not entry_id:
            raise CorpusError("a story element is missing its id attribute")
        if entry_id in seen_ids:
            raise CorpusError("duplicate corpus id: %s" % entry_id)
        seen_ids[entry_id] = True
        source = node.get("source")
        if source not in SOURCES:
            raise CorpusError(
                "entry %s: unknown source %r" % (entry_id, source)
            )
        scenario_type = node.get("type")
        if scenario_type not in SCENARIO_TYPES:
            raise CorpusError(
                "entry %s: unknown scenario type %r" % (entry_id, scenario_type)
            )
        excerpt_node = node.find("excerpt")
        logic_node = node.find("logicform")
        if excerpt_node is None or logic_node is None:
            raise CorpusError(
                "entry %s: needs excerpt and logicform elements" % entry_id
            )
        excerpt = (excerpt_node.text or "").strip()
        logic_form = (logic_node.text or "").strip()
        entry = CorpusEntry(
            id=entry_id,
            excerpt=excerpt,
            source=source,
            scenario_type=scenario_type,
            logic_form=logic_form,
            reconstructed=_parse_bool(
                node.get("reconstructed"), entry_id, "reconstructed"
            ),
            limitation=_parse_bool(
                node.get("limitation"), entry_id, "limitation"
            ),
        )
        try:
            story = entry.story()
        except ValueError as exc:
            raise CorpusError(
                "entry %s: logic form does not parse: %s" % (entry_id, exc)
            )
        domain = build_restaurant_domain(story.entities)
        diags = validate_story(story, domain)
        if diags:
            raise CorpusError(
                "entry %s: invalid logic form: %s"
                % (entry_id, "; ".join(str(d) for d in diags))
            )
        shape = _rename_signature(story)
        if shape in seen_shapes:
            raise CorpusError(
                "entries %s and %s coincide up to entity renaming"
                % (seen_shapes[shape], entry_id)
            )
        seen_shapes[shape] = entry_id
        entries.append(entry)
    return entries


def distribution(entries: Sequence[CorpusEntry]) -> Dict[str, Counter]:
    """Counts per source and per scenario type, plus the total."""
    out: Dict[str, Counter] = {
        "by_source": Counter(),
        "by_type": Counter(),
        "by_source_and_type": Counter(),
    }
    for e in entries:
        out["by_source"][e.source] += 1
        out["by_type"][e.scenario_type] += 1
        out["by_source_and_type"][(e.source, e.scenario_type)] += 1
    return out


# ============================================================================
# running entries
# ============================================================================


@dataclass(frozen=True)
class RunResult:
    """Outcome of solving one entry under one configuration."""

    entry_id: str
    ti_mode: str
    customer_structure: str
    model_count: int
    wall_time: float
    verdict: str
    max_step: int = 0
    reason: Optional[str] = None


def run_entry(
    entry: CorpusEntry,
    config: Optional[Config] = None,
    timeout_s: Optional[float] = None,
) -> RunResult:
    """Solve one entry, reporting timing and a verdict instead of raising
    on timeout."""
    cfg = config or Config()
    story = entry.story()
    start = time.monotonic()
    try:
        result: Result = solve(story, cfg, timeout_s=timeout_s)
    except SolveTimeout:
        return RunResult(
            entry_id=entry.id,
            ti_mode=cfg.ti_mode,
            customer_structure=cfg.customer_structure,
            model_count=0,
            wall_time=time.monotonic() - start,
            verdict="timeout",
        )
    wall = time.monotonic() - start
    if result.models:
        verdict = "models-found"
        max_step = max(m.max_step for m in result.models)
    else:
        verdict = "no-models"
        max_step = 0
    return RunResult(
        entry_id=entry.id,
        ti_mode=cfg.ti_mode,
        customer_structure=cfg.customer_structure,
        model_count=len(result.models),
        wall_time=wall,
        verdict=verdict,
        max_step=max_step,
        reason=result.reason,
    )


# ============================================================================
# benchmarking
# ============================================================================


@dataclass(frozen=True)
class BenchRow:
    """One line of the timing table: an entry under a configuration, with
    the time increase relative to the entry's first (baseline) config."""

    entry_id: str
    config_label: str
    mean_time: float
    max_step: int
    model_count: int
    verdict: str
    relative_increase: Optional[float]


def config_label(config: Config) -> str:
    return "%s/%s" % (config.ti_mode, config.customer_structure)


def bench(
    entries: Sequence[CorpusEntry],
    configs: Sequence[Config],
    repetitions: int = 10,
    timeout_s: Optional[float] = None,
) -> List[BenchRow]:
    """Timing table over entries and configurations.

    Entries run strictly one at a time so timings are taken in isolation.
    Each (entry, config) cell is the mean of `repetitions` runs; the first
    config serves as the baseline for the relative-increase column.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be at least 1")
    rows: List[BenchRow] = []
    for entry in entries:
        base_mean: Optional[float] = None
        for cfg in configs:
            times: List[float] = []
            last: Optional[RunResult] = None
            for _ in range(repetitions):
                last = run_entry(entry, cfg, timeout_s=timeout_s)
                times.append(last.wall_time)
            mean = sum(times) / len(times)
            rel: Optional[float] = None
            if base_mean is None:
                base_mean = mean
            elif base_mean > 0:
                rel = (mean - base_mean) / base_mean
            rows.append(
                BenchRow(
                    entry_id=entry.id,
                    config_label=config_label(cfg),
                    mean_time=mean,
                    max_step=last.max_step if last else 0,
                    model_count=last.model_count if last else 0,
                    verdict=last.verdict if last else "no-models",
                    relative_increase=rel,
                )
            )
    return rows


_BENCH_FIELDS = (
    "entry_id",
    "config_label",
    "mean_time",
    "max_step",
    "model_count",
    "verdict",
    "relative_increase",
)


def bench_csv(rows: Sequence[BenchRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(_BENCH_FIELDS)
    for r in rows:
        writer.writerow(
            [
                r.entry_id,
                r.config_label,
                "%.6f" % r.mean_time,
                r.max_step,
                r.model_count,
                r.verdict,
                "" if r.relative_increase is None else "%.4f" % r.relative_increase,
            ]
        )
    return buf.getvalue()


def bench_json(rows: Sequence[BenchRow]) -> str:
    payload = []
    for r in rows:
        payload.append(
            {
                "entry_id": r.entry_id,
                "config_label": r.config_label,
                "mean_time": r.mean_time,
                "max_step": r.max_step,
                "model_count": r.model_count,
                "verdict": r.verdict,
                "relative_increase": r.relative_increase,
            }
        )
    return json.dumps(payload, indent=2, sort_keys=True)
