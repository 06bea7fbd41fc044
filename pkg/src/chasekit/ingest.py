"""Ball-by-ball data ingest and estimation.

Pipeline: parse delimited text -> clean authentic imperfections ->
bucket each delivery by game context -> estimate smoothed outcome
baselines per bucket -> derive a five-action transition model by
tilting each baseline.

Historical data carries no intent labels, so per-action rows cannot be
estimated directly; the baseline-plus-tilt derivation is the documented
interpretation and the tilt factors live in ACTION_TILTS.

Also houses a small categorical Naive Bayes classifier used for
context-prediction exercises over the same records.
"""

from __future__ import annotations

import enum
import io
import math
import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence, TextIO

from .match import (
    ACTION_ORDER,
    OUTCOME_ORDER,
    BallOutcome,
    BattingAction,
    OutcomeDistribution,
    TransitionModel,
    tilt_distribution,
)

HEADER = (
    "match_id,innings,over,ball_in_over,batter_id,bowler_id,"
    "runs_batter,extras,wicket,dismissal_type"
)

_FIELD_COUNT = len(HEADER.split(","))

# canonical non-negative integer text: no signs, padding, or whitespace
_INT_RE = re.compile(r"^(0|[1-9][0-9]*)$")

# derived action rows for estimated models; BALANCED is the baseline itself
ACTION_TILTS: Mapping[BattingAction, float] = {
    BattingAction.ULTRA_DEFENSIVE: 0.5,
    BattingAction.DEFENSIVE: 0.75,
    BattingAction.BALANCED: 1.0,
    BattingAction.AGGRESSIVE: 1.25,
    BattingAction.ULTRA_AGGRESSIVE: 1.5,
}

BALLS_PER_OVER = 6
INNINGS_BALLS = 120  # T20 innings horizon used for required-rate context


@dataclass(frozen=True)
class BallRecord:
    """One delivery as recorded in the source data."""

    match_id: str
    innings: int
    over: int
    ball_in_over: int
    batter_id: str
    bowler_id: str
    runs_batter: int
    extras: int
    wicket: bool
    dismissal_type: str | None = None

    @property
    def key(self) -> tuple[str, int, int, int]:
        return (self.match_id, self.innings, self.over, self.ball_in_over)

    @property
    def total_runs(self) -> int:
        return self.runs_batter + self.extras


@dataclass(frozen=True)
class ParseIssue:
    line: int
    reason: str


def _parse_int(raw: str, name: str, low: int, high: int | None) -> int:
    if not _INT_RE.match(raw):
        raise ValueError(f"{name} is not a canonical integer: {raw!r}")
    v = int(raw)
    if v < low or (high is not None and v > high):
        raise ValueError(f"{name} out of range: {v}")
    return v


def _parse_row(fields: list[str]) -> BallRecord:
    if len(fields) != _FIELD_COUNT:
        raise ValueError(f"expected {_FIELD_COUNT} fields, got {len(fields)}")
    match_id = fields[0]
    if not match_id:
        raise ValueError("empty match_id")
    innings = _parse_int(fields[1], "innings", 1, 2)
    over = _parse_int(fields[2], "over", 0, None)
    ball_in_over = _parse_int(fields[3], "ball_in_over", 1, 6)
    runs_batter = _parse_int(fields[6], "runs", 0, 6)
    extras = _parse_int(fields[7], "extras", 0, None)
    if fields[8] not in ("0", "1"):
        raise ValueError(f"wicket must be 0 or 1: {fields[8]!r}")
    return BallRecord(
        match_id=match_id,
        innings=innings,
        over=over,
        ball_in_over=ball_in_over,
        batter_id=fields[4],
        bowler_id=fields[5],
        runs_batter=runs_batter,
        extras=extras,
        wicket=fields[8] == "1",
        dismissal_type=fields[9] or None,
    )


def parse_ball_by_ball(source: str | TextIO) -> tuple[list[BallRecord], list[ParseIssue]]:
    """Parse header-first delimited text into records plus issues.

    Malformed rows become (line number, reason) issues and parsing
    continues; a missing or wrong header is fatal (ValueError).
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    lines = source.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()  # trailing newline, not an empty row
    if not lines or lines[0] != HEADER:
        raise ValueError("missing or malformed header line")
    records: list[BallRecord] = []
    issues: list[ParseIssue] = []
    for i, line in enumerate(lines[1:], start=2):
        if line == "":
            issues.append(ParseIssue(line=i, reason="empty row"))
            continue
        try:
            records.append(_parse_row(line.split(",")))
        except ValueError as exc:
            issues.append(ParseIssue(line=i, reason=str(exc)))
    return records, issues


def serialize_records(records: Iterable[BallRecord]) -> str:
    """Canonical text form: header plus one row per record."""
    lines = [HEADER]
    for r in records:
        lines.append(
            f"{r.match_id},{r.innings},{r.over},{r.ball_in_over},"
            f"{r.batter_id},{r.bowler_id},{r.runs_batter},{r.extras},"
            f"{int(r.wicket)},{r.dismissal_type or ''}"
        )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CleaningReport:
    duplicates_removed: int = 0
    dismissals_imputed: int = 0
    overthrows_remapped: int = 0


def clean_records(records: Sequence[BallRecord]) -> tuple[list[BallRecord], CleaningReport]:
    """Fix known data imperfections; idempotent.

    Deduplicates on (match_id, innings, over, ball_in_over) keeping the
    first row, imputes dismissal_type "unknown" on wicket balls missing
    it, and remaps runs_batter 5 (overthrows) to 4 so deliveries stay on
    the model's seven-outcome support.
    """
    seen: set[tuple[str, int, int, int]] = set()
    cleaned: list[BallRecord] = []
    duplicates = imputed = remapped = 0
    for r in records:
        if r.key in seen:
            duplicates += 1
            continue
        seen.add(r.key)
        if r.wicket and not r.dismissal_type:
            r = replace(r, dismissal_type="unknown")
            imputed += 1
        if r.runs_batter == 5:
            r = replace(r, runs_batter=4)
            remapped += 1
        cleaned.append(r)
    return cleaned, CleaningReport(
        duplicates_removed=duplicates,
        dismissals_imputed=imputed,
        overthrows_remapped=remapped,
    )


# ---------------------------------------------------------------------------
# context bucketing


class Phase(enum.Enum):
    POWERPLAY = "POWERPLAY"  # overs 0-5
    MIDDLE = "MIDDLE"  # overs 6-14
    DEATH = "DEATH"  # overs 15+


class WicketsBand(enum.Enum):
    W0_2 = "W0_2"
    W3_5 = "W3_5"
    W6_PLUS = "W6_PLUS"


class RateBand(enum.Enum):
    LOW = "LOW"  # required rate < 6
    MEDIUM = "MEDIUM"  # 6 to 9 inclusive, and the no-target fallback
    HIGH = "HIGH"  # above 9


@dataclass(frozen=True)
class ContextBucket:
    phase: Phase
    wickets_band: WicketsBand
    required_rate_band: RateBand

    @property
    def key(self) -> str:
        return f"{self.phase.value}:{self.wickets_band.value}:{self.required_rate_band.value}"

    @classmethod
    def from_key(cls, key: str) -> "ContextBucket":
        parts = key.split(":")
        if len(parts) != 3:
            raise ValueError(f"malformed bucket key {key!r}")
        return cls(Phase(parts[0]), WicketsBand(parts[1]), RateBand(parts[2]))


def phase_of_over(over: int) -> Phase:
    if over <= 5:
        return Phase.POWERPLAY
    if over <= 14:
        return Phase.MIDDLE
    return Phase.DEATH


def wickets_band_of(wickets_down: int) -> WicketsBand:
    if wickets_down <= 2:
        return WicketsBand.W0_2
    if wickets_down <= 5:
        return WicketsBand.W3_5
    return WicketsBand.W6_PLUS


def rate_band_of(required_rate: float | None) -> RateBand:
    """None means no target is defined (first innings or unknown)."""
    if required_rate is None:
        return RateBand.MEDIUM
    if required_rate < 6.0:
        return RateBand.LOW
    if required_rate <= 9.0:
        return RateBand.MEDIUM
    return RateBand.HIGH


def bucketize(records: Sequence[BallRecord]) -> list[tuple[BallRecord, ContextBucket]]:
    """Assign every record its context bucket; total by construction.

    Wickets down and runs scored are tallied per (match, innings) in
    delivery order. A second-innings target is inferred as the same
    match's first-innings total plus one; when the file has no first
    innings for that match the rate band falls back to MEDIUM.
    """
    order = sorted(
        range(len(records)),
        key=lambda i: (
            records[i].match_id,
            records[i].innings,
            records[i].over,
            records[i].ball_in_over,
        ),
    )
    first_innings_total: dict[str, int] = {}
    for r in records:
        if r.innings == 1:
            first_innings_total[r.match_id] = (
                first_innings_total.get(r.match_id, 0) + r.total_runs
            )
    out: list[tuple[BallRecord, ContextBucket] | None] = [None] * len(records)
    tally_key: tuple[str, int] | None = None
    wickets_down = 0
    runs_scored = 0
    for i in order:
        r = records[i]
        if (r.match_id, r.innings) != tally_key:
            tally_key = (r.match_id, r.innings)
            wickets_down = 0
            runs_scored = 0
        required_rate = None
        if r.innings == 2 and r.match_id in first_innings_total:
            target = first_innings_total[r.match_id] + 1
            runs_needed = target - runs_scored
            balls_bowled = r.over * BALLS_PER_OVER + (r.ball_in_over - 1)
            balls_left = max(INNINGS_BALLS - balls_bowled, 1)
            if runs_needed <= 0:
                required_rate = 0.0
            else:
                required_rate = runs_needed * BALLS_PER_OVER / balls_left
        bucket = ContextBucket(
            phase=phase_of_over(r.over),
            wickets_band=wickets_band_of(wickets_down),
            required_rate_band=rate_band_of(required_rate),
        )
        out[i] = (r, bucket)
        wickets_down += 1 if r.wicket else 0
        runs_scored += r.total_runs
    return out  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# estimation


@dataclass(frozen=True)
class EstimationConfig:
    smoothing_alpha: float = 1.0
    min_samples: int = 50

    def __post_init__(self):
        if self.smoothing_alpha < 0:
            raise ValueError("smoothing_alpha must be >= 0")
        if self.min_samples < 0:
            raise ValueError("min_samples must be >= 0")


def outcome_of(record: BallRecord) -> BallOutcome:
    """Map a delivery to the model support.

    Wickets win regardless of runs; otherwise total runs (batter plus
    extras) with 5 folded to 4 and anything beyond 6 capped at 6.
    """
    if record.wicket:
        return BallOutcome.WICKET
    total = record.total_runs
    if total == 5:
        total = 4
    elif total > 6:
        total = 6
    return BallOutcome(str(total))


@dataclass(frozen=True)
class DistributionEstimate:
    """Estimated baseline plus the provenance the caller may care about."""

    distribution: OutcomeDistribution
    bucket_samples: int
    substituted_global: bool


def _smoothed(counts: Mapping[BallOutcome, int], total: int, alpha: float) -> OutcomeDistribution:
    if total == 0 and alpha == 0.0:
        raise ValueError("no samples and smoothing_alpha is 0: distribution undefined")
    denom = total + alpha * len(OUTCOME_ORDER)
    return OutcomeDistribution(
        tuple((counts.get(o, 0) + alpha) / denom for o in OUTCOME_ORDER)
    )


def estimate_outcome_distribution(
    records: Sequence[BallRecord], bucket: ContextBucket, config: EstimationConfig
) -> DistributionEstimate:
    """Smoothed outcome baseline for one context bucket.

    Thin buckets (fewer than min_samples deliveries) substitute the
    all-records global estimate; the substitution is flagged on the
    result rather than hidden.
    """
    assigned = bucketize(records)
    in_bucket = [outcome_of(r) for r, b in assigned if b == bucket]
    if len(in_bucket) >= config.min_samples and in_bucket:
        counts: dict[BallOutcome, int] = {}
        for o in in_bucket:
            counts[o] = counts.get(o, 0) + 1
        return DistributionEstimate(
            distribution=_smoothed(counts, len(in_bucket), config.smoothing_alpha),
            bucket_samples=len(in_bucket),
            substituted_global=False,
        )
    counts = {}
    for r in records:
        o = outcome_of(r)
        counts[o] = counts.get(o, 0) + 1
    return DistributionEstimate(
        distribution=_smoothed(counts, len(records), config.smoothing_alpha),
        bucket_samples=len(in_bucket),
        substituted_global=True,
    )


@dataclass(frozen=True)
class EstimationResult:
    """A data-estimated transition model plus how it was obtained."""

    model: TransitionModel
    config: EstimationConfig
    records_used: int
    bucket_samples: Mapping[str, int]
    substituted_buckets: tuple[str, ...]


def _rows_from_baseline(baseline: OutcomeDistribution) -> dict[BattingAction, OutcomeDistribution]:
    return {a: tilt_distribution(baseline, ACTION_TILTS[a]) for a in ACTION_ORDER}


def estimate_transition_model(
    records: Sequence[BallRecord], config: EstimationConfig
) -> EstimationResult:
    """Estimate a full transition model from cleaned records.

    The global baseline drives the model's main rows; every bucket with
    at least min_samples deliveries contributes a context override keyed
    by its bucket key. Thinner buckets are listed as substituted and
    served by the global rows.
    """
    if not records:
        raise ValueError("cannot estimate a model from zero records")
    assigned = bucketize(records)
    global_counts: dict[BallOutcome, int] = {}
    per_bucket: dict[str, dict[BallOutcome, int]] = {}
    for r, bucket in assigned:
        o = outcome_of(r)
        global_counts[o] = global_counts.get(o, 0) + 1
        bc = per_bucket.setdefault(bucket.key, {})
        bc[o] = bc.get(o, 0) + 1
    baseline = _smoothed(global_counts, len(records), config.smoothing_alpha)
    overrides: dict[str, dict[BattingAction, OutcomeDistribution]] = {}
    samples: dict[str, int] = {}
    substituted: list[str] = []
    for key in sorted(per_bucket):
        n = sum(per_bucket[key].values())
        samples[key] = n
        if n >= config.min_samples:
            overrides[key] = _rows_from_baseline(
                _smoothed(per_bucket[key], n, config.smoothing_alpha)
            )
        else:
            substituted.append(key)
    model = TransitionModel(
        rows=_rows_from_baseline(baseline),
        context_key="global",
        context_overrides=overrides,
    )
    return EstimationResult(
        model=model,
        config=config,
        records_used=len(records),
        bucket_samples=samples,
        substituted_buckets=tuple(substituted),
    )


# ---------------------------------------------------------------------------
# Naive Bayes


UNKNOWN_VALUE = "__unknown__"


@dataclass(frozen=True)
class NaiveBayesModel:
    """Categorical Naive Bayes with an explicit unknown-value slot per
    feature. conditionals[feature][class][value] -> probability."""

    classes: tuple[str, ...]
    class_priors: Mapping[str, float]
    feature_names: tuple[str, ...]
    conditionals: Mapping[str, Mapping[str, Mapping[str, float]]]


def train_naive_bayes(
    examples: Sequence[tuple[Mapping[str, str], str]], smoothing_alpha: float = 1.0
) -> NaiveBayesModel:
    """Fit priors and per-feature conditionals with additive smoothing.

    alpha applies to priors and conditionals alike; alpha = 0 is the pure
    maximum-likelihood fit. Every example must carry the same feature
    names. Each feature's vocabulary gains one reserved unknown slot so
    unseen values at classification time have defined (possibly zero)
    probability.
    """
    if not examples:
        raise ValueError("cannot train on an empty example list")
    if smoothing_alpha < 0:
        raise ValueError("smoothing_alpha must be >= 0")
    feature_names = tuple(sorted(examples[0][0]))
    for feats, _ in examples:
        if tuple(sorted(feats)) != feature_names:
            raise ValueError("all examples must share the same feature names")
    labels = sorted({label for _, label in examples})
    label_counts = {c: 0 for c in labels}
    for _, label in examples:
        label_counts[label] += 1
    n = len(examples)
    denom = n + smoothing_alpha * len(labels)
    priors = {c: (label_counts[c] + smoothing_alpha) / denom for c in labels}

    conditionals: dict[str, dict[str, dict[str, float]]] = {}
    for f in feature_names:
        vocab = sorted({feats[f] for feats, _ in examples})
        slots = vocab + [UNKNOWN_VALUE]
        table: dict[str, dict[str, float]] = {}
        for c in labels:
            counts = {v: 0 for v in slots}
            for feats, label in examples:
                if label == c:
                    counts[feats[f]] += 1
            row_denom = label_counts[c] + smoothing_alpha * len(slots)
            if row_denom == 0:
                raise ValueError(f"class {c!r} has no examples and no smoothing")
            table[c] = {v: (counts[v] + smoothing_alpha) / row_denom for v in slots}
        conditionals[f] = table
    return NaiveBayesModel(
        classes=tuple(labels),
        class_priors=priors,
        feature_names=feature_names,
        conditionals=conditionals,
    )


def classify_naive_bayes(
    model: NaiveBayesModel, features: Mapping[str, str]
) -> dict[str, float]:
    """Posterior over classes given (a subset of) the model's features.

    Unseen feature values use the reserved unknown slot. If the evidence
    has zero likelihood under every class (possible only with alpha = 0)
    the priors are returned: zero evidence discriminates nothing.
    Feature names the model has never seen are an error.
    """
    unknown_names = set(features) - set(model.feature_names)
    if unknown_names:
        raise ValueError(f"unknown feature names: {sorted(unknown_names)}")
    scores: dict[str, float] = {}
    for c in model.classes:
        log_score = math.log(model.class_priors[c]) if model.class_priors[c] > 0 else -math.inf
        for f, v in features.items():
            row = model.conditionals[f][c]
            p = row.get(v, row[UNKNOWN_VALUE])
            log_score += math.log(p) if p > 0 else -math.inf
        scores[c] = log_score
    peak = max(scores.values())
    if peak == -math.inf:
        return dict(model.class_priors)
    weights = {c: math.exp(s - peak) for c, s in scores.items()}
    total = sum(weights.values())
    return {c: w / total for c, w in weights.items()}
