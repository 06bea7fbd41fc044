"""Versioned document persistence.

Every artifact the package stores or serves (transition models, value
and policy tables, Q tables, pitch sets, belief snapshots, bundles) is a
JSON document with explicit ``schema_version`` and ``kind`` fields.

Serialization is canonical: keys in insertion order, two-space indent,
floats rendered with exactly 12 decimal places. The fixed float format
is why this module carries its own emitter: the stdlib encoder always
prints shortest-repr floats, which is platform-stable but diff-hostile
for tables (and cannot be overridden without private hooks). Parsing is
plain ``json.loads``. For any file this module wrote,
``dumps(loads(text)) == text`` byte for byte.
"""

from __future__ import annotations

import hashlib
import json
import math
from datetime import datetime, timezone
from typing import Any, Mapping

import numpy as np

from .match import (
    ACTION_ORDER,
    OUTCOME_ORDER,
    BattingAction,
    OutcomeDistribution,
    RewardSpec,
    TransitionModel,
)
from .solver import Bounds, PolicyTable, ValueTable

SCHEMA_VERSION = 1

_INDENT = "  "


def _emit(value: Any, out: list[str], depth: int) -> None:
    if value is None or value is True or value is False:
        out.append("null" if value is None else ("true" if value else "false"))
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=False))
    elif isinstance(value, int):
        out.append(repr(int(value)))
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"documents cannot hold non-finite floats: {value!r}")
        out.append(f"{value:.12f}")
    elif isinstance(value, Mapping):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        pad = _INDENT * (depth + 1)
        for i, (k, v) in enumerate(value.items()):
            if not isinstance(k, str):
                raise ValueError(f"document keys must be strings, got {k!r}")
            out.append(f"{pad}{json.dumps(k, ensure_ascii=False)}: ")
            _emit(v, out, depth + 1)
            out.append(",\n" if i < len(value) - 1 else "\n")
        out.append(_INDENT * depth + "}")
    elif isinstance(value, (list, tuple)):
        if not len(value):
            out.append("[]")
            return
        out.append("[\n")
        pad = _INDENT * (depth + 1)
        for i, v in enumerate(value):
            out.append(pad)
            _emit(v, out, depth + 1)
            out.append(",\n" if i < len(value) - 1 else "\n")
        out.append(_INDENT * depth + "]")
    else:
        raise ValueError(f"cannot serialize {type(value).__name__}: {value!r}")


def dumps(doc: Mapping[str, Any]) -> str:
    out: list[str] = []
    _emit(doc, out, 0)
    out.append("\n")
    return "".join(out)


def loads(text: str) -> dict:
    doc = json.loads(text)
    if not isinstance(doc, dict):
        raise ValueError("document root must be a JSON object")
    return doc


def dump(doc: Mapping[str, Any], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(dumps(doc))


def load(path) -> dict:
    with open(path, "r", encoding="utf-8") as f:
        return loads(f.read())


def expect_kind(doc: Mapping[str, Any], kind: str) -> None:
    got = doc.get("kind")
    if got != kind:
        raise ValueError(f"expected a {kind!r} document, got kind {got!r}")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {version!r} (supported: {SCHEMA_VERSION})")


def _header(kind: str) -> dict:
    return {"schema_version": SCHEMA_VERSION, "kind": kind}


# ---------------------------------------------------------------------------
# transition models


def _quantized_row(dist: OutcomeDistribution) -> dict:
    """Probabilities at the document's 12-decimal resolution.

    Independent rounding can shift the row sum by a few 1e-12 steps,
    which would make the written document unloadable. Quantize in exact
    integer picounits and hand the residual to the largest entry; rows
    already on the 12-decimal grid pass through unchanged.
    """
    tokens, units = [], []
    for o, p in dist.items():
        tokens.append(o.value)
        units.append(round(p * 1e12))
    units[units.index(max(units))] += 10**12 - sum(units)
    return {t: n / 1e12 for t, n in zip(tokens, units)}


def _rows_to_doc(rows: Mapping[BattingAction, OutcomeDistribution]) -> dict:
    return {a.name: _quantized_row(rows[a]) for a in ACTION_ORDER}


def _rows_from_doc(doc: Mapping[str, Any], where: str) -> dict:
    rows = {}
    for name, row in doc.items():
        try:
            action = BattingAction[name]
        except KeyError:
            raise ValueError(f"{where}: unknown action {name!r}") from None
        by_token = {}
        for token, p in row.items():
            matches = [o for o in OUTCOME_ORDER if o.value == token]
            if not matches:
                raise ValueError(f"{where}: unknown outcome token {token!r}")
            by_token[matches[0]] = float(p)
        rows[action] = OutcomeDistribution.from_map(by_token)
    return rows


def model_to_doc(model: TransitionModel) -> dict:
    doc = _header("transition_model")
    doc["context_key"] = model.context_key
    doc["rows"] = _rows_to_doc(model.rows)
    if model.context_overrides:
        doc["context_overrides"] = {
            key: _rows_to_doc(rows) for key, rows in sorted(model.context_overrides.items())
        }
    return doc


def model_from_doc(doc: Mapping[str, Any]) -> TransitionModel:
    expect_kind(doc, "transition_model")
    overrides = {
        key: _rows_from_doc(rows, f"context {key!r}")
        for key, rows in doc.get("context_overrides", {}).items()
    }
    return TransitionModel(
        rows=_rows_from_doc(doc["rows"], "rows"),
        context_key=doc.get("context_key", "global"),
        context_overrides=overrides,
    )


def model_hash(model: TransitionModel) -> str:
    """sha256 over the model's canonical serialized form."""
    return hashlib.sha256(dumps(model_to_doc(model)).encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# solved tables


def _bounds_to_doc(bounds: Bounds) -> dict:
    return {
        "max_runs": bounds.max_runs,
        "max_balls": bounds.max_balls,
        "max_wickets": bounds.max_wickets,
    }


def _bounds_from_doc(doc: Mapping[str, Any]) -> Bounds:
    b = Bounds(int(doc["max_runs"]), int(doc["max_balls"]), int(doc["max_wickets"]))
    b.validate()
    return b


def _reward_to_doc(reward: RewardSpec) -> dict:
    return {
        "win_reward": float(reward.win_reward),
        "loss_reward": float(reward.loss_reward),
        "per_wicket_penalty": float(reward.per_wicket_penalty),
    }


def _reward_from_doc(doc: Mapping[str, Any]) -> RewardSpec:
    return RewardSpec(
        win_reward=float(doc["win_reward"]),
        loss_reward=float(doc["loss_reward"]),
        per_wicket_penalty=float(doc["per_wicket_penalty"]),
    )


def value_table_to_doc(table: ValueTable) -> dict:
    doc = _header("value_table")
    doc["bounds"] = _bounds_to_doc(table.bounds)
    doc["reward"] = _reward_to_doc(table.reward)
    entries = {}
    r_max, b_max, w_max = table.bounds
    for r in range(r_max + 1):
        for b in range(b_max + 1):
            for w in range(w_max + 1):
                entries[f"{r},{b},{w}"] = float(table.values[r, b, w])
    doc["entries"] = entries
    return doc


def value_table_from_doc(doc: Mapping[str, Any]) -> ValueTable:
    expect_kind(doc, "value_table")
    bounds = _bounds_from_doc(doc["bounds"])
    reward = _reward_from_doc(doc["reward"])
    values = np.zeros((bounds.max_runs + 1, bounds.max_balls + 1, bounds.max_wickets + 1))
    seen = 0
    for key, v in doc["entries"].items():
        r, b, w = (int(part) for part in key.split(","))
        values[r, b, w] = float(v)
        seen += 1
    if seen != values.size:
        raise ValueError(f"value table has {seen} entries, bounds imply {values.size}")
    values.setflags(write=False)
    return ValueTable(bounds=bounds, reward=reward, values=values)


def policy_table_to_doc(policy: PolicyTable) -> dict:
    doc = _header("policy_table")
    doc["bounds"] = _bounds_to_doc(policy.bounds)
    entries = {}
    r_max, b_max, w_max = policy.bounds
    for r in range(1, r_max + 1):
        for b in range(1, b_max + 1):
            for w in range(1, w_max + 1):
                code = int(policy.actions[r, b, w])
                if code >= 0:
                    entries[f"{r},{b},{w}"] = BattingAction(code).name
    doc["entries"] = entries
    return doc


def policy_table_from_doc(doc: Mapping[str, Any]) -> PolicyTable:
    expect_kind(doc, "policy_table")
    bounds = _bounds_from_doc(doc["bounds"])
    actions = np.full(
        (bounds.max_runs + 1, bounds.max_balls + 1, bounds.max_wickets + 1), -1, dtype=np.int8
    )
    for key, name in doc["entries"].items():
        r, b, w = (int(part) for part in key.split(","))
        actions[r, b, w] = BattingAction[name].value
    actions.setflags(write=False)
    return PolicyTable(bounds=bounds, actions=actions)


def q_table_to_doc(table) -> dict:
    """Serialize an rl.QTable; every grid cell is written, terminal
    cells simply still hold initial_q with count 0."""
    doc = _header("q_table")
    doc["bounds"] = _bounds_to_doc(table.bounds)
    doc["initial_q"] = float(table.initial_q)
    entries = {}
    counts = {}
    r_max, b_max, w_max = table.bounds
    for r in range(r_max + 1):
        for b in range(b_max + 1):
            for w in range(w_max + 1):
                for a in ACTION_ORDER:
                    key = f"{r},{b},{w},{a.name}"
                    entries[key] = float(table.values[r, b, w, a])
                    counts[key] = int(table.counts[r, b, w, a])
    doc["entries"] = entries
    doc["visit_counts"] = counts
    return doc


def q_table_from_doc(doc: Mapping[str, Any]):
    from .rl import QTable

    expect_kind(doc, "q_table")
    bounds = _bounds_from_doc(doc["bounds"])
    initial_q = float(doc["initial_q"])
    shape = (
        bounds.max_runs + 1,
        bounds.max_balls + 1,
        bounds.max_wickets + 1,
        len(ACTION_ORDER),
    )
    values = np.full(shape, initial_q)
    counts = np.zeros(shape, dtype=np.int64)
    seen = 0
    for key, v in doc["entries"].items():
        r, b, w, name = key.split(",")
        idx = (int(r), int(b), int(w), BattingAction[name].value)
        values[idx] = float(v)
        counts[idx] = int(doc["visit_counts"][key])
        seen += 1
    if seen != values.size:
        raise ValueError(f"q table has {seen} entries, bounds imply {values.size}")
    if counts.min() < 0:
        raise ValueError("q table visit counts must be >= 0")
    values.setflags(write=False)
    counts.setflags(write=False)
    return QTable(bounds=bounds, initial_q=initial_q, values=values, counts=counts)


def pitch_set_to_doc(types) -> dict:
    """Serialize a sequence of pitch.PitchType, one model per type."""
    doc = _header("pitch_set")
    sections = {}
    for t in types:
        if t.name in sections:
            raise ValueError(f"duplicate pitch type name {t.name!r}")
        sections[t.name] = model_to_doc(t.model)
    if len(sections) < 2:
        raise ValueError("a pitch set needs at least 2 types")
    doc["types"] = sections
    return doc


def pitch_set_from_doc(doc: Mapping[str, Any]) -> tuple:
    from .pitch import PitchType

    expect_kind(doc, "pitch_set")
    types = tuple(
        PitchType(name=name, model=model_from_doc(section))
        for name, section in doc["types"].items()
    )
    if len(types) < 2:
        raise ValueError("a pitch set needs at least 2 types")
    return types


def belief_snapshot_to_doc(player_id: str, belief, observations_count: int) -> dict:
    """Serialize a player.NormalBelief with its bookkeeping."""
    if observations_count < 0:
        raise ValueError("observations_count must be >= 0")
    doc = _header("belief_snapshot")
    doc["player_id"] = str(player_id)
    doc["mean"] = float(belief.mean)
    doc["variance"] = float(belief.variance)
    doc["observations_count"] = int(observations_count)
    return doc


def belief_snapshot_from_doc(doc: Mapping[str, Any]) -> dict:
    from .player import NormalBelief

    expect_kind(doc, "belief_snapshot")
    count = int(doc["observations_count"])
    if count < 0:
        raise ValueError("observations_count must be >= 0")
    return {
        "player_id": str(doc["player_id"]),
        "belief": NormalBelief(mean=float(doc["mean"]), variance=float(doc["variance"])),
        "observations_count": count,
    }


# ---------------------------------------------------------------------------
# bundles


def bundle_to_doc(bundle) -> dict:
    """Serialize a ModelBundle (duck-typed to avoid an import cycle)."""
    doc = _header("bundle")
    doc["bundle_id"] = bundle.bundle_id
    doc["created_at"] = bundle.created_at
    doc["model_hash"] = bundle.model_hash
    doc["model"] = model_to_doc(bundle.model)
    doc["values"] = value_table_to_doc(bundle.values)
    doc["policy"] = policy_table_to_doc(bundle.policy)
    return doc


def bundle_parts_from_doc(doc: Mapping[str, Any]) -> dict:
    """Validate and decode a bundle document into its parts.

    Recomputes the model hash and refuses a document whose stored hash
    does not match (the bundle's tables would not belong to its model).
    """
    expect_kind(doc, "bundle")
    model = model_from_doc(doc["model"])
    stored = doc["model_hash"]
    actual = model_hash(model)
    if stored != actual:
        raise ValueError(
            f"bundle {doc.get('bundle_id')!r} model_hash mismatch: "
            f"stored {stored[:12]}..., computed {actual[:12]}..."
        )
    values = value_table_from_doc(doc["values"])
    policy = policy_table_from_doc(doc["policy"])
    if values.bounds != policy.bounds:
        raise ValueError("bundle value and policy tables disagree on bounds")
    return {
        "bundle_id": str(doc["bundle_id"]),
        "created_at": str(doc["created_at"]),
        "model": model,
        "model_hash": stored,
        "values": values,
        "policy": policy,
    }


def utc_now_iso() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
