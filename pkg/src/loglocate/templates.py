"""Online log-template mining with a fixed-depth parse tree.

Raw lines are masked, tokenized on whitespace, and routed through a tree
keyed on token count and leading tokens. Leaves hold template clusters; a
line joins the best cluster when the token-overlap similarity clears the
configured threshold, otherwise it founds a new template. Positions where a
matched line disagrees with its template degrade to wildcards, so a
template's wildcard set only ever grows and a line once matched keeps
matching later versions of its template.

A line's masked form is memoized to its event id on first assignment. The
memo is first-class miner state (it is what makes repeated lines map to the
same id even after unrelated templates mutate) and is persisted in the
catalog file alongside the templates.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from sklearn.base import BaseEstimator

from .base import OVERFLOW_EVENT, RESERVED_FLOOR, DataFormatError, EventSequence
from .corpus import LabeledCorpus

WILDCARD = "<*>"
_EMPTY_TOKEN = "<EMPTY>"  # stands in for lines that are empty after masking

# Masking presets for the HDFS corpus: block ids, IPv4(:port), bare integers.
# Masks are configuration, not code; order matters (block ids first, or the
# integer mask would chew through their digit tails).
HDFS_MASKS: tuple[tuple[str, str], ...] = (
    (r"blk_-?\d+", WILDCARD),
    (r"(\d+\.){3}\d+(:\d+)?", WILDCARD),
    (r"(?<![\w.])-?\d+(?![\w.])", WILDCARD),
)

_CATALOG_MAGIC = "#catalog"
_CATALOG_VERSION = "v1"
_MEMO_MARKER = "#seen"


@dataclass
class Template:
    id: int
    tokens: list[str]
    match_count: int = 0

    def render(self) -> str:
        return " ".join(self.tokens)


class _Node:
    __slots__ = ("children", "clusters")

    def __init__(self) -> None:
        self.children: dict[str, _Node] = {}
        self.clusters: list[int] = []


def _has_digits(token: str) -> bool:
    return any(ch.isdigit() for ch in token)


class TemplateMiner(BaseEstimator):
    """Single-writer online miner; freeze() yields a read-only, thread-safe matcher.

    Parameters
    ----------
    tree_depth : total tree depth including root and leaf levels (>= 3), so
        ``tree_depth - 2`` leading tokens key the internal levels.
    similarity_threshold : minimum token-overlap similarity in (0, 1] for a
        line to join an existing template. Wildcard positions count as
        matching, which is what keeps previously matched lines matching.
    max_children : per-node fan-out cap; the last slot is reserved for the
        wildcard branch.
    masks : ordered (pattern, replacement) pairs applied before tokenization.
    frozen_policy : what a frozen miner does with an unmatched line:
        "overflow" assigns the reserved overflow id, "reject" raises.
    """

    def __init__(
        self,
        tree_depth: int = 4,
        similarity_threshold: float = 0.4,
        max_children: int = 100,
        masks: Sequence[tuple[str, str]] = (),
        frozen_policy: str = "overflow",
    ):
        self.tree_depth = tree_depth
        self.similarity_threshold = similarity_threshold
        self.max_children = max_children
        self.masks = tuple(masks)
        self.frozen_policy = frozen_policy

    # -- state ---------------------------------------------------------

    def _ensure_state(self) -> None:
        if hasattr(self, "templates_"):
            return
        if self.tree_depth < 3:
            raise ValueError("tree_depth must be >= 3")
        if not 0.0 < self.similarity_threshold <= 1.0:
            raise ValueError("similarity_threshold must be in (0, 1]")
        if self.max_children < 2:
            raise ValueError("max_children must be >= 2")
        if self.frozen_policy not in ("overflow", "reject"):
            raise ValueError("frozen_policy must be 'overflow' or 'reject'")
        self.templates_: list[Template] = []
        self.frozen_: bool = False
        self._root: dict[int, _Node] = {}
        self._seen: dict[str, int] = {}
        self._compiled_masks = [(re.compile(p), r) for p, r in self.masks]

    @property
    def vocabulary_size(self) -> int:
        return len(self.templates_) if hasattr(self, "templates_") else 0

    # -- core parsing ----------------------------------------------------

    def parse_line(self, text: str) -> int:
        """Assign ``text`` to a template, creating one if necessary."""
        self._ensure_state()
        if "\n" in text or "\r" in text:
            raise ValueError("log lines must not contain line terminators")
        masked = text
        for pattern, repl in self._compiled_masks:
            masked = pattern.sub(repl, masked)

        known = self._seen.get(masked)
        if known is not None:
            if not self.frozen_:
                self.templates_[known].match_count += 1
            return known

        tokens = masked.split() or [_EMPTY_TOKEN]
        leaf = self._search(tokens)
        best_id, best_sim = self._best_cluster(leaf, tokens)

        if best_id is not None and best_sim >= self.similarity_threshold:
            if self.frozen_:
                return best_id
            template = self.templates_[best_id]
            for i, token in enumerate(template.tokens):
                if token != WILDCARD and token != tokens[i]:
                    template.tokens[i] = WILDCARD
            template.match_count += 1
            self._seen[masked] = best_id
            return best_id

        if self.frozen_:
            if self.frozen_policy == "overflow":
                return OVERFLOW_EVENT
            raise ValueError(f"frozen miner rejects unknown line: {text!r}")

        new_id = len(self.templates_)
        if new_id >= RESERVED_FLOOR:
            raise OverflowError("template id space exhausted")
        self.templates_.append(Template(new_id, list(tokens), match_count=1))
        self._insert(tokens, new_id)
        self._seen[masked] = new_id
        return new_id

    def _search(self, tokens: list[str]) -> _Node | None:
        node = self._root.get(len(tokens))
        if node is None:
            return None
        for token in tokens[: self.tree_depth - 2]:
            child = node.children.get(token)
            if child is None:
                child = node.children.get(WILDCARD)
            if child is None:
                return None
            node = child
        return node

    def _best_cluster(self, leaf: _Node | None, tokens: list[str]) -> tuple[int | None, float]:
        if leaf is None:
            return None, 0.0
        best_id, best_sim = None, -1.0
        for tid in leaf.clusters:
            sim = _similarity(self.templates_[tid].tokens, tokens)
            if sim > best_sim:  # ties keep the earliest template id
                best_id, best_sim = tid, sim
        return best_id, best_sim

    def _insert(self, tokens: list[str], template_id: int) -> None:
        length = len(tokens)
        node = self._root.get(length)
        if node is None:
            node = self._root[length] = _Node()
        for token in tokens[: self.tree_depth - 2]:
            child = node.children.get(token)
            if child is None:
                if token == WILDCARD or _has_digits(token):
                    child = node.children.get(WILDCARD)
                    if child is None:
                        child = node.children[WILDCARD] = _Node()
                elif WILDCARD in node.children:
                    if len(node.children) < self.max_children:
                        child = node.children[token] = _Node()
                    else:
                        child = node.children[WILDCARD]
                elif len(node.children) + 1 < self.max_children:
                    child = node.children[token] = _Node()
                else:
                    child = node.children.get(WILDCARD)
                    if child is None:
                        child = node.children[WILDCARD] = _Node()
            node = child
        node.clusters.append(template_id)

    # -- estimator surface -------------------------------------------------

    def fit(self, lines: Iterable[str], y=None) -> "TemplateMiner":
        for line in lines:
            self.parse_line(line)
        return self

    def transform(self, lines: Iterable[str]) -> list[int]:
        """Map lines to event ids, mining new templates as they appear."""
        return [self.parse_line(line) for line in lines]

    def fit_transform(self, lines: Iterable[str], y=None) -> list[int]:
        return self.transform(lines)

    def freeze(self) -> "TemplateMiner":
        """Stop mining: lookup-only parsing, safe for concurrent readers."""
        self._ensure_state()
        self.frozen_ = True
        return self

    # -- persistence -----------------------------------------------------

    def save(self, path) -> None:
        """Write the catalog: header, one template line per template, memo section."""
        self._ensure_state()
        config = json.dumps(
            {
                "tree_depth": self.tree_depth,
                "similarity_threshold": self.similarity_threshold,
                "max_children": self.max_children,
                "masks": [list(m) for m in self.masks],
                "frozen_policy": self.frozen_policy,
            },
            sort_keys=True,
        )
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"{_CATALOG_MAGIC} {_CATALOG_VERSION} {config}\n")
            for t in self.templates_:
                fh.write(f"{t.id}\t{t.match_count}\t{t.render()}\n")
            fh.write(f"{_MEMO_MARKER} {len(self._seen)}\n")
            for masked, tid in self._seen.items():
                fh.write(f"{tid}\t{masked}\n")

    @classmethod
    def load(cls, path) -> "TemplateMiner":
        """Rebuild a miner that parses exactly like the saved one and keeps mining."""
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n")
            parts = header.split(" ", 2)
            if len(parts) != 3 or parts[0] != _CATALOG_MAGIC:
                raise DataFormatError(f"not a catalog file: {path}")
            if parts[1] != _CATALOG_VERSION:
                raise DataFormatError(f"unsupported catalog version {parts[1]!r}")
            try:
                config = json.loads(parts[2])
                miner = cls(
                    tree_depth=config["tree_depth"],
                    similarity_threshold=config["similarity_threshold"],
                    max_children=config["max_children"],
                    masks=[tuple(m) for m in config["masks"]],
                    frozen_policy=config["frozen_policy"],
                )
                miner._ensure_state()
            except (KeyError, TypeError, ValueError) as exc:
                raise DataFormatError(f"bad catalog header config: {exc}") from exc

            memo_count = None
            for raw in fh:
                line = raw.rstrip("\n")
                if line.startswith(_MEMO_MARKER):
                    try:
                        memo_count = int(line.split(" ", 1)[1])
                    except (IndexError, ValueError):
                        raise DataFormatError(f"malformed memo marker: {line!r}") from None
                    break
                fields = line.split("\t", 2)
                if len(fields) != 3:
                    raise DataFormatError(f"malformed template line: {line!r}")
                try:
                    tid, count = int(fields[0]), int(fields[1])
                except ValueError:
                    raise DataFormatError(f"malformed template line: {line!r}") from None
                if tid != len(miner.templates_):
                    raise DataFormatError(f"template ids not dense at {tid}")
                tokens = fields[2].split(" ")
                miner.templates_.append(Template(tid, tokens, count))
                miner._insert(tokens, tid)
            if memo_count is None:
                raise DataFormatError("catalog file is missing its memo section")
            for raw in fh:
                fields = raw.rstrip("\n").split("\t", 1)
                if len(fields) != 2:
                    raise DataFormatError(f"malformed memo line: {raw!r}")
                try:
                    tid = int(fields[0])
                except ValueError:
                    raise DataFormatError(f"malformed memo line: {raw!r}") from None
                if not 0 <= tid < len(miner.templates_):
                    raise DataFormatError(f"memo references unknown template {tid}")
                miner._seen[fields[1]] = tid
            if len(miner._seen) != memo_count:
                raise DataFormatError(
                    f"memo section: expected {memo_count} entries, got {len(miner._seen)}"
                )
        return miner


def _similarity(template_tokens: list[str], tokens: list[str]) -> float:
    # Positionally equal tokens count; wildcard positions always count.
    same = 0
    for t, w in zip(template_tokens, tokens):
        if t == WILDCARD or t == w:
            same += 1
    return same / len(tokens)


def parse_corpus(
    corpus: LabeledCorpus, miner: TemplateMiner
) -> tuple[list[EventSequence], list[Template]]:
    """Parse every record in corpus order; returns labeled event sequences and
    the full template catalog (its length is the unique-event count)."""
    miner._ensure_state()
    sequences = []
    for session in corpus.sequences:
        events = [miner.parse_line(record.text) for record in session.records]
        sequences.append(EventSequence(session.session_id, events, session.label))
    return sequences, miner.templates_
