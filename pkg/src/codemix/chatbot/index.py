"""Hierarchical document index: parent chunks subdivided into leaf chunks.

Sizes are measured in whitespace-delimited word units. Splitting prefers
sentence boundaries within the size budget and never overlaps, so each
parent's text is exactly the concatenation of its children's texts; that
reassembly property is validated on build and on load.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional

DEFAULT_LEAF_SIZE = 512
DEFAULT_PARENT_SIZE = 2048

_TERMINAL_CHARS = ".!?"
_CLOSING_CHARS = "\"')]}’”»"


class IndexingError(ValueError):
    """Index construction or persistence problem."""


class NodeLevel(str, Enum):
    PARENT = "parent"
    LEAF = "leaf"


@dataclass(frozen=True)
class IndexNode:
    id: str
    level: NodeLevel
    text: str
    position: int
    parent_id: Optional[str] = None
    child_ids: tuple = ()

    def __post_init__(self):
        if self.level is NodeLevel.LEAF and self.parent_id is None:
            raise IndexingError(f"leaf {self.id} has no parent")
        if self.level is NodeLevel.PARENT and self.parent_id is not None:
            raise IndexingError(f"parent {self.id} cannot itself have a parent")
        if self.level is NodeLevel.LEAF and self.child_ids:
            raise IndexingError(f"leaf {self.id} cannot have children")

    @property
    def word_count(self) -> int:
        return len(self.text.split())

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "level": self.level.value,
            "text": self.text,
            "position": self.position,
            "parent_id": self.parent_id,
            "child_ids": list(self.child_ids),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "IndexNode":
        return cls(id=data["id"], level=NodeLevel(data["level"]),
                   text=data["text"], position=data["position"],
                   parent_id=data.get("parent_id"),
                   child_ids=tuple(data.get("child_ids", ())))


@dataclass
class Index:
    nodes: dict
    parent_order: tuple
    leaf_order: tuple
    leaf_size: int
    parent_size: int

    @property
    def parents(self) -> list:
        return [self.nodes[i] for i in self.parent_order]

    @property
    def leaves(self) -> list:
        return [self.nodes[i] for i in self.leaf_order]

    def node(self, node_id: str) -> IndexNode:
        return self.nodes[node_id]

    def validate(self) -> None:
        for leaf in self.leaves:
            parent = self.nodes.get(leaf.parent_id)
            if parent is None or parent.level is not NodeLevel.PARENT:
                raise IndexingError(f"leaf {leaf.id} has a dangling parent link")
            if leaf.word_count > self.leaf_size:
                raise IndexingError(f"leaf {leaf.id} exceeds {self.leaf_size} words")
        for parent in self.parents:
            if parent.word_count > self.parent_size:
                raise IndexingError(
                    f"parent {parent.id} exceeds {self.parent_size} words")
            children = [self.nodes[c] for c in parent.child_ids]
            if not children:
                raise IndexingError(f"parent {parent.id} has no children")
            if any(c.parent_id != parent.id for c in children):
                raise IndexingError(f"parent {parent.id} child links inconsistent")
            if "".join(c.text for c in children) != parent.text:
                raise IndexingError(
                    f"children of {parent.id} do not reassemble its text")

    def save(self, directory) -> Path:
        out = Path(directory)
        nodes_dir = out / "nodes"
        nodes_dir.mkdir(parents=True, exist_ok=True)
        manifest = {
            "format": 1,
            "leaf_size": self.leaf_size,
            "parent_size": self.parent_size,
            "parent_order": list(self.parent_order),
            "leaf_order": list(self.leaf_order),
        }
        (out / "manifest.json").write_text(
            json.dumps(manifest, ensure_ascii=False, indent=2, sort_keys=True)
            + "\n", encoding="utf-8")
        for node in self.nodes.values():
            (nodes_dir / f"{node.id}.json").write_text(
                json.dumps(node.to_dict(), ensure_ascii=False, sort_keys=True)
                + "\n", encoding="utf-8")
        return out

    @classmethod
    def load(cls, directory) -> "Index":
        root = Path(directory)
        manifest_path = root / "manifest.json"
        if not manifest_path.exists():
            raise IndexingError(f"no manifest.json under {root}")
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        nodes = {}
        for path in sorted((root / "nodes").glob("*.json")):
            node = IndexNode.from_dict(json.loads(path.read_text(encoding="utf-8")))
            nodes[node.id] = node
        index = cls(nodes=nodes,
                    parent_order=tuple(manifest["parent_order"]),
                    leaf_order=tuple(manifest["leaf_order"]),
                    leaf_size=manifest["leaf_size"],
                    parent_size=manifest["parent_size"])
        index.validate()
        return index


def _word_spans(text: str) -> list:
    return [(m.start(), m.end()) for m in re.finditer(r"\S+", text)]


def _sentence_groups(text: str, spans) -> list:
    """Group word indices into sentence-ish units.

    A group ends after a word whose final character (quotes aside) terminates
    a sentence, or before a blank line; trailing unterminated text forms a
    final group.
    """
    groups, current = [], []
    for i, (start, end) in enumerate(spans):
        current.append(i)
        word = text[start:end].rstrip(_CLOSING_CHARS)
        gap = text[end:spans[i + 1][0]] if i + 1 < len(spans) else ""
        if (word and word[-1] in _TERMINAL_CHARS) or "\n\n" in gap:
            groups.append(current)
            current = []
    if current:
        groups.append(current)
    return groups


def _pack(groups, limit: int) -> list:
    """Greedily pack sentence groups into chunks of at most `limit` words.

    Groups longer than the limit are hard-split at word boundaries; other
    groups are never broken.
    """
    packs, current, size = [], [], 0
    for group in groups:
        pieces = ([group] if len(group) <= limit
                  else [group[i:i + limit] for i in range(0, len(group), limit)])
        for piece in pieces:
            if current and size + len(piece) > limit:
                packs.append(current)
                current, size = [], 0
            current.append(piece)
            size += len(piece)
    if current:
        packs.append(current)
    return packs


def build_index(document: str, leaf_size: int = DEFAULT_LEAF_SIZE,
                parent_size: int = DEFAULT_PARENT_SIZE) -> Index:
    """Chunk a document into parents of <= parent_size words, each partitioned
    into leaves of <= leaf_size words, preferring sentence boundaries."""
    if not document or not document.strip():
        raise IndexingError("document is empty")
    if leaf_size < 1 or parent_size < 1:
        raise IndexingError("chunk sizes must be positive")
    if leaf_size >= parent_size:
        raise IndexingError("leaf_size must be smaller than parent_size")

    spans = _word_spans(document)
    groups = _sentence_groups(document, spans)
    parent_packs = _pack(groups, parent_size)

    nodes = {}
    parent_order, leaf_order = [], []
    leaf_counter = 0
    for p_idx, parent_groups in enumerate(parent_packs):
        parent_id = f"p{p_idx:04d}"
        parent_words = [w for g in parent_groups for w in g]
        parent_start = spans[parent_words[0]][0]
        parent_end = spans[parent_words[-1]][1]

        leaf_packs = _pack(parent_groups, leaf_size)
        # each leaf's span runs to the start of the next leaf so that the
        # children tile the parent text exactly, interior whitespace included
        starts = [spans[pack[0][0]][0] for pack in leaf_packs]
        ends = starts[1:] + [parent_end]
        child_ids = []
        for pack, start, end in zip(leaf_packs, starts, ends):
            leaf_id = f"l{leaf_counter:04d}"
            leaf_counter += 1
            child_ids.append(leaf_id)
            nodes[leaf_id] = IndexNode(
                id=leaf_id, level=NodeLevel.LEAF,
                text=document[start:end], position=pack[0][0],
                parent_id=parent_id)
            leaf_order.append(leaf_id)
        nodes[parent_id] = IndexNode(
            id=parent_id, level=NodeLevel.PARENT,
            text=document[parent_start:parent_end],
            position=parent_words[0], child_ids=tuple(child_ids))
        parent_order.append(parent_id)

    index = Index(nodes=nodes, parent_order=tuple(parent_order),
                  leaf_order=tuple(leaf_order), leaf_size=leaf_size,
                  parent_size=parent_size)
    index.validate()
    return index
