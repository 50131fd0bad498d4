"""Gazetteer-backed resolution of the U.S. state where a reported incident
occurred.

Matching is whole-token: gazetteer names are tokenized, the article text is
scanned for n-gram occurrences, matches contained in a longer overlapping
match are suppressed, and the survivors are ranked by priority class
(state name > city > institute), then name length, then earliest position.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping

from .exceptions import InvalidArgumentError

UNKNOWN_STATE = "UNKNOWN"

US_STATE_CODES = frozenset(
    {
        "AL", "AK", "AZ", "AR", "CA", "CO", "CT", "DE", "FL", "GA",
        "HI", "ID", "IL", "IN", "IA", "KS", "KY", "LA", "ME", "MD",
        "MA", "MI", "MN", "MS", "MO", "MT", "NE", "NV", "NH", "NJ",
        "NM", "NY", "NC", "ND", "OH", "OK", "OR", "PA", "RI", "SC",
        "SD", "TN", "TX", "UT", "VT", "VA", "WA", "WV", "WI", "WY",
        "DC",
    }
)

PRIORITY_STATE_NAME = 3
PRIORITY_CITY = 2
PRIORITY_INSTITUTE = 1

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def _tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class GazetteerEntry:
    name: str
    state: str
    priority: int


@dataclass(frozen=True)
class Gazetteer:
    """Normalized place/institute names mapped to state codes."""

    entries: Mapping[tuple[str, ...], GazetteerEntry]
    max_tokens: int

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class Resolution:
    state: str
    matched_name: str
    score: float


def bundled_gazetteer_path() -> Path:
    """Path of the mini-gazetteer shipped with the package
    (state names, ~200 cities, a few institutes)."""
    return Path(str(resources.files("crimecast").joinpath("data", "gazetteer.tsv")))


def load_gazetteer(path: str | Path) -> Gazetteer:
    """Load `name <TAB> state_code <TAB> priority` rows.

    Duplicate names keep the higher-priority entry (first wins on equal
    priority); malformed rows and unknown state codes are reported with their
    line numbers and skipped.
    """
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise InvalidArgumentError(f"cannot read gazetteer {path}: {exc}") from exc
    entries: dict[tuple[str, ...], GazetteerEntry] = {}
    max_tokens = 1
    for lineno, line in enumerate(lines, start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            warnings.warn(f"{path}:{lineno}: malformed row (expected 3 tab-separated fields)", stacklevel=2)
            continue
        name, state, raw_priority = (p.strip() for p in parts)
        tokens = tuple(_tokenize(name))
        if not tokens:
            warnings.warn(f"{path}:{lineno}: empty name", stacklevel=2)
            continue
        state = state.upper()
        if state not in US_STATE_CODES:
            warnings.warn(f"{path}:{lineno}: unknown state code {state!r}", stacklevel=2)
            continue
        try:
            priority = int(raw_priority)
        except ValueError:
            warnings.warn(f"{path}:{lineno}: priority must be an integer", stacklevel=2)
            continue
        if priority not in (PRIORITY_INSTITUTE, PRIORITY_CITY, PRIORITY_STATE_NAME):
            warnings.warn(f"{path}:{lineno}: priority must be 1, 2, or 3", stacklevel=2)
            continue
        existing = entries.get(tokens)
        if existing is None or priority > existing.priority:
            entries[tokens] = GazetteerEntry(name=name, state=state, priority=priority)
        max_tokens = max(max_tokens, len(tokens))
    if not entries:
        raise InvalidArgumentError(f"gazetteer {path} has no valid rows")
    return Gazetteer(entries=entries, max_tokens=max_tokens)


def resolve_state(text: str, gazetteer: Gazetteer) -> Resolution:
    """Resolve the state for an article text, or UNKNOWN when nothing matches."""
    if not text or not text.strip():
        raise InvalidArgumentError("text must be nonempty")
    tokens = _tokenize(text)
    candidates: list[tuple[int, int, GazetteerEntry]] = []
    for start in range(len(tokens)):
        for length in range(1, min(gazetteer.max_tokens, len(tokens) - start) + 1):
            entry = gazetteer.entries.get(tuple(tokens[start : start + length]))
            if entry is not None:
                candidates.append((start, start + length, entry))
    if not candidates:
        return Resolution(UNKNOWN_STATE, "", 0.0)

    # Longest match wins on overlap, so "Kansas City" suppresses "Kansas".
    candidates.sort(key=lambda c: (-(c[1] - c[0]), -c[2].priority, c[0]))
    kept: list[tuple[int, int, GazetteerEntry]] = []
    for cand in candidates:
        if any(cand[0] < other[1] and other[0] < cand[1] for other in kept):
            continue
        kept.append(cand)

    kept.sort(key=lambda c: (-c[2].priority, -(c[1] - c[0]), -len(c[2].name), c[0]))
    start, end, entry = kept[0]
    return Resolution(entry.state, entry.name, float(entry.priority))
