"""Grammatical profiles: frequency vectors of morphological features and
dependency relations per target per period, and the cosine-based change
scores computed from them."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Period, Sentence, TargetLexicon, UsageIndex

log = logging.getLogger(__name__)

SYNTAX_CATEGORY = "SYNTAX"


class ProfileKind(str, Enum):
    MORPH = "morph"
    SYNT = "synt"
    MORPHSYNT = "morphsynt"


@dataclass
class CategoryVector:
    """Counts of the values one grammatical category takes, e.g.
    ``Tense -> {Past: 42, Pres: 51}``."""

    category: str
    counts: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for value, count in self.counts.items():
            if count < 0:
                raise ValueError(
                    f"negative count {count!r} for {self.category}={value}"
                )

    def total(self) -> float:
        return sum(self.counts.values())

    def is_present(self) -> bool:
        return any(count > 0 for count in self.counts.values())

    def add(self, value: str, count: float = 1) -> None:
        self.counts[value] = self.counts.get(value, 0) + count


@dataclass
class GrammaticalProfile:
    """Per-period profile of one lemma: one count vector per observed
    morphological category plus the dependency-relation vector."""

    lemma: str
    period: Period
    morph: list[CategoryVector]
    synt: CategoryVector
    n_usages: int

    def __post_init__(self) -> None:
        if self.n_usages < 0:
            raise ValueError("n_usages must be nonnegative")
        for vector in self.morph:
            if vector.total() > self.n_usages:
                raise ValueError(
                    f"{self.lemma}/{self.period.value}: category "
                    f"{vector.category!r} counts {vector.total()} exceed "
                    f"{self.n_usages} usages"
                )
        if self.synt.total() != self.n_usages:
            raise ValueError(
                f"{self.lemma}/{self.period.value}: syntactic counts "
                f"{self.synt.total()} != {self.n_usages} usages"
            )

    def morph_by_category(self) -> dict[str, CategoryVector]:
        return {vector.category: vector for vector in self.morph}


def category_distance(a: CategoryVector, b: CategoryVector) -> float | None:
    """Cosine distance between two count vectors aligned on the union of
    their value keys (missing values count 0).

    Returns None when either vector is all-zero: the category is absent on
    one side, so the distance is undefined rather than 0 or 1.
    """
    keys = list(dict.fromkeys(list(a.counts) + list(b.counts)))
    dot = norm_a = norm_b = 0.0
    for key in keys:
        x = a.counts.get(key, 0.0)
        y = b.counts.get(key, 0.0)
        dot += x * y
        norm_a += x * x
        norm_b += y * y
    if norm_a == 0.0 or norm_b == 0.0:
        return None
    distance = 1.0 - dot / math.sqrt(norm_a * norm_b)
    return min(1.0, max(0.0, distance))


def score_profiles(
    p1: GrammaticalProfile,
    p2: GrammaticalProfile,
    kind: ProfileKind,
    min_count: float = 0,
) -> float | None:
    """Profile-based change score between two periods of the same lemma.

    MORPH takes the maximum cosine distance over morphological categories
    present in both profiles; SYNT is the distance between the two
    dependency-relation vectors; MORPHSYNT adds the syntactic vector as one
    more category before taking the maximum. Categories whose combined count
    across both periods falls below ``min_count`` are dropped. When no
    category is shared the score is undefined (None), never 0: a 0 would
    assert "no change" on no evidence.
    """
    if p1.lemma != p2.lemma:
        raise ValueError(f"profiles for different lemmas: {p1.lemma!r} vs {p2.lemma!r}")
    if p1.period == p2.period:
        raise ValueError("profiles must come from different periods")

    synt_distance = None
    if p1.synt.total() + p2.synt.total() >= min_count:
        synt_distance = category_distance(p1.synt, p2.synt)

    if kind is ProfileKind.SYNT:
        return synt_distance

    morph1 = p1.morph_by_category()
    morph2 = p2.morph_by_category()
    distances = []
    for category in morph1.keys() & morph2.keys():
        a, b = morph1[category], morph2[category]
        if a.total() + b.total() < min_count:
            continue
        distance = category_distance(a, b)
        if distance is not None:
            distances.append(distance)
    if kind is ProfileKind.MORPHSYNT and synt_distance is not None:
        distances.append(synt_distance)
    if not distances:
        return None
    return max(distances)


def build_profile(
    corpus: Sequence[Sentence],
    usage_index: UsageIndex,
    lemma: str,
    period: Period,
) -> GrammaticalProfile:
    """Build one profile by looking up the lemma's indexed occurrences in a
    materialized corpus."""
    if usage_index.period != period:
        raise ValueError(
            f"usage index covers {usage_index.period.value}, not {period.value}"
        )
    morph: dict[str, CategoryVector] = {}
    synt = CategoryVector(SYNTAX_CATEGORY)
    positions = usage_index.occurrences.get(lemma, [])
    for sentence_index, token_index in positions:
        token = corpus[sentence_index][token_index]
        for category, value in token.feats.items():
            morph.setdefault(category, CategoryVector(category)).add(value)
        synt.add(token.deprel)
    return GrammaticalProfile(
        lemma=lemma,
        period=period,
        morph=list(morph.values()),
        synt=synt,
        n_usages=len(positions),
    )


def build_profiles(
    sentences: Iterable[Sentence],
    lexicon: TargetLexicon,
    period: Period,
    case_fold: bool = False,
) -> dict[str, GrammaticalProfile]:
    """Build profiles for every lexicon entry in a single streaming pass.

    Equivalent to indexing usages and calling :func:`build_profile` per
    lemma, but never materializes the corpus.
    """
    key = (lambda s: s.casefold()) if case_fold else (lambda s: s)
    by_key = {key(entry.lemma): entry for entry in lexicon.entries}
    morph: dict[str, dict[str, CategoryVector]] = {
        entry.lemma: {} for entry in lexicon.entries
    }
    synt = {entry.lemma: CategoryVector(SYNTAX_CATEGORY) for entry in lexicon.entries}
    n_usages = {entry.lemma: 0 for entry in lexicon.entries}
    for sentence in sentences:
        for token in sentence:
            entry = by_key.get(key(token.lemma))
            if entry is None:
                continue
            if entry.pos_filter is not None and token.upos != entry.pos_filter:
                continue
            lemma = entry.lemma
            for category, value in token.feats.items():
                morph[lemma].setdefault(category, CategoryVector(category)).add(value)
            synt[lemma].add(token.deprel)
            n_usages[lemma] += 1
    profiles = {}
    for entry in lexicon.entries:
        lemma = entry.lemma
        if n_usages[lemma] == 0:
            log.warning("lemma %r has no usages in %s", lemma, period.value)
        profiles[lemma] = GrammaticalProfile(
            lemma=lemma,
            period=period,
            morph=list(morph[lemma].values()),
            synt=synt[lemma],
            n_usages=n_usages[lemma],
        )
    return profiles


def profile_to_json_dict(profile: GrammaticalProfile) -> dict:
    return {
        "lemma": profile.lemma,
        "period": profile.period.value,
        "n_usages": profile.n_usages,
        "morph": {v.category: dict(v.counts) for v in profile.morph},
        "synt": dict(profile.synt.counts),
    }


def profile_from_json_dict(data: Mapping) -> GrammaticalProfile:
    return GrammaticalProfile(
        lemma=data["lemma"],
        period=Period(data["period"]),
        morph=[
            CategoryVector(category, dict(counts))
            for category, counts in data["morph"].items()
        ],
        synt=CategoryVector(SYNTAX_CATEGORY, dict(data["synt"])),
        n_usages=data["n_usages"],
    )


def dump_profile(profile: GrammaticalProfile, directory: str | Path) -> Path:
    """Write one profile as `<lemma>.<period>.json` under ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{profile.lemma}.{profile.period.value}.json"
    path.write_text(
        json.dumps(profile_to_json_dict(profile), ensure_ascii=False, sort_keys=True)
        + "\n",
        encoding="utf-8",
    )
    return path
