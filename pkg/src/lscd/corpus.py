"""CoNLL-U corpus ingestion, target lexicons and usage indexing.

The parser is a streaming one: it holds at most one sentence in memory at a
time, so arbitrarily large corpora can be processed with bounded memory.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import IO, Iterable, Iterator, Mapping, Sequence, Union

log = logging.getLogger(__name__)

N_COLUMNS = 10


class Period(str, Enum):
    """The two corpus time slices being compared."""

    T1 = "t1"
    T2 = "t2"


class ConlluParseError(ValueError):
    """Malformed CoNLL-U input, carrying the 1-based line number."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


@dataclass
class ParseStats:
    """Counters filled in by :func:`read_conllu` (lenient mode records skips)."""

    sentences: int = 0
    tokens: int = 0
    skipped_lines: list[tuple[int, str]] = field(default_factory=list)


@dataclass(frozen=True)
class Token:
    """One syntactic word with the annotations used downstream.

    ``feats`` preserves the order of the FEATS column; keys and values are
    non-empty. ``deprel`` is ``"_"`` or a dependency relation label.
    """

    form: str
    lemma: str
    upos: str
    feats: Mapping[str, str]
    deprel: str
    sentence_index: int
    token_index: int


Sentence = list[Token]
Source = Union[str, Path, IO[str], IO[bytes], Iterable[str]]


def _iter_lines(source: Source) -> Iterator[str]:
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as handle:
            yield from handle
        return
    for line in source:
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        yield line


def parse_feats(column: str, line_number: int) -> dict[str, str]:
    """Parse a FEATS column ("_" or "Key=Value|Key=Value") into an ordered map."""
    if column == "_":
        return {}
    feats: dict[str, str] = {}
    for pair in column.split("|"):
        key, sep, value = pair.partition("=")
        if not sep or not key or not value:
            raise ConlluParseError(line_number, f"malformed FEATS pair {pair!r}")
        feats[key] = value
    return feats


def _is_skipped_id(token_id: str) -> bool:
    # Multiword-token ranges ("1-2") and empty nodes ("1.1") are not
    # syntactic words and carry no annotations we consume.
    return "-" in token_id or "." in token_id


def read_conllu(
    source: Source,
    strict: bool = True,
    stats: ParseStats | None = None,
) -> Iterator[Sentence]:
    """Yield sentences (lists of :class:`Token`) from CoNLL-U input.

    ``source`` may be a path, an open text/binary file, or any iterable of
    lines. In strict mode a malformed line raises :class:`ConlluParseError`;
    in lenient mode the line is skipped and recorded in ``stats`` (historical
    corpora routinely contain tagger glitches).
    """
    tokens: Sentence = []
    sentence_index = 0
    for line_number, raw in enumerate(_iter_lines(source), start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line:
            if tokens:
                if stats is not None:
                    stats.sentences += 1
                yield tokens
                sentence_index += 1
                tokens = []
            continue
        if line.startswith("#"):
            continue
        try:
            token = _parse_token_line(line, line_number, sentence_index, len(tokens))
        except ConlluParseError as err:
            if strict:
                raise
            log.warning("skipping malformed line: %s", err)
            if stats is not None:
                stats.skipped_lines.append((line_number, str(err)))
            continue
        if token is not None:
            tokens.append(token)
            if stats is not None:
                stats.tokens += 1
    if tokens:
        if stats is not None:
            stats.sentences += 1
        yield tokens


def _parse_token_line(
    line: str, line_number: int, sentence_index: int, token_index: int
) -> Token | None:
    columns = line.split("\t")
    if len(columns) != N_COLUMNS:
        raise ConlluParseError(
            line_number, f"expected {N_COLUMNS} columns, got {len(columns)}"
        )
    token_id, form, lemma, upos, _xpos, feats_col, _head, deprel, _deps, _misc = columns
    if _is_skipped_id(token_id):
        return None
    if not token_id.isdigit():
        raise ConlluParseError(line_number, f"bad token ID {token_id!r}")
    if not deprel:
        raise ConlluParseError(line_number, "empty DEPREL column")
    return Token(
        form=form,
        lemma=lemma,
        upos=upos,
        feats=parse_feats(feats_col, line_number),
        deprel=deprel,
        sentence_index=sentence_index,
        token_index=token_index,
    )


def feats_to_column(feats: Mapping[str, str]) -> str:
    if not feats:
        return "_"
    return "|".join(f"{key}={value}" for key, value in feats.items())


def sentence_to_conllu(tokens: Sequence[Token]) -> str:
    """Serialize one sentence back to CoNLL-U token lines (no trailing blank)."""
    lines = []
    for position, token in enumerate(tokens, start=1):
        lines.append(
            "\t".join(
                (
                    str(position),
                    token.form,
                    token.lemma,
                    token.upos,
                    "_",
                    feats_to_column(token.feats),
                    "0",
                    token.deprel,
                    "_",
                    "_",
                )
            )
        )
    return "\n".join(lines)


def write_conllu(path: str | Path, sentences: Iterable[Sequence[Token]]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for sentence in sentences:
            handle.write(sentence_to_conllu(sentence))
            handle.write("\n\n")


@dataclass
class TargetEntry:
    """A target lemma with its matched surface forms and optional gold labels."""

    lemma: str
    pos_filter: str | None = None
    surface_forms: set[str] = field(default_factory=set)
    gold_graded: float | None = None
    gold_binary: int | None = None

    def __post_init__(self) -> None:
        self.surface_forms.add(self.lemma)
        if self.gold_binary not in (None, 0, 1):
            raise ValueError(f"gold_binary must be 0 or 1, got {self.gold_binary!r}")


@dataclass
class TargetLexicon:
    """The set of target entries under analysis for one language."""

    entries: list[TargetEntry]
    language: str = "und"

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for entry in self.entries:
            if entry.lemma in seen:
                raise ValueError(f"duplicate target lemma {entry.lemma!r}")
            seen.add(entry.lemma)

    def lemmas(self) -> list[str]:
        return [entry.lemma for entry in self.entries]

    def by_lemma(self) -> dict[str, TargetEntry]:
        return {entry.lemma: entry for entry in self.entries}


@dataclass
class UsageIndex:
    """Positions of every target occurrence in one period's corpus."""

    period: Period
    occurrences: dict[str, list[tuple[int, int]]]

    def count(self, lemma: str) -> int:
        return len(self.occurrences.get(lemma, []))


TargetSpec = Union[str, tuple[str, str | None]]


def _normalize_targets(targets: Sequence[TargetSpec]) -> list[tuple[str, str | None]]:
    normalized = []
    for target in targets:
        if isinstance(target, str):
            normalized.append((target, None))
        else:
            lemma, pos = target
            normalized.append((lemma, pos))
    return normalized


def collect_surface_forms(
    corpus: Iterable[Sequence[Token]],
    targets: Sequence[TargetSpec],
    case_fold: bool = False,
    language: str = "und",
) -> TargetLexicon:
    """Gather every distinct token form attested for each target lemma.

    The lemma itself is always a member of the form set. Lemmas with zero
    corpus matches are retained (with only the dictionary form) and a
    warning is logged.
    """
    pairs = _normalize_targets(targets)
    if not pairs:
        raise ValueError("no target lemmas given")
    key = (lambda s: s.casefold()) if case_fold else (lambda s: s)
    forms: dict[str, set[str]] = {key(lemma): set() for lemma, _ in pairs}
    for sentence in corpus:
        for token in sentence:
            bucket = forms.get(key(token.lemma))
            if bucket is not None:
                bucket.add(token.form)
    entries = []
    for lemma, pos in pairs:
        matched = forms[key(lemma)]
        if not matched:
            log.warning("target lemma %r matched no corpus tokens", lemma)
        entries.append(
            TargetEntry(lemma=lemma, pos_filter=pos, surface_forms=set(matched))
        )
    return TargetLexicon(entries=entries, language=language)


def index_usages(
    corpus: Iterable[Sequence[Token]],
    lexicon: TargetLexicon,
    period: Period,
    case_fold: bool = False,
) -> UsageIndex:
    """Record (sentence_index, token_index) for every target occurrence.

    A token matches an entry when its lemma equals the target lemma
    (case-folded if requested) and, when the entry carries a POS filter,
    its UPOS equals that filter.
    """
    key = (lambda s: s.casefold()) if case_fold else (lambda s: s)
    by_key = {key(entry.lemma): entry for entry in lexicon.entries}
    occurrences: dict[str, list[tuple[int, int]]] = {
        entry.lemma: [] for entry in lexicon.entries
    }
    for sentence in corpus:
        for token in sentence:
            entry = by_key.get(key(token.lemma))
            if entry is None:
                continue
            if entry.pos_filter is not None and token.upos != entry.pos_filter:
                continue
            occurrences[entry.lemma].append((token.sentence_index, token.token_index))
    return UsageIndex(period=period, occurrences=occurrences)


def read_targets_tsv(path: str | Path) -> list[tuple[str, str | None]]:
    """Read a target list: one `lemma<TAB>[pos]` per line, '#' comments allowed."""
    targets: list[tuple[str, str | None]] = []
    with open(path, encoding="utf-8") as handle:
        for line_number, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            columns = line.split("\t")
            if len(columns) == 1:
                targets.append((columns[0], None))
            elif len(columns) == 2:
                targets.append((columns[0], columns[1] or None))
            else:
                raise ValueError(f"{path}: line {line_number}: expected 1 or 2 columns")
    if not targets:
        raise ValueError(f"{path}: no targets found")
    return targets


def read_gold_tsv(path: str | Path) -> dict[str, tuple[float, int | None]]:
    """Read gold annotations: `lemma<TAB>graded_score<TAB>[binary_label]`."""
    gold: dict[str, tuple[float, int | None]] = {}
    with open(path, encoding="utf-8") as handle:
        for line_number, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            columns = line.split("\t")
            if len(columns) not in (2, 3):
                raise ValueError(f"{path}: line {line_number}: expected 2 or 3 columns")
            lemma = columns[0]
            if lemma in gold:
                raise ValueError(f"{path}: line {line_number}: duplicate lemma {lemma!r}")
            graded = float(columns[1])
            binary: int | None = None
            if len(columns) == 3 and columns[2] != "":
                binary = int(columns[2])
                if binary not in (0, 1):
                    raise ValueError(
                        f"{path}: line {line_number}: binary label must be 0 or 1"
                    )
            gold[lemma] = (graded, binary)
    if not gold:
        raise ValueError(f"{path}: no gold entries found")
    return gold
