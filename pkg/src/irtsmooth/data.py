"""Response data, scoring schemes, and missing-value handling.

A test is an n x k table of selected option codes. Codes are 1-based in every
external format; internally a 0 marks a missing answer. Option counts track
the designed options per item; when a missing policy turns nonresponse into a
synthetic extra option, that option lives at code m_j + 1 and is flagged in
``missing_option`` rather than folded into ``option_counts``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace
from enum import Enum
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import DomainError, InputError, ParseError

MISSING = 0

_MODULE = "data-model"


class ItemFormat(Enum):
    MULTIPLE_CHOICE = "multiple-choice"
    RATING_SCALE = "rating-scale"
    NOMINAL = "nominal"


# Numeric codes follow the common convention 1=multiple choice, 2=rating
# scale, 3=nominal; names are also accepted on the CLI.
_FORMAT_ALIASES = {
    "1": ItemFormat.MULTIPLE_CHOICE,
    "mc": ItemFormat.MULTIPLE_CHOICE,
    "multiple-choice": ItemFormat.MULTIPLE_CHOICE,
    "2": ItemFormat.RATING_SCALE,
    "rating": ItemFormat.RATING_SCALE,
    "rating-scale": ItemFormat.RATING_SCALE,
    "3": ItemFormat.NOMINAL,
    "nominal": ItemFormat.NOMINAL,
}


def parse_format_tag(tag: str) -> ItemFormat:
    try:
        return _FORMAT_ALIASES[tag.strip().lower()]
    except KeyError:
        raise InputError(f"unknown item format {tag!r}",
                         module=_MODULE, operation="parse_format_tag") from None


class MissingMode(Enum):
    TREAT_AS_OPTION = "option"
    RANDOM_UNIFORM = "runif"
    RANDOM_MULTINOMIAL = "rmultinom"
    OMIT_SUBJECT = "omit"


@dataclass(frozen=True)
class MissingPolicy:
    """How nonresponses are resolved before any curve estimation."""

    mode: MissingMode
    rng_seed: int | None = None

    def __post_init__(self):
        needs_seed = self.mode in (MissingMode.RANDOM_UNIFORM,
                                   MissingMode.RANDOM_MULTINOMIAL)
        if needs_seed and self.rng_seed is None:
            raise InputError(
                f"missing mode {self.mode.value!r} requires rng_seed for "
                "reproducible imputation", module=_MODULE, operation="MissingPolicy")
        if self.rng_seed is not None and self.rng_seed < 0:
            raise InputError("rng_seed must be nonnegative",
                             module=_MODULE, operation="MissingPolicy")


@dataclass(frozen=True)
class ResponseMatrix:
    """Validated n x k option selections.

    selections[i, j] is the 1-based option code subject i chose on item j,
    or 0 when the answer is missing. option_counts[j] is the designed number
    of options m_j; missing_option[j] is True once a synthetic "no answer"
    option occupies code m_j + 1.
    """

    selections: np.ndarray
    option_counts: np.ndarray
    missing_option: np.ndarray
    item_labels: tuple[str, ...]

    def __post_init__(self):
        sel = np.asarray(self.selections, dtype=np.int64)
        counts = np.asarray(self.option_counts, dtype=np.int64)
        flags = np.asarray(self.missing_option, dtype=bool)
        sel.setflags(write=False)
        counts.setflags(write=False)
        flags.setflags(write=False)
        object.__setattr__(self, "selections", sel)
        object.__setattr__(self, "option_counts", counts)
        object.__setattr__(self, "missing_option", flags)
        if sel.ndim != 2:
            raise InputError("selections must be a 2-d array",
                             module=_MODULE, operation="ResponseMatrix")
        n, k = sel.shape
        if n < 2:
            raise InputError(f"need at least 2 subjects, got {n}",
                             module=_MODULE, operation="ResponseMatrix")
        if k < 1:
            raise InputError("need at least 1 item",
                             module=_MODULE, operation="ResponseMatrix")
        if counts.shape != (k,) or flags.shape != (k,):
            raise InputError("option_counts/missing_option must have one entry per item",
                             module=_MODULE, operation="ResponseMatrix")
        if len(self.item_labels) != k:
            raise InputError("item_labels length must equal the item count",
                             module=_MODULE, operation="ResponseMatrix")
        if np.any(counts < 2):
            bad = int(np.argmax(counts < 2))
            raise DomainError(
                f"item {self.item_labels[bad]!r} has fewer than 2 options",
                module=_MODULE, operation="ResponseMatrix")
        limits = counts + flags.astype(np.int64)
        if np.any(sel < 0) or np.any(sel > limits[None, :]):
            i, j = np.argwhere((sel < 0) | (sel > limits[None, :]))[0]
            raise DomainError(
                f"selection {sel[i, j]} outside 1..{limits[j]}",
                module=_MODULE, operation="ResponseMatrix",
                location=f"subject {i + 1}, item {self.item_labels[j]}")

    @property
    def n_subjects(self) -> int:
        return self.selections.shape[0]

    @property
    def n_items(self) -> int:
        return self.selections.shape[1]

    def total_options(self) -> np.ndarray:
        """Option count per item including any synthetic missing option."""
        return self.option_counts + self.missing_option.astype(np.int64)

    def has_missing(self) -> bool:
        return bool(np.any(self.selections == MISSING))


@dataclass(frozen=True)
class ScoringScheme:
    """Per-item option weights x_jl.

    weights[j] has one entry per option of item j, in option-code order; the
    extra slot added by the treat-as-option missing policy carries
    ``missing_weight``. Nominal items carry all-zero weights and therefore
    contribute nothing to score-based ranking.
    """

    weights: tuple[np.ndarray, ...]
    format_tags: tuple[ItemFormat, ...]
    missing_weight: float = 0.0

    def __post_init__(self):
        frozen = []
        for w in self.weights:
            arr = np.asarray(w, dtype=np.float64)
            arr.setflags(write=False)
            frozen.append(arr)
        object.__setattr__(self, "weights", tuple(frozen))
        if len(self.weights) != len(self.format_tags):
            raise InputError("weights and format_tags must have equal length",
                             module=_MODULE, operation="ScoringScheme")

    def bounds(self, item: int) -> tuple[float, float]:
        w = self.weights[item]
        return float(w.min()), float(w.max())

    def validate_lengths(self, data: ResponseMatrix) -> None:
        """Check that every item has one weight per option."""
        if len(self.weights) != data.n_items:
            raise InputError("scoring scheme covers a different item count",
                             module=_MODULE, operation="ScoringScheme")
        totals = data.total_options()
        for j, w in enumerate(self.weights):
            if len(w) != totals[j]:
                raise InputError(
                    f"item {data.item_labels[j]!r}: {len(w)} weights for "
                    f"{totals[j]} options",
                    module=_MODULE, operation="ScoringScheme")

    def validate_formats(self, data: ResponseMatrix) -> None:
        """Check the canonical per-format weight shapes (designed options only).

        Only meaningful for schemes built from format/key; explicit weight
        tables may use arbitrary values and skip this check.
        """
        self.validate_lengths(data)
        for j, w in enumerate(self.weights):
            designed = w[: data.option_counts[j]]
            tag = self.format_tags[j]
            if tag is ItemFormat.MULTIPLE_CHOICE:
                if not (np.sum(designed == 1.0) == 1 and np.sum(designed == 0.0) == len(designed) - 1):
                    raise DomainError(
                        f"item {data.item_labels[j]!r}: multiple-choice weights "
                        "must be a single 1 among 0s",
                        module=_MODULE, operation="ScoringScheme")
            elif tag is ItemFormat.RATING_SCALE:
                if not np.array_equal(designed, np.arange(1, len(designed) + 1, dtype=np.float64)):
                    raise DomainError(
                        f"item {data.item_labels[j]!r}: rating-scale weights must be 1..m",
                        module=_MODULE, operation="ScoringScheme")
            elif tag is ItemFormat.NOMINAL:
                if np.any(designed != 0.0):
                    raise DomainError(
                        f"item {data.item_labels[j]!r}: nominal items carry zero weights",
                        module=_MODULE, operation="ScoringScheme")


def ingest_responses(source: str | bytes | IO, missing_token: str = "NA",
                     option_counts: Sequence[int] | None = None) -> ResponseMatrix:
    """Parse a response CSV into a validated ResponseMatrix.

    The CSV is UTF-8 with a header row of item labels; each body row is one
    subject and each cell an integer option code or the missing token.
    Option counts default to the maximum observed code per item; pass
    ``option_counts`` (e.g. from a sidecar file) when the data may not
    exercise every designed option. Subjects whose every answer is missing
    are dropped here, before any policy runs.
    """
    op = "ingest_responses"
    text = _as_text(source)
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    if not rows:
        raise InputError("empty response file", module=_MODULE, operation=op)
    labels = tuple(cell.strip() for cell in rows[0])
    k = len(labels)
    if len(rows) == 1:
        raise InputError("response file has a header but no subjects",
                         module=_MODULE, operation=op)
    body = rows[1:]
    sel = np.zeros((len(body), k), dtype=np.int64)
    for i, row in enumerate(body):
        if len(row) != k:
            raise ParseError(
                f"expected {k} cells, found {len(row)}",
                module=_MODULE, operation=op, location=f"row {i + 2}")
        for j, cell in enumerate(row):
            token = cell.strip()
            if token == missing_token or token == "":
                sel[i, j] = MISSING
                continue
            try:
                code = int(token)
            except ValueError:
                raise ParseError(
                    f"non-integer cell {token!r}",
                    module=_MODULE, operation=op,
                    location=f"row {i + 2}, column {labels[j]}") from None
            if code < 1:
                raise DomainError(
                    f"option code {code} below 1",
                    module=_MODULE, operation=op,
                    location=f"row {i + 2}, column {labels[j]}")
            sel[i, j] = code

    # Subjects with no answers at all carry no ranking information.
    answered = np.any(sel != MISSING, axis=1)
    sel = sel[answered]
    if sel.shape[0] < 2:
        raise InputError("fewer than 2 subjects with any answers",
                         module=_MODULE, operation=op)

    if option_counts is None:
        counts = sel.max(axis=0)
    else:
        counts = np.asarray(list(option_counts), dtype=np.int64)
        if counts.shape != (k,):
            raise InputError(f"option-count sidecar lists {counts.size} items, file has {k}",
                             module=_MODULE, operation=op)
        observed = sel.max(axis=0)
        if np.any(counts < observed):
            j = int(np.argmax(counts < observed))
            raise DomainError(
                f"item {labels[j]!r}: observed code {observed[j]} exceeds "
                f"declared option count {counts[j]}",
                module=_MODULE, operation=op)
    return ResponseMatrix(selections=sel, option_counts=counts,
                          missing_option=np.zeros(k, dtype=bool),
                          item_labels=labels)


def build_scoring(formats: Sequence[ItemFormat] | ItemFormat,
                  key: Sequence[int] | int | None,
                  option_counts: Sequence[int],
                  missing_weight: float = 0.0) -> ScoringScheme:
    """Derive option weights from item formats and a key.

    Multiple-choice items get an indicator at key[j]; rating-scale items get
    weights 1..m_j (their key must equal m_j); nominal items get zeros and
    need no key. Scalar formats/keys broadcast across items.
    """
    op = "build_scoring"
    counts = np.asarray(list(option_counts), dtype=np.int64)
    k = counts.size
    if isinstance(formats, ItemFormat):
        tags = (formats,) * k
    else:
        tags = tuple(formats)
        if len(tags) != k:
            raise InputError(f"{len(tags)} format tags for {k} items",
                             module=_MODULE, operation=op)
    if key is None:
        keys = [None] * k
    elif isinstance(key, (int, np.integer)):
        keys = [int(key)] * k
    else:
        keys = [int(v) for v in key]
        if len(keys) != k:
            raise InputError(f"key lists {len(keys)} items, data has {k}",
                             module=_MODULE, operation=op)

    weights = []
    for j, (tag, m) in enumerate(zip(tags, counts)):
        if tag is ItemFormat.MULTIPLE_CHOICE:
            if keys[j] is None:
                raise InputError(f"item {j + 1}: multiple-choice items need a key",
                                 module=_MODULE, operation=op)
            if not 1 <= keys[j] <= m:
                raise DomainError(
                    f"item {j + 1}: key {keys[j]} outside 1..{m}",
                    module=_MODULE, operation=op)
            w = np.zeros(m)
            w[keys[j] - 1] = 1.0
        elif tag is ItemFormat.RATING_SCALE:
            if keys[j] is not None and keys[j] != m:
                raise DomainError(
                    f"item {j + 1}: rating-scale key must equal the option "
                    f"count {m}, got {keys[j]}",
                    module=_MODULE, operation=op)
            w = np.arange(1, m + 1, dtype=np.float64)
        elif tag is ItemFormat.NOMINAL:
            w = np.zeros(m)
        else:  # pragma: no cover - enum is closed
            raise InputError(f"unhandled format {tag}", module=_MODULE, operation=op)
        weights.append(w)
    return ScoringScheme(weights=tuple(weights), format_tags=tags,
                         missing_weight=missing_weight)


def scoring_from_weights(rows: Iterable[Sequence[float]],
                         missing_weight: float = 0.0) -> ScoringScheme:
    """Build a scheme from an explicit weight table (one row per item).

    Tags are inferred from the row shape (all-zero -> nominal, 1..m ->
    rating scale, single indicator -> multiple choice) and fall back to
    rating scale for arbitrary weights. Explicit tables bypass the canonical
    shape rules, so callers should use validate_lengths, not validate_formats.
    """
    weights = []
    tags = []
    for row in rows:
        w = np.asarray(list(row), dtype=np.float64)
        weights.append(w)
        if np.all(w == 0.0):
            tags.append(ItemFormat.NOMINAL)
        elif np.array_equal(w, np.arange(1, len(w) + 1)):
            tags.append(ItemFormat.RATING_SCALE)
        elif np.sum(w == 1.0) == 1 and np.sum(w == 0.0) == len(w) - 1:
            tags.append(ItemFormat.MULTIPLE_CHOICE)
        else:
            tags.append(ItemFormat.RATING_SCALE)
    return ScoringScheme(weights=tuple(weights), format_tags=tuple(tags),
                         missing_weight=missing_weight)


def apply_missing_policy(data: ResponseMatrix, scheme: ScoringScheme,
                         policy: MissingPolicy) -> tuple[ResponseMatrix, ScoringScheme]:
    """Resolve every missing answer; the returned matrix has none left.

    treat-as-option: items with any nonresponse gain option m_j + 1 weighted
    by the scheme's missing_weight. random-uniform / random-multinomial:
    seeded imputation drawing per cell in row-major order, uniform on 1..m_j
    or proportional to the item's observed option frequencies. omit-subject:
    rows containing any missing answer are removed.
    """
    op = "apply_missing_policy"
    sel = np.array(data.selections)

    # All-missing subjects are dropped before any policy runs.
    answered = np.any(sel != MISSING, axis=1)
    sel = sel[answered]

    if not np.any(sel == MISSING):
        out = replace(data, selections=sel)
        return out, scheme

    counts = data.option_counts
    if policy.mode is MissingMode.OMIT_SUBJECT:
        keep = np.all(sel != MISSING, axis=1)
        return replace(data, selections=sel[keep]), scheme

    if policy.mode is MissingMode.TREAT_AS_OPTION:
        item_has_missing = np.any(sel == MISSING, axis=0)
        flags = data.missing_option | item_has_missing
        new_weights = []
        for j, w in enumerate(scheme.weights):
            if item_has_missing[j]:
                new_weights.append(np.append(w, scheme.missing_weight))
            else:
                new_weights.append(w)
        for j in np.flatnonzero(item_has_missing):
            col = sel[:, j]
            col[col == MISSING] = counts[j] + 1
        out = replace(data, selections=sel, missing_option=flags)
        return out, replace(scheme, weights=tuple(new_weights))

    # Imputation modes share one RNG stream consumed in row-major cell order.
    rng = np.random.default_rng(policy.rng_seed)
    if policy.mode is MissingMode.RANDOM_MULTINOMIAL:
        freqs = []
        for j in range(data.n_items):
            col = sel[:, j]
            observed = col[col != MISSING]
            if observed.size == 0:
                raise DomainError(
                    f"item {data.item_labels[j]!r} has no observed responses; "
                    "multinomial imputation has no frequencies",
                    module=_MODULE, operation=op)
            tally = np.bincount(observed - 1, minlength=counts[j]).astype(np.float64)
            freqs.append(tally / tally.sum())
    for i, j in np.argwhere(sel == MISSING):
        if policy.mode is MissingMode.RANDOM_UNIFORM:
            sel[i, j] = rng.integers(1, counts[j] + 1)
        else:
            sel[i, j] = rng.choice(np.arange(1, counts[j] + 1), p=freqs[j])
    return replace(data, selections=sel), scheme


def read_key_sidecar(source: str | bytes | IO) -> list[int]:
    """Key sidecar: one integer per line, one line per item."""
    return [int(line) for line in _as_text(source).split() if line.strip()]


def read_counts_sidecar(source: str | bytes | IO) -> list[int]:
    """Option-count sidecar: one integer per line, one line per item."""
    return [int(line) for line in _as_text(source).split() if line.strip()]


def read_weights_sidecar(source: str | bytes | IO) -> list[list[float]]:
    """Weight sidecar: m_j whitespace- or comma-separated values per item line."""
    rows = []
    for line in _as_text(source).splitlines():
        line = line.strip()
        if not line:
            continue
        rows.append([float(tok) for tok in line.replace(",", " ").split()])
    return rows


def _as_text(source: str | bytes | IO) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fh:
            return fh.read()
    raw = source.read()
    if isinstance(raw, bytes):
        return raw.decode("utf-8")
    return raw
