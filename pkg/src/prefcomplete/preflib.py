"""PrefLib strict-order election data I/O, plus CSV result output.

Format: first line is the alternative count m; the next m lines are
"index,name"; the following line is "votes,sum,unique"; every remaining line
is "count,a1,a2,..." with 1-based alternative indices. Tie groups (brace
delimited) are rejected rather than linearized, and a multiplicity line
expands to that many distinct agents.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .model import Dataset, Ranking

__all__ = [
    "PreflibHeader",
    "PreflibParseError",
    "UnsupportedTiesError",
    "parse_preflib",
    "parse_preflib_file",
    "serialize_preflib",
    "write_preflib",
    "subsample",
    "write_csv",
    "CsvValueError",
]

TextSource = Union[str, IO[str], Iterable[str]]


class PreflibParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class UnsupportedTiesError(PreflibParseError):
    """A ballot contained a brace-delimited tie group."""


@dataclass(frozen=True)
class PreflibHeader:
    alternative_count: int
    names: tuple[str, ...]
    vote_count: int
    sum_count: int
    unique_count: int

    def __post_init__(self):
        if len(self.names) != self.alternative_count:
            raise ValueError("header names must match the alternative count")


def _lines(text: TextSource) -> list[str]:
    if isinstance(text, str):
        return text.splitlines()
    return [line.rstrip("\n") for line in text]


def parse_preflib(text: TextSource) -> Dataset:
    """Parse a PrefLib strict-order stream into a Dataset.

    Multiplicity lines expand into that many identical rankings (distinct
    agents); alternative indices are shifted to 0-based.
    """
    ds, _ = parse_preflib_with_header(text)
    return ds


def parse_preflib_with_header(text: TextSource) -> tuple[Dataset, PreflibHeader]:
    lines = _lines(text)
    pos = 0

    def next_line() -> tuple[int, str]:
        nonlocal pos
        while pos < len(lines):
            pos += 1
            stripped = lines[pos - 1].strip()
            if stripped:
                return pos, stripped
        raise PreflibParseError(len(lines), "unexpected end of input")

    line_no, first = next_line()
    try:
        m = int(first)
    except ValueError:
        raise PreflibParseError(line_no, f"expected alternative count, got {first!r}")
    if m < 1:
        raise PreflibParseError(line_no, f"alternative count must be positive, got {m}")

    names = [""] * m
    for _ in range(m):
        line_no, line = next_line()
        idx_str, _, name = line.partition(",")
        try:
            idx = int(idx_str)
        except ValueError:
            raise PreflibParseError(line_no, f"expected 'index,name', got {line!r}")
        if not 1 <= idx <= m:
            raise PreflibParseError(line_no, f"alternative index {idx} out of range 1..{m}")
        names[idx - 1] = name.strip()

    line_no, counts_line = next_line()
    parts = counts_line.split(",")
    if len(parts) != 3:
        raise PreflibParseError(line_no, f"expected 'votes,sum,unique', got {counts_line!r}")
    try:
        vote_count, sum_count, unique_count = (int(p) for p in parts)
    except ValueError:
        raise PreflibParseError(line_no, f"expected integers in {counts_line!r}")
    header = PreflibHeader(m, tuple(names), vote_count, sum_count, unique_count)

    rankings: list[Ranking] = []
    agent = 0
    total_multiplicity = 0
    while pos < len(lines):
        raw = lines[pos].strip()
        pos += 1
        if not raw:
            continue
        line_no = pos
        if "{" in raw or "}" in raw:
            raise UnsupportedTiesError(line_no, "tie groups are not supported")
        fields = [f.strip() for f in raw.split(",")]
        try:
            values = [int(f) for f in fields]
        except ValueError:
            raise PreflibParseError(line_no, f"malformed ballot line {raw!r}")
        count, ballot = values[0], values[1:]
        if count < 1:
            raise PreflibParseError(line_no, f"multiplicity must be positive, got {count}")
        order = []
        for a in ballot:
            if not 1 <= a <= m:
                raise PreflibParseError(line_no, f"alternative {a} out of range 1..{m}")
            order.append(a - 1)
        if len(set(order)) != len(order):
            raise PreflibParseError(line_no, f"duplicate alternative in ballot {raw!r}")
        total_multiplicity += count
        for _ in range(count):
            rankings.append(Ranking(agent=agent, order=order))
            agent += 1

    if total_multiplicity != vote_count:
        warnings.warn(
            f"ballot multiplicities sum to {total_multiplicity} but the header "
            f"declares {vote_count} votes",
            stacklevel=2,
        )
    return Dataset(m=m, rankings=tuple(rankings)), header


def parse_preflib_file(path: str | Path) -> Dataset:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_preflib(fh)
    except OSError as exc:
        raise OSError(f"cannot read PrefLib file {path}: {exc}") from exc


def serialize_preflib(ds: Dataset, names: Optional[Sequence[str]] = None) -> str:
    """Serialize a dataset, collapsing identical rankings to multiplicity
    lines (largest multiplicity first)."""
    if names is None:
        names = [f"Alternative {j + 1}" for j in range(ds.m)]
    if len(names) != ds.m:
        raise ValueError("names length must equal the alternative count")
    tally: dict[tuple[int, ...], int] = {}
    for r in ds.rankings:
        tally[r.order] = tally.get(r.order, 0) + 1
    lines = [str(ds.m)]
    lines += [f"{j + 1},{names[j]}" for j in range(ds.m)]
    lines.append(f"{ds.n},{ds.n},{len(tally)}")
    for order, count in sorted(tally.items(), key=lambda kv: (-kv[1], kv[0])):
        lines.append(",".join([str(count)] + [str(a + 1) for a in order]))
    return "\n".join(lines) + "\n"


def write_preflib(ds: Dataset, path: str | Path, names: Optional[Sequence[str]] = None) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(serialize_preflib(ds, names))
    except OSError as exc:
        raise OSError(f"cannot write PrefLib file {path}: {exc}") from exc


def subsample(ds: Dataset, count: int, seed: int) -> Dataset:
    """Seeded uniform sample of rankings without replacement, with agent
    indices re-densified to 0..count-1."""
    if count < 0 or count > ds.n:
        raise ValueError(f"cannot sample {count} of {ds.n} rankings")
    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(ds.n, size=count, replace=False))
    rankings = tuple(
        Ranking(agent=new, order=ds.rankings[old].order) for new, old in enumerate(chosen)
    )
    latents = ds.latent_agents[chosen] if ds.latent_agents is not None else None
    return Dataset(
        m=ds.m,
        rankings=rankings,
        latent_agents=latents,
        latent_alternatives=ds.latent_alternatives,
    )


class CsvValueError(ValueError):
    """A CSV row contained a non-finite numeric value."""


def _format_cell(value) -> str:
    if isinstance(value, float):
        if not math.isfinite(value):
            raise CsvValueError(f"non-finite value {value!r} in CSV output")
        return repr(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, np.floating):
        return _format_cell(float(value))
    return str(value)


def write_csv(
    rows: Sequence[Mapping[str, object]],
    path: str | Path,
    columns: Optional[Sequence[str]] = None,
) -> None:
    """Write records as CSV: UTF-8, LF line endings, header always present.

    Column order follows the first row (or ``columns`` when given, which also
    makes empty output possible). Non-finite numerics are rejected.
    """
    rows = list(rows)
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    else:
        columns = list(columns)
    for row in rows:
        if list(row.keys()) != columns:
            raise ValueError("all CSV rows must share one column set")
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(_format_cell(row[c]) for c in columns) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write CSV file {path}: {exc}") from exc
