"""Levenshtein distance and edit-script alignment over code points."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from morphkit.corpus import nfc


class Op(enum.Enum):
    COPY = "C"
    SUBSTITUTE = "S"
    INSERT = "I"
    DELETE = "D"


@dataclass(frozen=True)
class Edit:
    op: Op
    char: str = ""  # the new character for SUBSTITUTE / INSERT

    def __repr__(self) -> str:
        return f"{self.op.name}({self.char})" if self.char else self.op.name


COPY = Edit(Op.COPY)
DELETE = Edit(Op.DELETE)


def substitute(char: str) -> Edit:
    return Edit(Op.SUBSTITUTE, char)


def insert(char: str) -> Edit:
    return Edit(Op.INSERT, char)


@dataclass(frozen=True)
class Costs:
    substitute: int = 1
    insert: int = 1
    delete: int = 1


UNIT = Costs()

EditScript = tuple[Edit, ...]


def _table(a: str, b: str, costs: Costs) -> list[list[int]]:
    d = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(1, len(a) + 1):
        d[i][0] = i * costs.delete
    for j in range(1, len(b) + 1):
        d[0][j] = j * costs.insert
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            diag = d[i - 1][j - 1] + (0 if a[i - 1] == b[j - 1] else costs.substitute)
            d[i][j] = min(diag, d[i - 1][j] + costs.delete, d[i][j - 1] + costs.insert)
    return d


def levenshtein_distance(a: str, b: str, costs: Costs = UNIT) -> int:
    a, b = nfc(a), nfc(b)
    return _table(a, b, costs)[len(a)][len(b)]


def align(a: str, b: str, costs: Costs = UNIT) -> EditScript:
    """Minimal-cost edit script turning ``a`` into ``b``.

    Backtraces from the end of both strings; when several moves are optimal
    the preference is COPY, SUBSTITUTE, DELETE, INSERT.
    """
    a, b = nfc(a), nfc(b)
    d = _table(a, b, costs)
    i, j = len(a), len(b)
    ops: list[Edit] = []
    while i or j:
        if i and j and a[i - 1] == b[j - 1] and d[i][j] == d[i - 1][j - 1]:
            ops.append(COPY)
            i, j = i - 1, j - 1
        elif i and j and d[i][j] == d[i - 1][j - 1] + costs.substitute:
            ops.append(substitute(b[j - 1]))
            i, j = i - 1, j - 1
        elif i and d[i][j] == d[i - 1][j] + costs.delete:
            ops.append(DELETE)
            i -= 1
        else:
            ops.append(insert(b[j - 1]))
            j -= 1
    return tuple(reversed(ops))


def script_cost(script: Sequence[Edit]) -> int:
    return sum(1 for e in script if e.op is not Op.COPY)


def apply_script(a: str, script: Sequence[Edit]) -> str:
    a = nfc(a)
    consumed = sum(1 for e in script if e.op is not Op.INSERT)
    if consumed != len(a):
        raise ValueError(f"script consumes {consumed} source characters, source has {len(a)}")
    out, i = [], 0
    for e in script:
        if e.op is Op.COPY:
            out.append(a[i])
            i += 1
        elif e.op is Op.SUBSTITUTE:
            out.append(e.char)
            i += 1
        elif e.op is Op.DELETE:
            i += 1
        else:
            out.append(e.char)
    return "".join(out)


def copy_runs(script: Sequence[Edit]) -> list[tuple[int, int, int, int]]:
    """Maximal COPY runs as ``(src_start, src_end, tgt_start, tgt_end)``."""
    runs = []
    i = j = 0
    start = None
    for e in list(script) + [None]:
        if e is not None and e.op is Op.COPY:
            if start is None:
                start = (i, j)
        elif start is not None:
            runs.append((start[0], i, start[1], j))
            start = None
        if e is None:
            break
        if e.op is not Op.INSERT:
            i += 1
        if e.op is not Op.DELETE:
            j += 1
    return runs


def longest_copy_run(script: Sequence[Edit]) -> tuple[int, int, int, int] | None:
    """The longest COPY run, leftmost on ties; None if nothing is copied."""
    best = None
    for run in copy_runs(script):
        if best is None or run[1] - run[0] > best[1] - best[0]:
            best = run
    return best
