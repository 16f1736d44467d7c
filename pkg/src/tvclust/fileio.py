"""Text formats for time-varying graphs and label sequences.

Graph file: header `tvg 1 N T`, then one line `t i j w` per edge, ascending t,
then i < j. Labels file: header `lbl 1 N T K`, then T lines of N integers.
UTF-8, LF line endings; floats are written with round-tripping repr.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .clustering import LabelSequence
from .graphs import TVGraphSequence, WeightedGraph

TVG_MAGIC = "tvg"
LBL_MAGIC = "lbl"
FORMAT_VERSION = 1


def _write_text(path, lines) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line)
            fh.write("\n")


def write_tvg(path, seq: TVGraphSequence) -> None:
    lines = [f"{TVG_MAGIC} {FORMAT_VERSION} {seq.n} {seq.t_len}"]
    for t, g in enumerate(seq.graphs):
        i, j, w = g.edge_arrays()
        lines.extend(
            f"{t} {a} {b} {float(c)!r}" for a, b, c in zip(i.tolist(), j.tolist(), w.tolist())
        )
    _write_text(path, lines)


def read_tvg(path) -> TVGraphSequence:
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.split("\n") if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty graph file")
    head = lines[0].split()
    if len(head) != 4 or head[0] != TVG_MAGIC:
        raise ValueError(f"{path}: bad graph header {lines[0]!r}")
    version, n, t_len = (int(x) for x in head[1:])
    if version != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported graph format version {version}")
    buckets: list[list[tuple[int, int, float]]] = [[] for _ in range(t_len)]
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 4:
            raise ValueError(f"{path}: bad edge line {ln!r}")
        t, i, j = int(parts[0]), int(parts[1]), int(parts[2])
        w = float(parts[3])
        if not 0 <= t < t_len:
            raise ValueError(f"{path}: frame index {t} out of range")
        buckets[t].append((i, j, w))
    return TVGraphSequence(tuple(WeightedGraph(n, b) for b in buckets))


def write_labels(path, ls: LabelSequence) -> None:
    lines = [f"{LBL_MAGIC} {FORMAT_VERSION} {ls.n} {ls.t_len} {ls.k}"]
    lines.extend(" ".join(str(x) for x in row.tolist()) for row in ls.labels)
    _write_text(path, lines)


def read_labels(path) -> LabelSequence:
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.split("\n") if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty labels file")
    head = lines[0].split()
    if len(head) != 5 or head[0] != LBL_MAGIC:
        raise ValueError(f"{path}: bad labels header {lines[0]!r}")
    version, n, t_len, k = (int(x) for x in head[1:])
    if version != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported labels format version {version}")
    if len(lines) - 1 != t_len:
        raise ValueError(f"{path}: expected {t_len} label rows, found {len(lines) - 1}")
    rows = []
    for ln in lines[1:]:
        row = [int(x) for x in ln.split()]
        if len(row) != n:
            raise ValueError(f"{path}: expected {n} labels per row, got {len(row)}")
        rows.append(row)
    return LabelSequence(np.asarray(rows, dtype=np.int64), k)
