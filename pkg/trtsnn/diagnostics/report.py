# -*- coding: utf-8 -*-
"""CSV writers and console tables for the diagnostics."""

import csv
import io
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Union

from tabulate import tabulate

from trtsnn.diagnostics.fisher import FisherProfile
from trtsnn.diagnostics.landscape import LandscapeGrid
from trtsnn.diagnostics.vanishing import VanishingRow
from trtsnn.utils.tools import atomic_write_text
from trtsnn.utils.tools import format_float


FISHER_COLUMNS = ("epoch", "t", "I_t", "IC")
VANISHING_COLUMNS = ("gamma", "layer", "t", "grad_p", "grad_t", "vanished")
LANDSCAPE_COLUMNS = ("a", "b", "loss")
ASFR_COLUMNS = ("layer", "rate")


def write_csv(path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """Header plus rows as ``\n``-terminated CSV, written atomically."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return atomic_write_text(path, buf.getvalue())


def fisher_rows(profiles: Iterable[FisherProfile]) -> List[List[str]]:
    rows = []
    for profile in profiles:
        epoch = "" if profile.epoch is None else str(profile.epoch)
        for t, value in enumerate(profile.traces, start=1):
            rows.append([epoch, str(t), format_float(value), format_float(profile.centroid)])
    return rows


def write_fisher_csv(path, profiles: Iterable[FisherProfile]) -> Path:
    return write_csv(path, FISHER_COLUMNS, fisher_rows(profiles))


def write_vanishing_csv(path, rows: Iterable[VanishingRow]) -> Path:
    body = [
        [
            format_float(r.gamma),
            str(r.layer),
            str(r.t),
            format_float(r.grad_p),
            format_float(r.grad_t),
            str(int(r.vanished)),
        ]
        for r in rows
    ]
    return write_csv(path, VANISHING_COLUMNS, body)


def write_landscape_csv(path, grid: LandscapeGrid) -> Path:
    rows = []
    for i, a in enumerate(grid.a):
        for j, b in enumerate(grid.b):
            rows.append([format_float(a), format_float(b), format_float(grid.losses[i, j])])
    return write_csv(path, LANDSCAPE_COLUMNS, rows)


def write_asfr_csv(path, rates: Dict[int, float]) -> Path:
    return write_csv(path, ASFR_COLUMNS, ([str(k), format_float(v)] for k, v in sorted(rates.items())))


def format_table(rows: Sequence[Sequence], headers: Sequence[str]) -> str:
    """Console rendering shared by the CLI summaries."""
    return tabulate(rows, headers=headers, tablefmt="github", floatfmt=".6g")
