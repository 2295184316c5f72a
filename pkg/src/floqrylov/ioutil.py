"""Serialization helpers shared by the CSV and JSON writers."""

import csv
import os


def fmt(x: float) -> str:
    """Format a float with 17 significant digits (round-trip exact)."""
    return f"{float(x):.17g}"


def ensure_dir(path: str) -> None:
    os.makedirs(path, exist_ok=True)


def write_csv(path, header, rows) -> None:
    """Write preformatted string rows under a fixed header.

    Uses '\n' line endings unconditionally so reruns are byte-identical
    across platforms.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
