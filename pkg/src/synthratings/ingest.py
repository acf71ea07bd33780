"""Readers for the MovieLens 100K / 1M, HetRec LastFM and canonical formats.

Explicit ratings are binarized with a strict ``value > threshold`` rule.
"""

from __future__ import annotations

import enum
import io
from pathlib import Path

from .data import InteractionSet, build_interaction_set


class ParseError(ValueError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class SourceFormat(enum.Enum):
    # value: (cli name, delimiter, number of columns, default threshold)
    MOVIELENS_100K = ("ml100k", "\t", 4, 3.0)
    MOVIELENS_1M = ("ml1m", "::", 4, 3.0)
    LASTFM = ("lastfm", "\t", 3, 0.0)
    CANONICAL = ("canonical", "\t", 2, None)

    @property
    def cli_name(self):
        return self.value[0]

    @property
    def delimiter(self):
        return self.value[1]

    @property
    def columns(self):
        return self.value[2]

    @property
    def default_threshold(self):
        return self.value[3]

    @classmethod
    def from_name(cls, name):
        if isinstance(name, cls):
            return name
        for fmt in cls:
            if fmt.cli_name == name:
                return fmt
        valid = ", ".join(f.cli_name for f in cls)
        raise ValueError(f"unknown format {name!r} (expected one of: {valid})")


def _lines(source):
    if isinstance(source, (str, Path)):
        with open(source, "rb") as fh:
            data = fh.read()
    elif isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    else:
        data = source.read()
    if isinstance(data, bytes):
        # MovieLens 1M ships Latin-1 movie titles; rating files are ASCII,
        # but decode leniently so stray bytes surface as parse errors.
        data = data.decode("utf-8", errors="replace")
    return io.StringIO(data)


def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def iter_records(source, fmt):
    """Yield ``(lineno, user, item, value)``; value is None for canonical."""
    fmt = SourceFormat.from_name(fmt)
    delim, ncols = fmt.delimiter, fmt.columns
    for lineno, line in enumerate(_lines(source), start=1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        parts = line.split(delim)
        if fmt is SourceFormat.LASTFM and lineno == 1 and not _is_number(parts[0]):
            continue
        if len(parts) != ncols:
            raise ParseError(lineno, f"expected {ncols} fields for {fmt.cli_name}, got {len(parts)}")
        user, item = parts[0].strip(), parts[1].strip()
        if not user or not item:
            raise ParseError(lineno, "empty identifier")
        if ncols == 2:
            yield lineno, user, item, None
            continue
        try:
            value = float(parts[2])
        except ValueError:
            raise ParseError(lineno, f"non-numeric value {parts[2]!r}") from None
        yield lineno, user, item, value


def parse(source, fmt, threshold=None) -> InteractionSet:
    """Parse a ratings file and keep records whose value exceeds ``threshold``.

    ``source`` may be a path, raw bytes or an open (binary or text) stream.
    ``threshold`` defaults to 3 for MovieLens and 0 for LastFM; it is
    ignored for the canonical format, where every line is a positive.
    """
    fmt = SourceFormat.from_name(fmt)
    if threshold is None:
        threshold = fmt.default_threshold
    pairs = []
    for _, user, item, value in iter_records(source, fmt):
        if value is None or value > threshold:
            pairs.append((user, item))
    return build_interaction_set(pairs)


def read_canonical(source) -> InteractionSet:
    return parse(source, SourceFormat.CANONICAL)
