"""Praat TextGrid word alignments.

Both TextGrid flavors are handled: the long form (key = value lines with
nested item/interval blocks) and the short form (bare values in fixed
order). Only interval tiers are meaningful here; the word tier is picked
by name. Empty interval texts denote silence and become the reserved PAD
token, as do frames that fall outside every interval.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple

from .errors import ParseError

PAD_TOKEN = "<PAD>"


class Entry(NamedTuple):
    token: str
    start: float
    end: float


@dataclass
class AlignedTranscript:
    """Word intervals in seconds, sorted and non-overlapping."""

    entries: list[Entry]

    def __post_init__(self):
        self.entries = [Entry(t, float(a), float(b)) for t, a, b in self.entries]
        for i, e in enumerate(self.entries):
            if e.end <= e.start:
                raise ValueError(f"interval {i} has end {e.end} <= start {e.start}")
        for i in range(1, len(self.entries)):
            prev, cur = self.entries[i - 1], self.entries[i]
            if cur.start < prev.start:
                raise ValueError(f"intervals {i - 1} and {i} are out of order")
            if cur.start < prev.end - 1e-9:
                raise ValueError(f"intervals {i - 1} and {i} overlap")

    @property
    def duration(self) -> float:
        return self.entries[-1].end if self.entries else 0.0

    def tokens(self) -> set[str]:
        return {e.token for e in self.entries}


class _Tier(NamedTuple):
    name: str
    intervals: list[tuple[float, float, str]]


_QUOTED = re.compile(r'"((?:[^"]|"")*)"')


def _unquote(text: str, line: int) -> str:
    m = _QUOTED.search(text)
    if m is None:
        raise ParseError("expected a quoted string", line=line)
    return m.group(1).replace('""', '"')


def _num_after_eq(text: str, line: int) -> float:
    part = text.split("=", 1)
    if len(part) != 2:
        raise ParseError(f"expected 'key = value', found {text.strip()!r}", line=line)
    try:
        return float(part[1].strip())
    except ValueError:
        raise ParseError(f"expected a number, found {part[1].strip()!r}", line=line) from None


def _parse_long(lines: list[tuple[int, str]]) -> list[_Tier]:
    tiers: list[_Tier] = []
    i = 0
    while i < len(lines):
        ln, text = lines[i]
        stripped = text.strip()
        if stripped.startswith("class") and "IntervalTier" in stripped:
            ln2, name_line = lines[i + 1]
            if not name_line.strip().startswith("name"):
                raise ParseError("tier is missing a name line", line=ln2)
            name = _unquote(name_line, ln2)
            i += 2
            # skip tier xmin/xmax, find the interval count
            while i < len(lines) and "intervals: size" not in lines[i][1]:
                if "class" in lines[i][1] and "Tier" in lines[i][1]:
                    raise ParseError("tier without an intervals count", line=lines[i][0])
                i += 1
            if i >= len(lines):
                raise ParseError("tier without an intervals count", line=ln)
            n = int(_num_after_eq(lines[i][1], lines[i][0]))
            i += 1
            intervals = []
            for _ in range(n):
                while i < len(lines) and "intervals [" not in lines[i][1]:
                    i += 1
                if i + 3 > len(lines):
                    raise ParseError("truncated interval block", line=lines[-1][0])
                i += 1
                ln_a, a_line = lines[i]
                ln_b, b_line = lines[i + 1]
                ln_t, t_line = lines[i + 2]
                a = _num_after_eq(a_line, ln_a)
                b = _num_after_eq(b_line, ln_b)
                tok = _unquote(t_line, ln_t)
                intervals.append((a, b, tok))
                i += 3
            tiers.append(_Tier(name, intervals))
        elif stripped.startswith("class") and "TextTier" in stripped:
            i += 1  # point tiers carry no word intervals
        else:
            i += 1
    return tiers


def _parse_short(lines: list[tuple[int, str]]) -> list[_Tier]:
    # after the two header lines: xmin, xmax, tier flag, tier count, then
    # per tier: class, name, xmin, xmax, count, and count * (xmin, xmax, text)
    vals = lines[2:]
    pos = 0

    def take() -> tuple[int, str]:
        nonlocal pos
        if pos >= len(vals):
            raise ParseError("unexpected end of file", line=lines[-1][0])
        item = vals[pos]
        pos += 1
        return item

    def take_num() -> float:
        ln, text = take()
        try:
            return float(text.strip())
        except ValueError:
            raise ParseError(f"expected a number, found {text.strip()!r}", line=ln) from None

    take_num()  # global xmin
    take_num()  # global xmax
    ln, flag = take()
    if "exists" not in flag:
        raise ParseError("expected the tier flag '<exists>'", line=ln)
    n_tiers = int(take_num())
    tiers: list[_Tier] = []
    for _ in range(n_tiers):
        ln_c, cls = take()
        cls_name = _unquote(cls, ln_c)
        ln_n, name_line = take()
        name = _unquote(name_line, ln_n)
        take_num()  # tier xmin
        take_num()  # tier xmax
        n = int(take_num())
        intervals = []
        for _ in range(n):
            a = take_num()
            b = take_num()
            ln_t, t_line = take()
            intervals.append((a, b, _unquote(t_line, ln_t)))
        if cls_name == "IntervalTier":
            tiers.append(_Tier(name, intervals))
    return tiers


def parse_textgrid(text: str) -> AlignedTranscript:
    """Parse TextGrid text and extract the word tier.

    The tier whose name contains 'word' (case-insensitive) wins; if none
    matches and exactly one interval tier exists, that one is used.
    """
    lines = [(n, raw) for n, raw in enumerate(text.splitlines(), start=1) if raw.strip()]
    if not lines or "ooTextFile" not in lines[0][1]:
        raise ParseError("not a TextGrid: missing ooTextFile header", line=1)
    if len(lines) < 2 or "TextGrid" not in lines[1][1]:
        raise ParseError("not a TextGrid: missing object class", line=lines[min(1, len(lines) - 1)][0])

    long_form = any("item [" in t for _, t in lines)
    tiers = _parse_long(lines) if long_form else _parse_short(lines)

    word_tiers = [t for t in tiers if "word" in t.name.lower()]
    if not word_tiers:
        if len(tiers) == 1:
            word_tiers = tiers
        else:
            raise ParseError("no word tier found")
    intervals = word_tiers[0].intervals

    entries = []
    for a, b, tok in intervals:
        tok = tok.strip()
        entries.append(Entry(tok if tok else PAD_TOKEN, a, b))
    entries.sort(key=lambda e: e.start)
    for i in range(1, len(entries)):
        if entries[i].start < entries[i - 1].end - 1e-9:
            raise ParseError(f"intervals {i - 1} and {i} overlap")
    try:
        return AlignedTranscript(entries)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def read_textgrid(path) -> AlignedTranscript:
    with open(path, "r") as fh:
        return parse_textgrid(fh.read())


def write_textgrid(t: AlignedTranscript, path=None) -> str:
    """Serialize as a long-form TextGrid with a single 'words' tier."""
    xmax = t.duration if t.entries else 1.0

    def q(s: str) -> str:
        return '"' + s.replace('"', '""') + '"'

    out = [
        'File type = "ooTextFile"',
        'Object class = "TextGrid"',
        "",
        "xmin = 0",
        f"xmax = {xmax:.10g}",
        "tiers? <exists>",
        "size = 1",
        "item []:",
        "    item [1]:",
        '        class = "IntervalTier"',
        '        name = "words"',
        "        xmin = 0",
        f"        xmax = {xmax:.10g}",
        f"        intervals: size = {len(t.entries)}",
    ]
    for i, e in enumerate(t.entries, start=1):
        token = "" if e.token == PAD_TOKEN else e.token
        out.append(f"        intervals [{i}]:")
        out.append(f"            xmin = {e.start:.10g}")
        out.append(f"            xmax = {e.end:.10g}")
        out.append(f"            text = {q(token)}")
    text = "\n".join(out) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def frame_words(t: AlignedTranscript, fps: float, n_frames: int) -> list[str]:
    """Token per frame: frame i takes the interval containing (i + 0.5) / fps.

    Intervals are half-open [start, end). Frames whose midpoint falls in
    no interval, including anything past the last one, get PAD.
    """
    if fps <= 0:
        raise ValueError("fps must be positive")
    out = []
    entries = t.entries
    j = 0
    for i in range(n_frames):
        mid = (i + 0.5) / fps
        while j < len(entries) and entries[j].end <= mid:
            j += 1
        if j < len(entries) and entries[j].start <= mid < entries[j].end:
            out.append(entries[j].token)
        else:
            out.append(PAD_TOKEN)
    return out
