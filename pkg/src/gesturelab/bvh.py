"""BVH motion-capture reader and writer.

The format has two sections. HIERARCHY declares a joint tree where each
joint contributes an OFFSET and a CHANNELS line; MOTION holds a frame
count, a frame period, and one whitespace-separated row of channel values
per frame. End Site blocks terminate chains and carry no channels, so
this reader drops them; the writer emits a zero-offset End Site under
every leaf to keep files well formed.

All parse failures raise ParseError with the offending line number.
"""

from __future__ import annotations

import os
from typing import Iterable

import numpy as np

from .errors import DataMismatchError, ParseError
from .skeleton import Joint, MotionClip, VALID_CHANNELS


def _lines(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for n, raw in enumerate(text.splitlines(), start=1):
        toks = raw.split()
        if toks:
            out.append((n, toks))
    return out


class _Cursor:
    def __init__(self, items):
        self.items = items
        self.pos = 0

    def peek(self):
        if self.pos >= len(self.items):
            raise ParseError("unexpected end of file")
        return self.items[self.pos]

    def take(self):
        item = self.peek()
        self.pos += 1
        return item

    @property
    def done(self):
        return self.pos >= len(self.items)


def _expect(cur: _Cursor, word: str) -> tuple[int, list[str]]:
    line, toks = cur.take()
    if toks[0] != word:
        raise ParseError(f"expected {word!r}, found {toks[0]!r}", line=line)
    return line, toks


def _floats(toks: list[str], line: int) -> list[float]:
    try:
        return [float(t) for t in toks]
    except ValueError:
        bad = next(t for t in toks if not _is_number(t))
        raise ParseError(f"expected a number, found {bad!r}", line=line) from None


def _is_number(tok: str) -> bool:
    try:
        float(tok)
        return True
    except ValueError:
        return False


def parse_bvh(text: str) -> MotionClip:
    """Parse BVH text into a MotionClip.

    Angles stay in degrees. The frame rate is recovered as round(1 /
    frame_time).
    """
    cur = _Cursor(_lines(text))
    _expect(cur, "HIERARCHY")

    joints: list[Joint] = []

    def parse_joint(parent: int | None) -> None:
        line, toks = cur.take()
        kind = toks[0]
        if kind not in ("ROOT", "JOINT"):
            raise ParseError(f"expected ROOT or JOINT, found {kind!r}", line=line)
        if kind == "ROOT" and parent is not None:
            raise ParseError("ROOT inside another joint", line=line)
        if kind == "JOINT" and parent is None:
            raise ParseError("JOINT outside a ROOT block", line=line)
        if len(toks) < 2:
            raise ParseError("joint is missing a name", line=line)
        name = " ".join(toks[1:])
        _expect(cur, "{")

        oline, otoks = _expect(cur, "OFFSET")
        vals = _floats(otoks[1:], oline)
        if len(vals) != 3:
            raise ParseError(f"OFFSET needs 3 values, found {len(vals)}", line=oline)

        cline, ctoks = _expect(cur, "CHANNELS")
        if len(ctoks) < 2 or not ctoks[1].isdigit():
            raise ParseError("CHANNELS needs a count", line=cline)
        n = int(ctoks[1])
        labels = tuple(ctoks[2:])
        if len(labels) != n:
            raise ParseError(
                f"CHANNELS declares {n} labels but lists {len(labels)}", line=cline
            )
        for lab in labels:
            if lab not in VALID_CHANNELS:
                raise ParseError(f"unknown channel {lab!r}", line=cline)

        me = len(joints)
        try:
            joints.append(Joint(name, parent, np.asarray(vals), labels))
        except ValueError as exc:
            raise ParseError(str(exc), line=cline) from None

        while True:
            line, toks = cur.peek()
            if toks[0] == "}":
                cur.take()
                return
            if toks[0] == "JOINT":
                parse_joint(me)
            elif toks[0] == "End":
                cur.take()
                _expect(cur, "{")
                eline, etoks = _expect(cur, "OFFSET")
                if len(_floats(etoks[1:], eline)) != 3:
                    raise ParseError("End Site OFFSET needs 3 values", line=eline)
                _expect(cur, "}")
            else:
                raise ParseError(f"unexpected token {toks[0]!r} in joint block", line=line)

    parse_joint(None)

    line, toks = cur.take()
    if toks[0] != "MOTION":
        raise ParseError(f"expected MOTION, found {toks[0]!r}", line=line)

    fline, ftoks = cur.take()
    if ftoks[0] != "Frames:" or len(ftoks) != 2 or not ftoks[1].lstrip("-").isdigit():
        raise ParseError("expected 'Frames: <count>'", line=fline)
    n_frames = int(ftoks[1])
    if n_frames < 0:
        raise ParseError(f"negative frame count {n_frames}", line=fline)

    tline, ttoks = cur.take()
    if ttoks[:2] != ["Frame", "Time:"] or len(ttoks) != 3:
        raise ParseError("expected 'Frame Time: <seconds>'", line=tline)
    frame_time = _floats(ttoks[2:], tline)[0]
    if frame_time <= 0:
        raise ParseError(f"frame time must be positive, got {frame_time}", line=tline)
    fps = float(round(1.0 / frame_time))

    n_channels = sum(len(j.channels) for j in joints)
    rows = np.empty((n_frames, n_channels), dtype=np.float64)
    for i in range(n_frames):
        if cur.done:
            raise ParseError(f"motion section ends after {i} of {n_frames} frames")
        line, toks = cur.take()
        if len(toks) != n_channels:
            raise ParseError(
                f"frame {i} has {len(toks)} values, hierarchy declares {n_channels} channels",
                line=line,
            )
        rows[i] = _floats(toks, line)

    if not cur.done:
        line, toks = cur.peek()
        raise ParseError("trailing content after the last frame", line=line)

    try:
        return MotionClip(joints, fps, rows)
    except (ValueError, DataMismatchError) as exc:
        raise ParseError(str(exc)) from None


def read_bvh(path) -> MotionClip:
    with open(path, "r") as fh:
        text = fh.read()
    try:
        return parse_bvh(text)
    except ParseError as exc:
        raise ParseError(_bare_message(exc), line=exc.line, path=str(path)) from None


def _bare_message(exc: ParseError) -> str:
    # strip the "line N:" prefix so re-raising with a path does not double it
    msg = str(exc)
    if exc.line is not None:
        marker = f"line {exc.line}: "
        if marker in msg:
            return msg.split(marker, 1)[1]
    return msg


def write_bvh(clip: MotionClip, path=None) -> str:
    """Serialize a MotionClip to BVH text, optionally writing it to path.

    Values are printed with 10 significant digits, so a parse of the
    output reproduces the clip to well under 1e-5 per value. The
    hierarchy is always written depth-first because the format nests
    each subtree; if the clip's joint list is in some other order the
    channel columns are re-grouped to follow the joints as written.
    """
    children: dict[int, list[int]] = {i: [] for i in range(len(clip.skeleton))}
    for i, j in enumerate(clip.skeleton):
        if j.parent is not None:
            children[j.parent].append(i)

    out: list[str] = ["HIERARCHY"]
    order: list[int] = []

    def fmt(v: float) -> str:
        return f"{v:.10g}"

    def emit(idx: int, depth: int) -> None:
        j = clip.skeleton[idx]
        order.append(idx)
        pad = "  " * depth
        out.append(f"{pad}{'ROOT' if j.parent is None else 'JOINT'} {j.name}")
        out.append(f"{pad}{{")
        inner = "  " * (depth + 1)
        out.append(f"{inner}OFFSET {fmt(j.offset[0])} {fmt(j.offset[1])} {fmt(j.offset[2])}")
        out.append(f"{inner}CHANNELS {len(j.channels)} {' '.join(j.channels)}")
        kids = children[idx]
        if kids:
            for k in kids:
                emit(k, depth + 1)
        else:
            out.append(f"{inner}End Site")
            out.append(f"{inner}{{")
            out.append(f"{inner}  OFFSET 0 0 0")
            out.append(f"{inner}}}")
        out.append(f"{pad}}}")

    emit(0, 0)
    frames = clip.frames
    if order != list(range(len(clip.skeleton))):
        starts: list[int] = []
        total = 0
        for j in clip.skeleton:
            starts.append(total)
            total += len(j.channels)
        cols = [
            c
            for i in order
            for c in range(starts[i], starts[i] + len(clip.skeleton[i].channels))
        ]
        frames = clip.frames[:, cols]
    out.append("MOTION")
    out.append(f"Frames: {clip.n_frames}")
    out.append(f"Frame Time: {fmt(1.0 / clip.fps)}")
    for row in frames:
        out.append(" ".join(fmt(v) for v in row))
    text = "\n".join(out) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
