#!/usr/bin/env python3
"""Generate a small self-consistent demo corpus under demo_data/.

Writes a BVH clip on the reference skeleton, a pulse-train WAV, a word
TextGrid, a blendshape JSON and two annotator files, all covering the
same ten seconds, so the command-line tools have something to chew on:

    python3 scripts/make_demo_data.py
    gesturelab beats --audio demo_data/speech.wav --out beats.csv
    gesturelab stats demo_data/annotator*.txt --textgrid demo_data/words.TextGrid --fps 15
"""

import json
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from gesturelab.audio import AudioTrack, write_wav
from gesturelab.blendshapes import BLENDSHAPE_NAMES, BlendshapeTrack, write_blendshapes
from gesturelab.bvh import write_bvh
from gesturelab.skeleton import MotionClip, standard_skeleton
from gesturelab.textgrid import AlignedTranscript, Entry, write_textgrid

OUT = os.path.join(os.path.dirname(__file__), "..", "demo_data")
FPS = 15
SECONDS = 10.0
RATE = 16000

WORDS = ("we", "wave", "both", "hands", "and", "then", "point", "happy", "about", "it")


def motion(rng: np.random.Generator) -> MotionClip:
    skeleton = standard_skeleton()
    n = int(SECONDS * FPS)
    channels = sum(len(j.channels) for j in skeleton)
    t = np.arange(n)[:, None]
    amp = rng.uniform(2.0, 12.0, size=channels)
    freq = rng.uniform(0.2, 1.2, size=channels) * 2 * np.pi / FPS
    phase = rng.uniform(0, 2 * np.pi, size=channels)
    frames = amp * np.sin(t * freq + phase)
    frames[:, 0:3] = 0.0  # keep the root in place
    return MotionClip(skeleton, FPS, frames)


def speech(rng: np.random.Generator) -> AudioTrack:
    n = int(SECONDS * RATE)
    x = 0.02 * rng.standard_normal(n)
    for beat in np.arange(0.5, SECONDS, 0.7):
        i = int(beat * RATE)
        dur = int(0.08 * RATE)
        env = np.exp(-np.linspace(0, 5, dur))
        x[i:i + dur] += 0.6 * env * np.sin(2 * np.pi * 180 * np.arange(dur) / RATE)
    return AudioTrack(RATE, np.clip(x, -1, 1))


def transcript(rng: np.random.Generator) -> AlignedTranscript:
    entries = []
    t = 0.2
    i = 0
    while t < SECONDS - 0.6:
        dur = float(rng.uniform(0.25, 0.6))
        entries.append(Entry(WORDS[i % len(WORDS)], t, t + dur))
        t += dur + float(rng.uniform(0.05, 0.3))
        i += 1
    return AlignedTranscript(entries)


def face(rng: np.random.Generator) -> BlendshapeTrack:
    n = int(SECONDS * FPS)
    t = np.arange(n)[:, None]
    freq = rng.uniform(0.1, 0.8, size=52) * 2 * np.pi / FPS
    phase = rng.uniform(0, 2 * np.pi, size=52)
    weights = 0.5 + 0.5 * np.sin(t * freq + phase)
    return BlendshapeTrack(FPS, list(BLENDSHAPE_NAMES), weights)


def annotations(tr: AlignedTranscript, rng: np.random.Generator, flip: float) -> str:
    lines = ["# start end score word:agreement"]
    for k in range(0, len(tr.entries), 3):
        group = tr.entries[k:k + 3]
        score = float(rng.choice([0.6, 0.8, 1.0]))
        words = " ".join(
            f"{e.token}:{max(0.0, min(1.0, score - flip * float(rng.integers(0, 2)))):g}"
            for e in group
        )
        lines.append(f"{group[0].start:g} {group[-1].end:g} {score:g} {words}")
    return "\n".join(lines) + "\n"


def main() -> None:
    rng = np.random.default_rng(7)
    os.makedirs(OUT, exist_ok=True)

    write_bvh(motion(rng), os.path.join(OUT, "gesture.bvh"))
    write_wav(speech(rng), os.path.join(OUT, "speech.wav"))
    tr = transcript(rng)
    write_textgrid(tr, os.path.join(OUT, "words.TextGrid"))
    write_blendshapes(face(rng), os.path.join(OUT, "face.json"))
    for name, flip in (("annotator1.txt", 0.0), ("annotator2.txt", 0.2)):
        with open(os.path.join(OUT, name), "w") as fh:
            fh.write(annotations(tr, rng, flip))

    print(f"wrote demo corpus to {os.path.abspath(OUT)}")


if __name__ == "__main__":
    main()
