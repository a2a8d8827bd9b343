"""Absorbance plates -> percent-death samples per concentration.

All combinations are Cartesian: every blank is subtracted from every
reading, and every corrected treated value is divided by every corrected
live-control value.
"""
from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .models import Dataset


class IngestError(ValueError):
    pass


def _nonempty(values, name: str) -> np.ndarray:
    a = np.asarray(values, dtype=float).ravel()
    if a.size == 0:
        raise IngestError(f"{name} is empty")
    return a


def blank_correct(S, B) -> np.ndarray:
    """All pairwise differences s - b, length |S|*|B|."""
    s, b = _nonempty(S, "readings"), _nonempty(B, "blanks")
    return np.subtract.outer(s, b).ravel()


def living_fraction(Fstar, Lstar) -> tuple[np.ndarray, int]:
    """All pairwise quotients F*/L*; non-finite quotients are dropped and counted."""
    f, l = _nonempty(Fstar, "treated"), _nonempty(Lstar, "live controls")
    with np.errstate(all="ignore"):
        q = np.divide.outer(f, l).ravel()
    keep = np.isfinite(q)
    return q[keep], int(q.size - keep.sum())


def percent_death(p) -> np.ndarray:
    """100 (1 - p); negative values are kept."""
    return 100.0 * (1.0 - np.asarray(p, dtype=float))


@dataclass(frozen=True)
class EffectSample:
    concentration: float
    y_values: np.ndarray
    dropped_nonfinite: int

    @property
    def kept(self) -> int:
        return self.y_values.size

    @property
    def raw(self) -> int:
        return self.kept + self.dropped_nonfinite


@dataclass(frozen=True)
class AbsorbanceSets:
    blanks: np.ndarray
    live: np.ndarray
    treated: dict[float, np.ndarray]

    def __post_init__(self):
        for name, a in (("blanks", self.blanks), ("live controls", self.live),
                        *((f"treated {c}", a) for c, a in self.treated.items())):
            if np.asarray(a).size == 0:
                raise IngestError(f"{name} is empty")
            if not np.all(np.isfinite(a)):
                raise IngestError(f"{name} contains non-finite absorbance")
        if not self.treated:
            raise IngestError("no treated concentrations given")


def effect_sample(concentration: float, treated, live_star: np.ndarray, blanks) -> EffectSample:
    p, dropped = living_fraction(blank_correct(treated, blanks), live_star)
    return EffectSample(float(concentration), percent_death(p), dropped)


def process(sets: AbsorbanceSets, workers: int | None = None) -> list[EffectSample]:
    """One sample per concentration, in ascending concentration order."""
    live_star = blank_correct(sets.live, sets.blanks)
    concs = sorted(sets.treated)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(
            lambda c: effect_sample(c, sets.treated[c], live_star, sets.blanks), concs))


def to_dataset(samples: list[EffectSample]) -> Dataset:
    x = np.concatenate([np.full(s.kept, s.concentration) for s in samples])
    y = np.concatenate([s.y_values for s in samples])
    return Dataset(x, y)


def read_absorbance(path) -> np.ndarray:
    """CSV with columns (well_id, absorbance); a header row is optional."""
    path = Path(path)
    try:
        fh = path.open(newline="")
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc.strerror}") from None
    values = []
    with fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 2:
                raise IngestError(f"{path}:{lineno}: expected well_id,absorbance")
            try:
                v = float(row[1])
            except ValueError:
                if lineno == 1:
                    continue
                raise IngestError(f"{path}:{lineno}: absorbance {row[1]!r} is not a number") from None
            if not np.isfinite(v):
                raise IngestError(f"{path}:{lineno}: absorbance is not finite")
            values.append(v)
    if not values:
        raise IngestError(f"{path}: no absorbance values")
    return np.asarray(values)


def read_manifest(path) -> dict[float, Path]:
    """CSV with columns (concentration, file); relative files resolve against the manifest."""
    path = Path(path)
    try:
        rows = list(csv.reader(path.open(newline="")))
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc.strerror}") from None
    out: dict[float, Path] = {}
    for lineno, row in enumerate(rows, 1):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) < 2:
            raise IngestError(f"{path}:{lineno}: expected concentration,file")
        try:
            c = float(row[0])
        except ValueError:
            if lineno == 1:
                continue
            raise IngestError(f"{path}:{lineno}: concentration {row[0]!r} is not a number") from None
        out[c] = path.parent / row[1].strip()
    if not out:
        raise IngestError(f"{path}: manifest lists no treated files")
    return out


def parse_treated(spec: str) -> tuple[float, Path]:
    conc, sep, file = spec.partition("=")
    if not sep or not file:
        raise IngestError(f"--treated expects conc=file, got {spec!r}")
    try:
        return float(conc), Path(file)
    except ValueError:
        raise IngestError(f"--treated concentration {conc!r} is not a number") from None
