"""TDS1: the on-disk labeled-sample container.

Little-endian layout. Header: magic "TDS1", version u16, image width u16,
image height u16, prev-command window u8, label count u8 (always 5),
sample count u32, flight count u32 — 20 bytes. Each sample: flight id
u32, label u8, height f32, tof f32, command count f32, previous-command
codes u8 x K (255 = none, most recent first), then width*height
grayscale bytes. Command codes, not one-hot vectors, are stored; one-hot
expansion is a model-side transform.

A JSONL sidecar export (one object per sample, pixels base64) exists for
debugging and for consumers that prefer text.
"""

from __future__ import annotations

import base64
import json
import struct
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from .rng import Rng

MAGIC = b"TDS1"
VERSION = 1
LABEL_COUNT = 5
NO_COMMAND = 255

_HEADER = struct.Struct("<4sHHHBBII")  # 20 bytes
_SAMPLE_FIXED = struct.Struct("<IBfff")  # flight_id, label, height, tof, cmd_count


class DatasetFormatError(ValueError):
    pass


class CorruptHeaderError(DatasetFormatError):
    pass


class VersionMismatchError(DatasetFormatError):
    pass


class TruncatedBodyError(DatasetFormatError):
    pass


@dataclass(frozen=True)
class Sample:
    flight_id: int
    label: int
    height_m: float
    tof_m: float
    cmd_count: float
    prev_cmds: Tuple[int, ...]  # length = prev_k, most recent first, 255-padded
    pixels: bytes

    def __post_init__(self) -> None:
        if not 0 <= self.label < LABEL_COUNT:
            raise ValueError("label out of range")


@dataclass
class Dataset:
    width: int
    height: int
    prev_k: int
    samples: List[Sample] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.samples)

    def flight_ids(self) -> List[int]:
        seen: Dict[int, None] = {}
        for s in self.samples:
            seen.setdefault(s.flight_id, None)
        return list(seen)

    @property
    def flight_count(self) -> int:
        return len(set(s.flight_id for s in self.samples))


def write_dataset(dataset: Dataset, path: str) -> None:
    pix_len = dataset.width * dataset.height
    with open(path, "wb") as f:
        f.write(_HEADER.pack(MAGIC, VERSION, dataset.width, dataset.height,
                             dataset.prev_k, LABEL_COUNT,
                             len(dataset.samples), dataset.flight_count))
        for s in dataset.samples:
            if len(s.prev_cmds) != dataset.prev_k:
                raise ValueError("sample prev_cmds length != prev_k")
            if len(s.pixels) != pix_len:
                raise ValueError("sample pixel buffer size mismatch")
            f.write(_SAMPLE_FIXED.pack(s.flight_id, s.label,
                                       s.height_m, s.tof_m, s.cmd_count))
            f.write(bytes(s.prev_cmds))
            f.write(s.pixels)


def read_dataset(path: str) -> Dataset:
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < _HEADER.size:
        raise CorruptHeaderError("file shorter than header")
    magic, version, width, height, prev_k, label_count, n_samples, n_flights = \
        _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise CorruptHeaderError(f"bad magic {magic!r}")
    if version != VERSION:
        raise VersionMismatchError(f"unsupported version {version}")
    if label_count != LABEL_COUNT:
        raise CorruptHeaderError(f"label count {label_count} != {LABEL_COUNT}")
    pix_len = width * height
    record = _SAMPLE_FIXED.size + prev_k + pix_len
    if len(data) != _HEADER.size + n_samples * record:
        raise TruncatedBodyError(
            f"expected {_HEADER.size + n_samples * record} bytes, got {len(data)}")
    samples: List[Sample] = []
    off = _HEADER.size
    for _ in range(n_samples):
        flight_id, label, height_m, tof_m, cmd_count = _SAMPLE_FIXED.unpack_from(data, off)
        off += _SAMPLE_FIXED.size
        prev = tuple(data[off:off + prev_k])
        off += prev_k
        pixels = data[off:off + pix_len]
        off += pix_len
        samples.append(Sample(flight_id, label, height_m, tof_m, cmd_count, prev, pixels))
    ds = Dataset(width, height, prev_k, samples)
    if ds.flight_count != n_flights:
        raise CorruptHeaderError(
            f"header flight count {n_flights} != body flight count {ds.flight_count}")
    return ds


def label_histogram(dataset: Dataset) -> Tuple[List[int], int]:
    """Per-label sample counts plus the number of distinct flights."""
    counts = [0] * LABEL_COUNT
    for s in dataset.samples:
        counts[s.label] += 1
    return counts, dataset.flight_count


def label_shares(counts: Sequence[int]) -> List[float]:
    total = sum(counts)
    if total == 0:
        return [0.0] * len(counts)
    return [c / total for c in counts]


def split_dataset(dataset: Dataset, fractions: Sequence[float], rng: Rng) -> List[Dataset]:
    """Partition by whole flights: every sample of a flight lands in the
    same partition. Flights are assigned in seed-shuffled order, each to
    the partition with the largest shortfall against its target share at
    the running total (ties to the lower index); the result matches every
    fraction to within one flight's worth of samples."""
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ValueError("fractions must sum to 1")
    by_flight: Dict[int, List[Tuple[int, Sample]]] = {}
    for i, s in enumerate(dataset.samples):
        by_flight.setdefault(s.flight_id, []).append((i, s))
    flights = list(by_flight)
    rng.shuffle(flights)
    assigned: List[List[Tuple[int, Sample]]] = [[] for _ in fractions]
    counts = [0] * len(fractions)
    total = 0
    for fid in flights:
        size = len(by_flight[fid])
        total += size
        deficits = [fractions[i] * total - counts[i] for i in range(len(fractions))]
        idx = max(range(len(fractions)), key=lambda i: (deficits[i], -i))
        assigned[idx].extend(by_flight[fid])
        counts[idx] += size
    out = []
    for part in assigned:
        part.sort(key=lambda pair: pair[0])
        out.append(Dataset(dataset.width, dataset.height, dataset.prev_k,
                           [s for _, s in part]))
    return out


def write_jsonl(dataset: Dataset, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for s in dataset.samples:
            f.write(json.dumps({
                "flight_id": s.flight_id,
                "label": s.label,
                "height_m": s.height_m,
                "tof_m": s.tof_m,
                "cmd_count": s.cmd_count,
                "prev_cmds": list(s.prev_cmds),
                "image": {
                    "w": dataset.width,
                    "h": dataset.height,
                    "pixels_b64": base64.b64encode(s.pixels).decode("ascii"),
                },
            }))
            f.write("\n")


def read_jsonl(path: str, prev_k: int = 2) -> Dataset:
    samples: List[Sample] = []
    width = height = None
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            obj = json.loads(line)
            width = obj["image"]["w"]
            height = obj["image"]["h"]
            samples.append(Sample(
                obj["flight_id"], obj["label"], obj["height_m"], obj["tof_m"],
                obj["cmd_count"], tuple(obj["prev_cmds"]),
                base64.b64decode(obj["image"]["pixels_b64"]),
            ))
    if width is None:
        raise DatasetFormatError("empty JSONL dataset")
    k = len(samples[0].prev_cmds) if samples else prev_k
    return Dataset(width, height, k, samples)
