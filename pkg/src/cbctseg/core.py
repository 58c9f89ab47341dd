"""Volume containers, spacing, label tables, CT normalization, axis flips.

Arrays are indexed ``[x, y, z]`` and stored Fortran-contiguous so the
flattened order is x-fastest, matching the on-disk layout of the NIfTI
subset. Volumes are immutable: every operation returns a new volume, which
makes them safe to share across parallel workers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

GROUPS = ("tooth", "bone", "canal", "sinus", "implant", "other")


@dataclass(frozen=True)
class Spacing:
    """Physical voxel size in millimeters along x, y, z."""

    sx: float
    sy: float
    sz: float

    def __post_init__(self):
        for name in ("sx", "sy", "sz"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"spacing.{name} must be finite and > 0, got {v}")
            object.__setattr__(self, name, v)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.sx, self.sy, self.sz)

    def diagonal_mm(self, dims: tuple[int, int, int]) -> float:
        """Physical diagonal of a volume with these dims; exceeds any
        voxel-to-voxel distance, which makes it a safe worst-case penalty."""
        nx, ny, nz = dims
        return math.sqrt((nx * self.sx) ** 2 + (ny * self.sy) ** 2 + (nz * self.sz) ** 2)


def _narrow_int_dtype(max_value: int):
    if max_value < 256:
        return np.uint8
    if max_value < 65536:
        return np.uint16
    return np.int32


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class LabelVolume:
    """Dense 3D grid of non-negative integer labels; 0 is background."""

    data: np.ndarray
    spacing: Spacing

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 3 or arr.size == 0:
            raise ValueError(f"label volume must be non-empty 3-D, got shape {arr.shape}")
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError(f"label volume requires integer data, got {arr.dtype}")
        lo = int(arr.min())
        if lo < 0:
            raise ValueError(f"negative label {lo} in volume")
        hi = int(arr.max())
        arr = np.array(arr, dtype=_narrow_int_dtype(hi), order="F")
        object.__setattr__(self, "data", _freeze(arr))

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.data.shape

    def linear(self) -> np.ndarray:
        """Flat x-fastest view of the data."""
        return self.data.reshape(-1, order="F")

    def label_counts(self, minlength: int = 0) -> np.ndarray:
        """Voxel count per label id (index = id)."""
        return np.bincount(self.linear(), minlength=minlength)


@dataclass(frozen=True, eq=False)
class ScalarVolume:
    """Dense 3D grid of real intensities, carried as float64."""

    data: np.ndarray
    spacing: Spacing

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 3 or arr.size == 0:
            raise ValueError(f"scalar volume must be non-empty 3-D, got shape {arr.shape}")
        arr = np.array(arr, dtype=np.float64, order="F")
        object.__setattr__(self, "data", _freeze(arr))

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.data.shape

    def linear(self) -> np.ndarray:
        return self.data.reshape(-1, order="F")


Volume = LabelVolume | ScalarVolume


def volumes_equal(a: Volume, b: Volume) -> bool:
    return (type(a) is type(b) and a.dims == b.dims
            and a.spacing == b.spacing and bool(np.array_equal(a.data, b.data)))


@dataclass(frozen=True)
class NormalizationScheme:
    """Clip to [clip_lower, clip_upper], subtract shift, divide by scale."""

    clip_lower: float
    clip_upper: float
    shift: float
    scale: float

    def __post_init__(self):
        if not self.clip_lower < self.clip_upper:
            raise ValueError("clip_lower must be < clip_upper")
        if not self.scale > 0:
            raise ValueError("scale must be > 0")


# Default CT intensity normalization used throughout the toolkit.
CT_NORMALIZATION = NormalizationScheme(clip_lower=-992.0, clip_upper=3513.0,
                                       shift=811.0, scale=1001.0)


@dataclass(frozen=True)
class ClassEntry:
    label: int
    name: str
    group: str

    def __post_init__(self):
        if not isinstance(self.label, int) or self.label <= 0:
            raise ValueError(f"class label must be a positive integer, got {self.label!r}")
        if self.group not in GROUPS:
            raise ValueError(f"unknown group {self.group!r} (expected one of {GROUPS})")


@dataclass(frozen=True)
class ClassTable:
    """The evaluated label set: id, human-readable name, coarse group."""

    entries: tuple[ClassEntry, ...]

    def __post_init__(self):
        if not self.entries:
            raise ValueError("class table is empty")
        ids = [e.label for e in self.entries]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate label ids in class table")
        object.__setattr__(self, "_by_id", {e.label: e for e in self.entries})

    def label_ids(self) -> tuple[int, ...]:
        return tuple(e.label for e in self.entries)

    def __contains__(self, label_id: int) -> bool:
        return label_id in self._by_id

    def __len__(self) -> int:
        return len(self.entries)

    def entry(self, label_id: int) -> ClassEntry:
        return self._by_id[label_id]

    def max_label(self) -> int:
        return max(e.label for e in self.entries)


def load_class_table(path: str | Path | None = None) -> ClassTable:
    """Load a class table from JSON; ``None`` loads the packaged 42-class
    dental CBCT table (jawbones, canals, sinuses, misc + 32 FDI teeth)."""
    if path is None:
        text = resources.files("cbctseg.data").joinpath(
            "toothfairy2_classes.json").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    doc = json.loads(text)
    if not isinstance(doc, list):
        raise ValueError("class table JSON must be an array of objects")
    entries = []
    for item in doc:
        try:
            entries.append(ClassEntry(label=int(item["label"]), name=str(item["name"]),
                                      group=str(item["group"])))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed class table entry {item!r}") from exc
    return ClassTable(tuple(entries))


def normalize_ct(vol: ScalarVolume, scheme: NormalizationScheme) -> ScalarVolume:
    """Clamp-shift-scale intensity normalization; dims and spacing preserved."""
    out = (np.clip(vol.data, scheme.clip_lower, scheme.clip_upper) - scheme.shift) / scheme.scale
    return ScalarVolume(out, vol.spacing)


def flip_axis(vol: Volume, axis: int) -> Volume:
    """Reverse voxel order along one axis (0, 1 or 2)."""
    if axis not in (0, 1, 2):
        raise ValueError(f"axis must be 0, 1 or 2, got {axis}")
    return type(vol)(np.flip(vol.data, axis=axis), vol.spacing)


def class_mask(vol: LabelVolume, label_id: int) -> tuple[np.ndarray, int]:
    """Binary mask of one label plus its voxel count."""
    if label_id < 0:
        raise ValueError("label_id must be >= 0")
    mask = vol.data == label_id
    return mask, int(np.count_nonzero(mask))
