"""Per-corner constant tables: .tbl persistence and off-corner lookup.

Each of the six fitted constants (c0..c3, drift_const, d2) lives in its own
text table keyed by the micromagnetic parameter corner (Aex*1e12, B_anis,
alpha, Msat, W in nm). Values are written with shortest round-trip decimal
formatting so a write/read cycle is bit-exact.
"""

from __future__ import annotations

import bisect
import dataclasses
import itertools
import math
import os
from pathlib import Path
from typing import Iterable, Literal, Mapping

from .constants import ModelConstants, d1_from_drift

CONSTANT_NAMES = ("c0", "c1", "c2", "c3", "drift_const", "d2")

TBL_FILENAMES = {
    "c0": "lookup_maxVel_c0.tbl",
    "c1": "lookup_maxVel_c1.tbl",
    "c2": "lookup_maxVel_c2.tbl",
    "c3": "lookup_maxVel_c3.tbl",
    "drift_const": "lookup_drift_const.tbl",
    "d2": "lookup_d2.tbl",
}

_KEY_COLUMNS = "Aex(*1e12), B_anis, A, Msat, W(nm)"


class TableFormatError(ValueError):
    """Malformed .tbl content."""


class GridError(ValueError):
    """Stored corners do not form a full rectangular grid."""


class CornerNotFoundError(KeyError):
    """Exact-mode lookup miss."""


@dataclasses.dataclass(frozen=True)
class CornerKey:
    """Micromagnetic parameter corner in table units: Aex scaled by 1e12
    (J/m), anisotropy field in mT, Gilbert damping, Msat in A/m, width nm."""

    aex: float
    b_anis: float
    alpha: float
    msat: float
    width: float

    def __post_init__(self) -> None:
        for name in ("aex", "b_anis", "alpha", "msat", "width"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not self.width > 0:
            raise ValueError(f"width must be positive, got {self.width}")
        if not self.msat > 0:
            raise ValueError(f"msat must be positive, got {self.msat}")

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.aex, self.b_anis, self.alpha, self.msat, self.width)


@dataclasses.dataclass(frozen=True)
class ConstantTable:
    """Rows of (CornerKey, value) for one named constant."""

    name: str
    rows: tuple[tuple[CornerKey, float], ...]

    def __post_init__(self) -> None:
        if self.name not in CONSTANT_NAMES:
            raise ValueError(f"unknown constant name {self.name!r}")
        if not self.rows:
            raise ValueError("table must have at least one row")
        seen = set()
        for key, _ in self.rows:
            if key in seen:
                raise ValueError(f"duplicate corner {key}")
            seen.add(key)
        ordered = tuple(sorted(self.rows, key=lambda kv: kv[0].as_tuple()))
        object.__setattr__(self, "rows", ordered)

    @property
    def keys(self) -> frozenset[CornerKey]:
        return frozenset(k for k, _ in self.rows)

    def value(self, key: CornerKey) -> float:
        for k, v in self.rows:
            if k == key:
                return v
        raise CornerNotFoundError(key)

    def as_dict(self) -> dict[CornerKey, float]:
        return dict(self.rows)


def write_tbl(table: ConstantTable, dest, extra_comments: Iterable[str] = ()) -> None:
    """Write a table in the .tbl text format: '#'-prefixed header naming the
    six columns, then one space-separated row per corner."""
    close = False
    if isinstance(dest, (str, os.PathLike)):
        fh = open(dest, "w")
        close = True
    else:
        fh = dest
    try:
        fh.write(f"#{_KEY_COLUMNS}, {table.name} \n")
        for line in extra_comments:
            fh.write(f"# {line}\n")
        for key, value in table.rows:
            cells = [repr(float(x)) for x in (*key.as_tuple(), value)]
            fh.write(" ".join(cells) + "\n")
    finally:
        if close:
            fh.close()


def read_tbl(source) -> ConstantTable:
    """Parse a .tbl file. Comment lines start with '#'; the first one names
    the constant in its last column label."""
    close = False
    if isinstance(source, (str, os.PathLike)):
        fh = open(source, "r")
        close = True
        label = str(source)
    else:
        fh = source
        label = "<stream>"
    name = None
    rows: list[tuple[CornerKey, float]] = []
    try:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            if text.startswith("#"):
                if name is None:
                    name = text.split(",")[-1].strip()
                continue
            cells = text.split()
            if len(cells) != 6:
                raise TableFormatError(
                    f"{label}:{lineno}: expected 6 columns, got {len(cells)}"
                )
            try:
                values = [float(c) for c in cells]
            except ValueError:
                raise TableFormatError(f"{label}:{lineno}: non-numeric cell") from None
            key = CornerKey(*values[:5])
            if any(k == key for k, _ in rows):
                raise TableFormatError(f"{label}:{lineno}: duplicate corner {key}")
            rows.append((key, values[5]))
    finally:
        if close:
            fh.close()
    if name is None:
        raise TableFormatError(f"{label}: missing '#' header line")
    if name not in CONSTANT_NAMES:
        raise TableFormatError(f"{label}: header names unknown constant {name!r}")
    return ConstantTable(name, tuple(rows))


@dataclasses.dataclass(frozen=True)
class LookupResult:
    """Constants resolved for a query corner, with lookup diagnostics."""

    values: Mapping[str, float]
    exact: bool
    clamped: bool

    def model_constants(self, p1: float = 0.0, p2: float = 0.0, c_r: float = 0.25) -> ModelConstants:
        v = self.values
        return ModelConstants(
            c0=v["c0"],
            c1=v["c1"],
            c2=v["c2"],
            c3=v["c3"],
            d1=d1_from_drift(v["drift_const"]),
            d2=v["d2"],
            p1=p1,
            p2=p2,
            c_r=c_r,
        )


@dataclasses.dataclass(frozen=True)
class ConstantTableSet:
    """The six constant tables together; they must agree on corner keys."""

    tables: Mapping[str, ConstantTable]

    def __post_init__(self) -> None:
        missing = [n for n in CONSTANT_NAMES if n not in self.tables]
        if missing:
            raise ValueError(f"missing tables: {missing}")
        ref = self.tables[CONSTANT_NAMES[0]].keys
        for name in CONSTANT_NAMES[1:]:
            if self.tables[name].keys != ref:
                raise ValueError(f"table {name!r} disagrees on the corner key set")

    @property
    def keys(self) -> frozenset[CornerKey]:
        return self.tables["c0"].keys

    @classmethod
    def from_fits(cls, fits: Iterable) -> "ConstantTableSet":
        """Assemble from FittedCorner-like records (corner + six constants)."""
        rows: dict[str, list[tuple[CornerKey, float]]] = {n: [] for n in CONSTANT_NAMES}
        for fit in fits:
            for name in CONSTANT_NAMES:
                rows[name].append((fit.corner, getattr(fit, name)))
        return cls({n: ConstantTable(n, tuple(r)) for n, r in rows.items()})

    @classmethod
    def load_dir(cls, directory) -> "ConstantTableSet":
        directory = Path(directory)
        tables = {}
        for name, fname in TBL_FILENAMES.items():
            path = directory / fname
            if not path.exists():
                raise FileNotFoundError(f"missing table file {path}")
            table = read_tbl(path)
            if table.name != name:
                raise TableFormatError(
                    f"{path}: header names {table.name!r}, expected {name!r}"
                )
            tables[name] = table
        return cls(tables)

    def write_dir(self, directory, extra_comments: Iterable[str] = ()) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for name, fname in TBL_FILENAMES.items():
            write_tbl(self.tables[name], directory / fname, extra_comments)

    @classmethod
    def load_bundled(cls) -> "ConstantTableSet":
        """The tables shipped with the package (synthetic calibration data
        regenerated by scripts/regenerate_tables.py)."""
        from importlib.resources import files

        return cls.load_dir(Path(str(files("dwkinematics") / "data")))

    def lookup(
        self,
        key: CornerKey,
        mode: Literal["exact", "nearest", "multilinear"] = "multilinear",
    ) -> LookupResult:
        return lookup_constants(key, self, mode)


def lookup_constants(
    key: CornerKey,
    tables: ConstantTableSet,
    mode: Literal["exact", "nearest", "multilinear"] = "multilinear",
) -> LookupResult:
    """Resolve the six constants for ``key``.

    exact       error unless the corner is stored;
    nearest     Euclidean nearest in per-dimension min-max-normalized key
                space, ties broken by lexicographic key order;
    multilinear per-dimension linear interpolation on the full rectangular
                grid of stored corners, clamped outside the hull (clamping
                is flagged in the result).
    """
    stored = tables.keys
    if key in stored:
        values = {n: tables.tables[n].value(key) for n in CONSTANT_NAMES}
        return LookupResult(values, exact=True, clamped=False)

    if mode == "exact":
        raise CornerNotFoundError(key)

    if mode == "nearest":
        near = _nearest_key(key, stored)
        values = {n: tables.tables[n].value(near) for n in CONSTANT_NAMES}
        return LookupResult(values, exact=False, clamped=False)

    if mode == "multilinear":
        cellw, clamped = _grid_cell(key, stored)
        values = {}
        for name in CONSTANT_NAMES:
            data = tables.tables[name].as_dict()
            values[name] = sum(w * data[k] for k, w in cellw)
        return LookupResult(values, exact=False, clamped=clamped)

    raise ValueError(f"unknown lookup mode {mode!r}")


def _nearest_key(key: CornerKey, stored: frozenset[CornerKey]) -> CornerKey:
    pts = sorted(k.as_tuple() for k in stored)
    lo = [min(p[i] for p in pts) for i in range(5)]
    hi = [max(p[i] for p in pts) for i in range(5)]
    span = [h - l if h > l else 1.0 for l, h in zip(lo, hi)]
    q = key.as_tuple()

    def dist2(p):
        return sum(((a - b) / s) ** 2 for a, b, s in zip(p, q, span))

    best = min(pts, key=lambda p: (dist2(p), p))
    return CornerKey(*best)


def _grid_cell(
    key: CornerKey, stored: frozenset[CornerKey]
) -> tuple[list[tuple[CornerKey, float]], bool]:
    """Bracketing grid corners and their multilinear weights for the query,
    clamped onto the hull. Raises GridError when the stored corners do not
    form a full rectangular grid."""
    pts = [k.as_tuple() for k in stored]
    axes = [sorted({p[i] for p in pts}) for i in range(5)]
    expected = 1
    for axis in axes:
        expected *= len(axis)
    if expected != len(pts) or set(itertools.product(*axes)) != set(pts):
        raise GridError(
            "stored corners do not form a full rectangular grid; "
            "use nearest mode for scattered corners"
        )

    clamped = False
    per_dim: list[list[tuple[float, float]]] = []
    for qi, axis in zip(key.as_tuple(), axes):
        if qi < axis[0]:
            qi, was = axis[0], True
        elif qi > axis[-1]:
            qi, was = axis[-1], True
        else:
            was = False
        clamped |= was
        if len(axis) == 1:
            # degenerate dimension passes through; off-value queries were
            # clamped onto the single grid plane above
            per_dim.append([(axis[0], 1.0)])
            continue
        j = bisect.bisect_right(axis, qi)
        j = min(max(j, 1), len(axis) - 1)
        a, b = axis[j - 1], axis[j]
        if qi == a:
            per_dim.append([(a, 1.0)])
        elif qi == b:
            per_dim.append([(b, 1.0)])
        else:
            w = (qi - a) / (b - a)
            per_dim.append([(a, 1.0 - w), (b, w)])

    cell = []
    for combo in itertools.product(*per_dim):
        weight = 1.0
        coords = []
        for value, w in combo:
            coords.append(value)
            weight *= w
        if weight > 0.0:
            cell.append((CornerKey(*coords), weight))
    return cell, clamped
