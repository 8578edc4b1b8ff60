"""Geometry and attribute loading, household aggregation, education mapping."""
from __future__ import annotations

import csv
import enum
import json
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .geometry import RegionGeometry

__all__ = [
    "EducationGrade",
    "education_years",
    "Factor",
    "POVERTY_FACTORS",
    "FeatureTable",
    "HouseholdRecord",
    "load_geometry",
    "write_geojson",
    "read_households",
    "write_households",
    "aggregate_households",
    "gini",
    "ratio_20_20",
]


class EducationGrade(enum.Enum):
    UNEDUCATED = "Uneducated"
    KINDERGARTEN = "Kindergarten"
    PRE_ELEMENTARY = "Pre-elementary school"
    ELEMENTARY = "Elementary school"
    JUNIOR_HIGH = "Junior high school"
    SENIOR_HIGH = "Senior high school"
    VOCATIONAL = "Vocational degree"
    BACHELOR = "Bachelor degree"
    POST_GRADUATE = "Post-graduate"


_YEARS = {
    EducationGrade.UNEDUCATED: 0,
    EducationGrade.KINDERGARTEN: 0,
    EducationGrade.PRE_ELEMENTARY: 3,
    EducationGrade.ELEMENTARY: 6,
    EducationGrade.JUNIOR_HIGH: 9,
    EducationGrade.SENIOR_HIGH: 12,
    EducationGrade.VOCATIONAL: 14,
    EducationGrade.BACHELOR: 16,
    EducationGrade.POST_GRADUATE: 19,
}

_GRADE_LOOKUP = {g.value.casefold(): g for g in EducationGrade}
_GRADE_LOOKUP.update({g.name.casefold(): g for g in EducationGrade})


def _grade(label) -> EducationGrade:
    if isinstance(label, EducationGrade):
        return label
    try:
        return _GRADE_LOOKUP[str(label).strip().casefold()]
    except KeyError:
        raise ValueError(f"unknown education grade {label!r}") from None


def education_years(grade) -> int:
    """Years of schooling credited to an education grade label."""
    return _YEARS[_grade(grade)]


@dataclass(frozen=True)
class Factor:
    name: str
    aspect: str | None = None
    polarity: int = 1
    label: str = ""


# the nine province-level poverty factors, in reporting order
POVERTY_FACTORS = (
    Factor("years_of_education", "Education", +1, "Years of education"),
    Factor("monthly_income", "Income", +1, "Monthly income"),
    Factor("yearly_savings", "Income", +1, "Yearly savings"),
    Factor("pct_without_savings", "Income", -1, "Percentage of households without savings"),
    Factor("income_ratio_20_20", "Inequality", -1, "Monthly income ratio 20:20"),
    Factor("gini_index", "Inequality", -1, "Gini index"),
    Factor("pct_formal_debt", "Debt", -1, "Percentage of households with formal debt"),
    Factor("pct_alcohol", "Living aspect", -1, "Alcohol consumption"),
    Factor("pct_smoking", "Living aspect", -1, "Smoking"),
)
_KNOWN_FACTORS = {f.name: f for f in POVERTY_FACTORS}


@dataclass
class FeatureTable:
    """Province x factor matrix.

    ``values[i, c]`` is factor ``factors[c]`` for province ``ids[i]``.
    """

    ids: tuple[str, ...]
    factors: tuple[Factor, ...]
    values: np.ndarray

    def __post_init__(self):
        self.ids = tuple(str(i) for i in self.ids)
        self.factors = tuple(f if isinstance(f, Factor) else _KNOWN_FACTORS.get(f, Factor(f)) for f in self.factors)
        self.values = np.asarray(self.values, dtype=float)
        n, p = len(self.ids), len(self.factors)
        if self.values.shape != (n, p):
            raise ValueError(f"values shape {self.values.shape} does not match {n} ids x {p} factors")
        if len(set(self.ids)) != n:
            raise ValueError("duplicate province ids")
        if len({f.name for f in self.factors}) != p:
            raise ValueError("duplicate factor names")
        if n < 1:
            raise ValueError("a feature table needs at least one province")
        if not np.all(np.isfinite(self.values)):
            bad = sorted({self.factors[c].name for c in np.argwhere(~np.isfinite(self.values))[:, 1]})
            raise ValueError(f"missing or non-finite values in {', '.join(bad)}")

    @property
    def names(self) -> list[str]:
        return [f.name for f in self.factors]

    def column(self, name: str) -> np.ndarray:
        try:
            return self.values[:, self.names.index(name)]
        except ValueError:
            raise KeyError(f"no factor named {name!r}") from None

    def select(self, names: Sequence[str]) -> "FeatureTable":
        idx = [self.names.index(n) for n in names]
        return FeatureTable(self.ids, [self.factors[i] for i in idx], self.values[:, idx])

    def reorder(self, ids: Sequence[str]) -> "FeatureTable":
        """Rows rearranged to follow ``ids`` (which must be the same set)."""
        pos = {pid: i for i, pid in enumerate(self.ids)}
        missing = [i for i in ids if i not in pos]
        if missing or len(ids) != len(self.ids):
            raise ValueError(f"attribute rows do not match geometry ids (unmatched: {missing[:5]})")
        return FeatureTable(tuple(ids), self.factors, self.values[[pos[i] for i in ids]])

    @classmethod
    def from_csv(cls, path, id_column: str = "province_id") -> "FeatureTable":
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or id_column not in reader.fieldnames:
                raise ValueError(f"{path}: header row with a {id_column!r} column is required")
            cols = [c for c in reader.fieldnames if c != id_column]
            ids, rows = [], []
            for line, rec in enumerate(reader, start=2):
                ids.append(rec[id_column])
                try:
                    rows.append([float(rec[c]) for c in cols])
                except (TypeError, ValueError):
                    raise ValueError(f"{path}:{line}: non-numeric or missing value") from None
        return cls(tuple(ids), tuple(cols), np.array(rows, dtype=float).reshape(len(ids), len(cols)))

    def to_csv(self, path, id_column: str = "province_id") -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([id_column, *self.names])
            for pid, row in zip(self.ids, self.values):
                w.writerow([pid, *(f"{v:.12g}" for v in row)])


# --------------------------------------------------------------------------
# geometry I/O


def _parts(geom: dict) -> list:
    kind = geom.get("type")
    if kind == "Polygon":
        return [geom["coordinates"]]
    if kind == "MultiPolygon":
        return list(geom["coordinates"])
    raise ValueError(f"unsupported geometry type {kind!r}")


def load_geometry(path, id_property: str = "id", name_property: str = "name") -> list[RegionGeometry]:
    """Read a GeoJSON FeatureCollection of (Multi)Polygons keyed by an id property."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: malformed GeoJSON ({exc})") from None
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise ValueError(f"{path}: expected a FeatureCollection")
    out, seen = [], set()
    for n, feat in enumerate(doc.get("features", [])):
        props = feat.get("properties") or {}
        fid = props.get(id_property, feat.get("id"))
        if fid is None:
            raise ValueError(f"{path}: feature {n} has no {id_property!r} property")
        fid = str(fid)
        if fid in seen:
            raise ValueError(f"{path}: duplicate id {fid!r}")
        seen.add(fid)
        geom = feat.get("geometry")
        if not geom:
            raise ValueError(f"{path}: feature {fid!r} has no geometry")
        try:
            out.append(RegionGeometry.from_polygons(fid, _parts(geom), name=str(props.get(name_property, ""))))
        except (ValueError, TypeError, KeyError) as exc:
            raise ValueError(f"{path}: feature {fid!r}: {exc}") from None
    if not out:
        raise ValueError(f"{path}: no features")
    return out


def write_geojson(geometries: Iterable[RegionGeometry], path, properties: dict | None = None) -> None:
    """Write geometries as a FeatureCollection; ``properties`` maps id -> extra props."""
    properties = properties or {}
    feats = []
    for g in geometries:
        coords = [[[[float(x), float(y)] for x, y in ring] for ring in part] for part in g.polygons]
        geom = {"type": "Polygon", "coordinates": coords[0]} if len(coords) == 1 else {"type": "MultiPolygon", "coordinates": coords}
        props = {"id": g.id}
        if g.name:
            props["name"] = g.name
        props.update(properties.get(g.id, {}))
        feats.append({"type": "Feature", "properties": props, "geometry": geom})
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"type": "FeatureCollection", "features": feats}, fh)
        fh.write("\n")


# --------------------------------------------------------------------------
# households


@dataclass(frozen=True)
class HouseholdRecord:
    province: str
    monthly_income: float
    education_grade: EducationGrade
    has_savings: bool
    yearly_savings: float
    formal_debt: bool
    alcohol: bool
    smoking: bool

    def __post_init__(self):
        object.__setattr__(self, "education_grade", _grade(self.education_grade))
        if self.monthly_income < 0 or self.yearly_savings < 0:
            raise ValueError(f"negative monetary value in household of province {self.province!r}")


HOUSEHOLD_COLUMNS = (
    "province_id", "monthly_income", "education_grade", "has_savings",
    "yearly_savings", "formal_debt", "alcohol", "smoking",
)

_TRUE = {"1", "true", "t", "yes", "y"}
_FALSE = {"0", "false", "f", "no", "n"}


def _bool(text: str) -> bool:
    t = text.strip().casefold()
    if t in _TRUE:
        return True
    if t in _FALSE:
        return False
    raise ValueError(f"not a boolean: {text!r}")


def read_households(path) -> list[HouseholdRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in HOUSEHOLD_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"{path}: missing household columns {missing}")
        out = []
        for line, r in enumerate(reader, start=2):
            try:
                out.append(HouseholdRecord(
                    province=r["province_id"],
                    monthly_income=float(r["monthly_income"]),
                    education_grade=r["education_grade"],
                    has_savings=_bool(r["has_savings"]),
                    yearly_savings=float(r["yearly_savings"] or 0.0),
                    formal_debt=_bool(r["formal_debt"]),
                    alcohol=_bool(r["alcohol"]),
                    smoking=_bool(r["smoking"]),
                ))
            except ValueError as exc:
                raise ValueError(f"{path}:{line}: {exc}") from None
    return out


def write_households(records: Iterable[HouseholdRecord], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HOUSEHOLD_COLUMNS)
        for r in records:
            w.writerow([
                r.province, repr(float(r.monthly_income)), r.education_grade.value, int(r.has_savings),
                repr(float(r.yearly_savings)), int(r.formal_debt), int(r.alcohol), int(r.smoking),
            ])


def gini(incomes) -> float:
    """Gini index from the mean absolute difference, G = sum|yi-yj| / (2 n^2 mean)."""
    y = np.sort(np.asarray(incomes, dtype=float))
    n = len(y)
    if n == 0 or y.sum() <= 0:
        raise ValueError("Gini index undefined for empty or all-zero incomes")
    # sum_{i,j} |yi - yj| = 2 * sum_i (2i - n + 1) y_(i) over sorted y
    i = np.arange(n)
    mad_sum = 2.0 * math.fsum((2 * i - n + 1) * y)
    return float(mad_sum / (2.0 * n * math.fsum(y)))


def ratio_20_20(incomes) -> float:
    """Mean income of the top quintile over the bottom quintile.

    Each quintile holds ``ceil(n / 5)`` households after a stable sort.
    """
    y = np.asarray(incomes, dtype=float)
    if len(y) == 0:
        raise ValueError("no incomes")
    y = y[np.argsort(y, kind="stable")]
    m = math.ceil(len(y) / 5)
    bottom = math.fsum(y[:m])
    if bottom <= 0:
        raise ValueError("20:20 ratio undefined: bottom-quintile mean income is zero")
    return float(math.fsum(y[-m:]) / bottom)


def _mean(values) -> float:
    # fsum is exactly rounded, so the result does not depend on record order
    vals = [float(v) for v in values]
    return math.fsum(vals) / len(vals)


def aggregate_households(records: Sequence[HouseholdRecord], province_ids: Sequence[str] | None = None) -> FeatureTable:
    """Collapse household records into the nine province-level poverty factors.

    Province order follows ``province_ids`` when given (usually the geometry
    order), otherwise sorted id order. Mean savings is taken over savers only;
    a province without savers gets 0.
    """
    groups: dict[str, list[HouseholdRecord]] = defaultdict(list)
    for r in records:
        groups[r.province].append(r)
    if province_ids is None:
        province_ids = sorted(groups)
    else:
        known = set(province_ids)
        stray = sorted(set(groups) - known)
        if stray:
            raise ValueError(f"households reference unknown provinces: {stray[:5]}")
    rows = []
    for pid in province_ids:
        recs = groups.get(pid)
        if not recs:
            raise ValueError(f"province {pid!r} has no household records")
        income = np.array([r.monthly_income for r in recs])
        savers = [r.yearly_savings for r in recs if r.has_savings]
        try:
            g = gini(income)
            ratio = ratio_20_20(income)
        except ValueError as exc:
            raise ValueError(f"province {pid!r}: {exc}") from None
        rows.append([
            _mean(education_years(r.education_grade) for r in recs),
            _mean(income),
            _mean(savers) if savers else 0.0,
            100.0 * _mean(not r.has_savings for r in recs),
            ratio,
            g,
            100.0 * _mean(r.formal_debt for r in recs),
            100.0 * _mean(r.alcohol for r in recs),
            100.0 * _mean(r.smoking for r in recs),
        ])
    return FeatureTable(tuple(province_ids), POVERTY_FACTORS, np.array(rows))
