"""Planar polygon measures and edge-cancellation dissolve.

Coordinates are treated as planar. A geometry is a list of polygon parts,
each part a list of closed rings where the first ring is the outer boundary
and the rest are holes. After normalization outer rings run counter-clockwise
and holes clockwise, so signed ring areas add up to the net area.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "RegionGeometry",
    "ring_area",
    "ring_centroid",
    "ring_length",
    "centroid",
    "area",
    "perimeter",
    "ipq",
    "dissolve",
    "snap_tolerance",
]

SNAP_FRACTION = 1e-9


def _as_ring(coords) -> np.ndarray:
    ring = np.asarray(coords, dtype=float)
    if ring.ndim != 2 or ring.shape[1] != 2:
        raise ValueError("ring must be a sequence of (x, y) pairs")
    if len(ring) == 0:
        raise ValueError("empty ring")
    if not np.array_equal(ring[0], ring[-1]):
        ring = np.vstack([ring, ring[:1]])
    if len(np.unique(ring[:-1], axis=0)) < 3:
        raise ValueError("degenerate ring: fewer than 3 distinct vertices")
    return ring


def ring_area(ring: np.ndarray) -> float:
    """Signed shoelace area of a closed ring (positive when counter-clockwise)."""
    ring = np.asarray(ring, dtype=float)
    # shift to the first vertex to limit cancellation on large coordinates
    x = ring[:, 0] - ring[0, 0]
    y = ring[:, 1] - ring[0, 1]
    return 0.5 * float(np.sum(x[:-1] * y[1:] - x[1:] * y[:-1]))


def ring_centroid(ring: np.ndarray) -> tuple[float, float]:
    ring = np.asarray(ring, dtype=float)
    x0, y0 = ring[0]
    x = ring[:, 0] - x0
    y = ring[:, 1] - y0
    cross = x[:-1] * y[1:] - x[1:] * y[:-1]
    a = 0.5 * cross.sum()
    if a == 0:
        raise ValueError("zero-area ring has no centroid")
    cx = np.sum((x[:-1] + x[1:]) * cross) / (6.0 * a)
    cy = np.sum((y[:-1] + y[1:]) * cross) / (6.0 * a)
    return float(cx + x0), float(cy + y0)


def ring_length(ring: np.ndarray) -> float:
    ring = np.asarray(ring, dtype=float)
    return float(np.hypot(*np.diff(ring, axis=0).T).sum())


def _normalize_part(rings: Sequence) -> tuple[np.ndarray, ...]:
    out = []
    for r, coords in enumerate(rings):
        ring = _as_ring(coords)
        signed = ring_area(ring)
        if (r == 0 and signed < 0) or (r > 0 and signed > 0):
            ring = ring[::-1].copy()
        out.append(ring)
    return tuple(out)


@dataclass
class RegionGeometry:
    """Polygon geometry of one province or dissolved region.

    Use :meth:`from_polygons` to build one from raw coordinates; it closes
    and orients rings and computes the derived measures.
    """

    id: str
    polygons: tuple[tuple[np.ndarray, ...], ...]
    area: float
    perimeter: float
    centroid: tuple[float, float]
    name: str = ""
    members: tuple[str, ...] = field(default_factory=tuple)

    @classmethod
    def from_polygons(cls, id, polygons: Iterable[Sequence], name: str = "") -> "RegionGeometry":
        parts = tuple(_normalize_part(p) for p in polygons)
        if not parts:
            raise ValueError(f"geometry {id!r} has no polygons")
        a = sum(ring_area(r) for part in parts for r in part)
        if not a > 0:
            raise ValueError(f"degenerate geometry {id!r}: non-positive area")
        length = sum(ring_length(r) for part in parts for r in part)
        return cls(
            id=str(id),
            polygons=parts,
            area=a,
            perimeter=length,
            centroid=_centroid_of_rings([r for part in parts for r in part]),
            name=name,
        )

    @property
    def rings(self) -> list[np.ndarray]:
        return [r for part in self.polygons for r in part]

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        pts = np.vstack(self.rings)
        return (*pts.min(axis=0), *pts.max(axis=0))


def _centroid_of_rings(rings) -> tuple[float, float]:
    # holes are clockwise so their negative areas subtract
    areas = np.array([ring_area(r) for r in rings])
    total = areas.sum()
    if total == 0:
        raise ValueError("zero-area polygon has no centroid")
    cents = np.array([ring_centroid(r) if a != 0 else (0.0, 0.0) for r, a in zip(rings, areas)])
    c = (areas[:, None] * cents).sum(axis=0) / total
    return float(c[0]), float(c[1])


def _coerce(geometry) -> RegionGeometry:
    if isinstance(geometry, RegionGeometry):
        return geometry
    # a bare ring, otherwise a list of parts
    try:
        ring = np.asarray(geometry, dtype=float)
    except ValueError:
        ring = None
    if ring is not None and ring.ndim == 2:
        return RegionGeometry.from_polygons("", [[ring]])
    return RegionGeometry.from_polygons("", geometry)


def centroid(geometry) -> tuple[float, float]:
    """Area-weighted centroid of a polygon, multipolygon or bare ring."""
    return _coerce(geometry).centroid


def area(geometry) -> float:
    return _coerce(geometry).area


def perimeter(geometry) -> float:
    return _coerce(geometry).perimeter


def ipq(geometry) -> float:
    """Isoperimetric quotient ``4*pi*A / L**2``.

    Multipolygons use their total area and total boundary length.
    """
    g = _coerce(geometry)
    if not (g.area > 0 and g.perimeter > 0):
        raise ValueError("ipq requires positive area and perimeter")
    return 4.0 * math.pi * g.area / g.perimeter**2


def snap_tolerance(geometries: Iterable[RegionGeometry]) -> float:
    """Snapping tolerance as a fixed fraction of the bounding-box diagonal."""
    pts = np.vstack([np.vstack(g.rings) for g in geometries])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    diag = float(np.hypot(*(hi - lo)))
    return SNAP_FRACTION * diag if diag > 0 else SNAP_FRACTION


def _point_in_ring(pt, ring) -> bool:
    x, y = pt
    xs, ys = ring[:-1, 0], ring[:-1, 1]
    xe, ye = ring[1:, 0], ring[1:, 1]
    crosses = (ys > y) != (ye > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = xs + (y - ys) * (xe - xs) / (ye - ys)
    return bool(np.count_nonzero(crosses & (x < xint)) % 2)


def _chain(directed: list[tuple[tuple, tuple]], coords: dict) -> list[np.ndarray]:
    outgoing: dict[tuple, list[tuple]] = defaultdict(list)
    for a, b in directed:
        outgoing[a].append(b)
    for v in outgoing.values():
        v.sort()
    rings = []
    for start in sorted(outgoing):
        while outgoing[start]:
            path = [start]
            cur = outgoing[start].pop(0)
            while cur != start:
                path.append(cur)
                if not outgoing[cur]:
                    raise ValueError("boundary edges do not close into rings")
                cur = outgoing[cur].pop(0)
            path.append(start)
            rings.append(np.array([coords[p] for p in path]))
    return rings


def dissolve(members: Sequence[RegionGeometry], tol: float | None = None, id: str = "") -> RegionGeometry:
    """Merge member polygons into one region by cancelling shared edges.

    Shared borders must be made of vertex-identical edges (after snapping to
    ``tol``, which defaults to a tiny fraction of the members' bounding box).
    Area is the sum of member areas; perimeter is the total member boundary
    minus twice the length of edges shared by exactly two members.
    """
    members = list(members)
    if not members:
        raise ValueError("dissolve needs at least one member")
    ids = [g.id for g in members]
    if len(set(ids)) != len(ids):
        raise ValueError("dissolve members must be distinct")
    if len(members) == 1:
        g = members[0]
        return RegionGeometry(
            id=id or g.id, polygons=g.polygons, area=g.area, perimeter=g.perimeter,
            centroid=g.centroid, name=g.name, members=(g.id,),
        )
    if tol is None:
        tol = snap_tolerance(members)
    coords: dict[tuple, tuple[float, float]] = {}

    # vertices within tol of an earlier vertex join it; grid cells of size tol
    # bound the search to the 3 x 3 neighbouring cells
    cells: dict[tuple, list[tuple]] = defaultdict(list)

    def key(p):
        cx, cy = math.floor(p[0] / tol), math.floor(p[1] / tol)
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for rep in cells.get((cx + dx, cy + dy), ()):
                    if math.hypot(coords[rep][0] - p[0], coords[rep][1] - p[1]) <= tol:
                        return rep
        rep = (cx, cy, len(cells[(cx, cy)]))
        cells[(cx, cy)].append(rep)
        coords[rep] = (float(p[0]), float(p[1]))
        return rep

    owners: dict[tuple, list[int]] = defaultdict(list)
    directed: dict[tuple, list[tuple]] = defaultdict(list)
    lengths: dict[tuple, float] = {}
    for m, g in enumerate(members):
        for ring in g.rings:
            for p, q in zip(ring[:-1], ring[1:]):
                kp, kq = key(p), key(q)
                if kp == kq:
                    continue
                e = (kp, kq) if kp < kq else (kq, kp)
                owners[e].append(m)
                directed[e].append((kp, kq))
                lengths.setdefault(e, float(math.hypot(q[0] - p[0], q[1] - p[1])))

    shared = 0.0
    boundary = []
    for e, who in owners.items():
        if len(who) == 1:
            boundary.extend(directed[e])
        elif len(who) == 2 and who[0] != who[1] and directed[e][0] != directed[e][1]:
            shared += lengths[e]
        else:
            raise ValueError(f"inconsistent shared edge near {coords[e[0]]}: used {len(who)} times")

    total_area = float(sum(g.area for g in members))
    total_len = float(sum(g.perimeter for g in members)) - 2.0 * shared
    cx = sum(g.area * g.centroid[0] for g in members) / total_area
    cy = sum(g.area * g.centroid[1] for g in members) / total_area

    rings = _chain(boundary, coords)
    outers = [r for r in rings if ring_area(r) > 0]
    holes = [r for r in rings if ring_area(r) <= 0]
    parts: list[list[np.ndarray]] = [[r] for r in outers]
    for h in holes:
        probe = _inner_probe(h)
        hosts = [p for p in parts if _point_in_ring(probe, p[0])]
        if not hosts:
            raise ValueError("hole without an enclosing outer ring")
        # innermost enclosing outer ring
        min(hosts, key=lambda p: ring_area(p[0])).append(h)
    return RegionGeometry(
        id=id,
        polygons=tuple(tuple(p) for p in parts),
        area=total_area,
        perimeter=total_len,
        centroid=(float(cx), float(cy)),
        members=tuple(ids),
    )


def _inner_probe(ring: np.ndarray) -> np.ndarray:
    # midpoint of the first edge; hole vertices may lie on the outer ring
    return 0.5 * (ring[0] + ring[1])
