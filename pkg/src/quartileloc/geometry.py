"""Room scenario: reference points, access points and 3D distances."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

SCHEMA_VERSION = 1

# Experimentation room of the original testbed, in meters.
PAPER_ROOM = (3.50, 3.56, 2.80)
PAPER_GRID = (4, 4)
PAPER_RP_HEIGHT = 0.87


@dataclass(frozen=True)
class Coordinates3D:
    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"coordinate {name} must be finite, got {value}")
            object.__setattr__(self, name, value)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @classmethod
    def from_iterable(cls, values: Iterable[float]) -> "Coordinates3D":
        x, y, z = values
        return cls(x, y, z)


def euclidean_distance_3d(p: Coordinates3D, q: Coordinates3D) -> float:
    """Straight-line distance between two points in meters."""
    return math.sqrt((p.x - q.x) ** 2 + (p.y - q.y) ** 2 + (p.z - q.z) ** 2)


def _inside(pos: Coordinates3D, room_dims: Sequence[float]) -> bool:
    return all(0.0 <= c <= d for c, d in zip((pos.x, pos.y, pos.z), room_dims))


@dataclass(frozen=True)
class Scenario:
    """A box-shaped room with numbered reference points and access points.

    ``reference_points`` and ``access_points`` are tuples of ``(id, position)``
    with ids running 1..R and 1..n without gaps.
    """

    room_dims: tuple[float, float, float]
    reference_points: tuple[tuple[int, Coordinates3D], ...]
    access_points: tuple[tuple[int, Coordinates3D], ...]

    def __post_init__(self):
        dims = tuple(float(d) for d in self.room_dims)
        if len(dims) != 3 or any(not math.isfinite(d) or d <= 0 for d in dims):
            raise ValueError(f"room_dims must be three positive lengths, got {self.room_dims}")
        object.__setattr__(self, "room_dims", dims)
        object.__setattr__(self, "reference_points", tuple((int(i), p) for i, p in self.reference_points))
        object.__setattr__(self, "access_points", tuple((int(i), p) for i, p in self.access_points))

        for kind, items in (("reference point", self.reference_points), ("access point", self.access_points)):
            ids = [i for i, _ in items]
            if ids != list(range(1, len(ids) + 1)):
                raise ValueError(f"{kind} ids must be consecutive starting at 1, got {ids}")
            for i, pos in items:
                if not _inside(pos, dims):
                    raise ValueError(f"{kind} {i} at {pos} lies outside room {dims}")
        if not self.reference_points:
            raise ValueError("scenario needs at least one reference point")

    @property
    def rp_ids(self) -> list[int]:
        return [i for i, _ in self.reference_points]

    @property
    def ap_ids(self) -> list[int]:
        return [i for i, _ in self.access_points]

    def rp_position(self, rp_id: int) -> Coordinates3D:
        return self.reference_points[rp_id - 1][1]

    def ap_position(self, ap_id: int) -> Coordinates3D:
        return self.access_points[ap_id - 1][1]

    def rp_coordinates(self) -> dict[int, Coordinates3D]:
        return dict(self.reference_points)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "room_dims": list(self.room_dims),
            "reference_points": [
                {"rp_id": i, "position": [p.x, p.y, p.z]} for i, p in self.reference_points
            ],
            "access_points": [
                {"ap_id": i, "position": [p.x, p.y, p.z]} for i, p in self.access_points
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Scenario":
        try:
            return cls(
                room_dims=tuple(doc["room_dims"]),
                reference_points=tuple(
                    (rp["rp_id"], Coordinates3D.from_iterable(rp["position"]))
                    for rp in doc["reference_points"]
                ),
                access_points=tuple(
                    (ap["ap_id"], Coordinates3D.from_iterable(ap["position"]))
                    for ap in doc["access_points"]
                ),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed scenario document: missing or invalid field {exc}") from exc

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "Scenario":
        return cls.from_dict(json.loads(Path(path).read_text()))


def build_grid_scenario(
    room_dims: Sequence[float],
    grid_rows: int,
    grid_cols: int,
    rp_height: float,
    ap_positions: Sequence[Coordinates3D],
) -> Scenario:
    """Place one reference point at the center of each zone of a rows x cols grid.

    Ids are assigned row-major from the room origin: rows advance along y,
    columns along x.
    """
    if grid_rows < 1 or grid_cols < 1:
        raise ValueError(f"grid must be at least 1x1, got {grid_rows}x{grid_cols}")
    size_x, size_y, size_z = (float(d) for d in room_dims)
    if not 0.0 <= rp_height <= size_z:
        raise ValueError(f"rp_height {rp_height} outside room height {size_z}")
    rps = []
    rp_id = 1
    for r in range(1, grid_rows + 1):
        for c in range(1, grid_cols + 1):
            x = (2 * c - 1) * size_x / (2 * grid_cols)
            y = (2 * r - 1) * size_y / (2 * grid_rows)
            rps.append((rp_id, Coordinates3D(x, y, rp_height)))
            rp_id += 1
    aps = [(j, pos) for j, pos in enumerate(ap_positions, start=1)]
    return Scenario((size_x, size_y, size_z), tuple(rps), tuple(aps))


def default_ap_layout(
    room_dims: Sequence[float] = PAPER_ROOM,
    count: int = 8,
    height: float = 1.6,
    offset: float = 0.3,
) -> list[Coordinates3D]:
    """Access points spaced evenly along the walls of the room.

    The perimeter is walked counter-clockwise from the origin corner and AP j
    sits at arc length ``(j + offset) * perimeter / count``. APs are then
    reordered so consecutive ids land on different walls, which keeps the
    first-n subsets spread around the room. The offset moves every AP off the
    room's mirror axes so no two reference points share a fingerprint.
    """
    size_x, size_y, size_z = (float(d) for d in room_dims)
    if not 0.0 <= height <= size_z:
        raise ValueError(f"AP height {height} outside room height {size_z}")
    perimeter = 2 * (size_x + size_y)
    positions = []
    for j in range(count):
        s = ((j + offset) * perimeter / count) % perimeter
        if s < size_x:
            xy = (s, 0.0)
        elif s < size_x + size_y:
            xy = (size_x, s - size_x)
        elif s < 2 * size_x + size_y:
            xy = (size_x - (s - size_x - size_y), size_y)
        else:
            xy = (0.0, size_y - (s - 2 * size_x - size_y))
        positions.append(Coordinates3D(xy[0], xy[1], height))
    # every other AP first, then the ones in between
    order = list(range(0, count, 2)) + list(range(1, count, 2))
    return [positions[i] for i in order]


def paper_scenario(ap_height: float = 1.6) -> Scenario:
    """The 4x4 reference-point room with the default 8-AP layout."""
    return build_grid_scenario(
        PAPER_ROOM, *PAPER_GRID, PAPER_RP_HEIGHT, default_ap_layout(PAPER_ROOM, 8, ap_height)
    )
