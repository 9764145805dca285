"""TTP benchmark instances: parsing, validation, construction, serialization.

City indices are 1-based in files and reports, 0-based internally. Instances
are immutable after construction and safe to share across workers.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence, Union

import numpy as np

__all__ = [
    "Item",
    "TtpInstance",
    "InstanceError",
    "ParseError",
    "parse_instance",
    "build_instance",
    "load_instance",
    "instance_from_json",
    "serialize_instance",
]


class InstanceError(ValueError):
    """Invalid instance data (bad matrix, bad speeds, bad item placement)."""


class ParseError(InstanceError):
    """Malformed instance file; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Item:
    """One collectible item: profit, weight, and its home city (0-based)."""

    profit: float
    weight: float
    city: int


@dataclass(frozen=True)
class TtpInstance:
    name: str
    num_cities: int
    capacity: float
    v_min: float
    v_max: float
    renting_ratio: float  # parsed and stored, never used in objectives
    distance: np.ndarray
    items: tuple[Item, ...]
    coords: np.ndarray | None = None
    edge_weight_type: str = "EXPLICIT"
    extra_headers: tuple[tuple[str, str], ...] = ()
    # Flat per-item arrays, derived once; read-only views for fast evaluation.
    profits: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)
    item_city: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = self.num_cities
        if n < 2:
            raise InstanceError("instance needs at least 2 cities")
        if self.capacity <= 0:
            raise InstanceError("capacity must be positive")
        if self.v_min <= 0 or self.v_min >= self.v_max:
            raise InstanceError("speeds must satisfy 0 < v_min < v_max")
        d = np.asarray(self.distance, dtype=float)
        if d.shape != (n, n):
            raise InstanceError(f"distance matrix must be {n}x{n}, got {d.shape}")
        if np.any(d < 0):
            raise InstanceError("distances must be non-negative")
        if np.any(np.diag(d) != 0):
            raise InstanceError("distance matrix must have zero diagonal")
        if not np.array_equal(d, d.T):
            raise InstanceError("distance matrix must be symmetric")
        d.flags.writeable = False
        object.__setattr__(self, "distance", d)
        if self.coords is not None:
            c = np.asarray(self.coords, dtype=float)
            if c.shape != (n, 2):
                raise InstanceError(f"coords must be {n}x2, got {c.shape}")
            c.flags.writeable = False
            object.__setattr__(self, "coords", c)
        for it in self.items:
            if not (1 <= it.city < n):
                raise InstanceError(
                    f"item at city {it.city + 1} out of range [2, {n}] "
                    "(the depot city 1 holds no items)"
                )
            if it.profit <= 0 or it.weight <= 0:
                raise InstanceError("item profit and weight must be positive")
        heavy = sum(1 for it in self.items if it.weight > self.capacity)
        if heavy:
            warnings.warn(
                f"{heavy} item(s) heavier than the knapsack capacity; retained "
                "but never selectable",
                stacklevel=2,
            )
        for name, arr in (
            ("profits", np.array([it.profit for it in self.items], dtype=float)),
            ("weights", np.array([it.weight for it in self.items], dtype=float)),
            ("item_city", np.array([it.city for it in self.items], dtype=np.intp)),
        ):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def num_items(self) -> int:
        return len(self.items)

    def items_at_city(self) -> list[list[int]]:
        """Global item ids grouped by 0-based home city, in instance order."""
        groups: list[list[int]] = [[] for _ in range(self.num_cities)]
        for m, it in enumerate(self.items):
            groups[it.city].append(m)
        return groups

    @property
    def max_items_per_city(self) -> int:
        if not self.items:
            return 0
        return max(len(g) for g in self.items_at_city())


_HEADER_KEYS = {
    "PROBLEM NAME": "name",
    "NAME": "name",
    "DIMENSION": "num_cities",
    "NUMBER OF ITEMS": "num_items",
    "CAPACITY OF KNAPSACK": "capacity",
    "MIN SPEED": "v_min",
    "MAX SPEED": "v_max",
    "RENTING RATIO": "renting_ratio",
    "EDGE_WEIGHT_TYPE": "edge_weight_type",
}

_SUPPORTED_EDGE_WEIGHTS = ("CEIL_2D",)


def _read_lines(source: Union[str, bytes, IO]) -> list[str]:
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    return text.splitlines()


def parse_instance(source: Union[str, bytes, IO]) -> TtpInstance:
    """Parse a TTP-format text file (header, NODE_COORD_SECTION, ITEMS SECTION).

    ``source`` may be text, bytes, or an open file. Every structural problem
    is reported as :class:`ParseError` with its 1-based line number.
    """
    lines = _read_lines(source)
    fields: dict[str, object] = {}
    extra: list[tuple[str, str]] = []
    coords: list[tuple[float, float]] = []
    raw_items: list[tuple[float, float, int, int]] = []  # profit, weight, city, line

    i = 0
    n_lines = len(lines)
    while i < n_lines:
        line = lines[i].strip()
        i += 1
        if not line:
            continue
        upper = line.upper()
        if upper.startswith("NODE_COORD_SECTION"):
            n = fields.get("num_cities")
            if n is None:
                raise ParseError("NODE_COORD_SECTION before DIMENSION", i)
            for j in range(int(n)):
                if i >= n_lines or not lines[i].strip():
                    raise ParseError(
                        f"expected {n} coordinate lines, found {j}", i
                    )
                parts = lines[i].split()
                i += 1
                try:
                    idx, x, y = int(parts[0]), float(parts[1]), float(parts[2])
                except (ValueError, IndexError):
                    raise ParseError("malformed coordinate line", i) from None
                if idx != j + 1:
                    raise ParseError(
                        f"coordinate index {idx}, expected {j + 1} "
                        "(dimension/coord-count mismatch?)",
                        i,
                    )
                coords.append((x, y))
            continue
        if upper.startswith("ITEMS SECTION"):
            m = fields.get("num_items")
            if m is None:
                raise ParseError("ITEMS SECTION before NUMBER OF ITEMS", i)
            for j in range(int(m)):
                if i >= n_lines or not lines[i].strip():
                    raise ParseError(f"expected {m} item lines, found {j}", i)
                parts = lines[i].split()
                i += 1
                try:
                    idx = int(parts[0])
                    p, w, city = float(parts[1]), float(parts[2]), int(parts[3])
                except (ValueError, IndexError):
                    raise ParseError("malformed item line", i) from None
                if idx != j + 1:
                    raise ParseError(f"item index {idx}, expected {j + 1}", i)
                if p <= 0 or w <= 0:
                    raise ParseError("item profit and weight must be positive", i)
                raw_items.append((p, w, city, i))
            continue
        if ":" not in line:
            raise ParseError(f"malformed header line (no key): {line!r}", i)
        key, _, value = line.partition(":")
        key_norm = " ".join(key.split()).upper()
        value = value.strip()
        if not key_norm:
            raise ParseError("malformed header key", i)
        if key_norm in _HEADER_KEYS:
            field_name = _HEADER_KEYS[key_norm]
            try:
                if field_name in ("num_cities", "num_items"):
                    fields[field_name] = int(value)
                elif field_name in ("capacity", "v_min", "v_max", "renting_ratio"):
                    fields[field_name] = float(value)
                else:
                    fields[field_name] = value
            except ValueError:
                raise ParseError(f"invalid value for {key_norm}: {value!r}", i) from None
        else:
            extra.append((key.strip(), value))

    for required in ("num_cities", "num_items", "capacity", "v_min", "v_max",
                     "edge_weight_type"):
        if required not in fields:
            raise ParseError(f"missing header field for {required}")
    ewt = str(fields["edge_weight_type"])
    if ewt not in _SUPPORTED_EDGE_WEIGHTS:
        raise ParseError(f"unsupported edge weight type {ewt!r}")
    n = int(fields["num_cities"])
    m = int(fields["num_items"])
    if len(coords) != n:
        raise ParseError(f"expected {n} coordinates, parsed {len(coords)}")
    if len(raw_items) != m:
        raise ParseError(f"expected {m} items, parsed {len(raw_items)}")

    items = []
    for p, w, city, line_no in raw_items:
        if city < 2 or city > n:
            raise ParseError(
                f"item city index {city} out of range [2, {n}]", line_no
            )
        items.append(Item(profit=p, weight=w, city=city - 1))

    coord_arr = np.array(coords, dtype=float)
    distance = _ceil_2d_matrix(coord_arr)
    try:
        return TtpInstance(
            name=str(fields.get("name", "")),
            num_cities=n,
            capacity=float(fields["capacity"]),
            v_min=float(fields["v_min"]),
            v_max=float(fields["v_max"]),
            renting_ratio=float(fields.get("renting_ratio", 0.0)),
            distance=distance,
            items=tuple(items),
            coords=coord_arr,
            edge_weight_type=ewt,
            extra_headers=tuple(extra),
        )
    except InstanceError as exc:
        raise ParseError(str(exc)) from exc


def _ceil_2d_matrix(coords: np.ndarray) -> np.ndarray:
    dx = coords[:, 0][:, None] - coords[:, 0][None, :]
    dy = coords[:, 1][:, None] - coords[:, 1][None, :]
    return np.ceil(np.sqrt(dx**2 + dy**2))


def build_instance(
    distance: Sequence[Sequence[float]],
    items: Iterable[Item] = (),
    capacity: float = 1.0,
    v_min: float = 0.1,
    v_max: float = 1.0,
    name: str = "synthetic",
    renting_ratio: float = 0.0,
) -> TtpInstance:
    """Construct an instance from an explicit distance matrix.

    The matrix must be square, symmetric, with zero diagonal; speeds must
    satisfy 0 < v_min < v_max. Used for synthetic desk-scale tests.
    """
    d = np.asarray(distance, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise InstanceError("distance matrix must be square")
    return TtpInstance(
        name=name,
        num_cities=d.shape[0],
        capacity=float(capacity),
        v_min=float(v_min),
        v_max=float(v_max),
        renting_ratio=float(renting_ratio),
        distance=d,
        items=tuple(items),
        edge_weight_type="EXPLICIT",
    )


def instance_from_json(doc: Union[str, bytes, dict]) -> TtpInstance:
    """Build an instance from the JSON document schema (see README).

    Either ``coords`` (CEIL_2D distances are derived) or an explicit
    ``distance`` matrix must be present.
    """
    if not isinstance(doc, dict):
        doc = json.loads(doc)
    items = tuple(
        Item(profit=float(it["profit"]), weight=float(it["weight"]),
             city=int(it["city"]) - 1)
        for it in doc.get("items", ())
    )
    coords = doc.get("coords")
    distance = doc.get("distance")
    if coords is not None:
        coord_arr = np.asarray(coords, dtype=float)
        distance = _ceil_2d_matrix(coord_arr)
        ewt = "CEIL_2D"
    elif distance is not None:
        coord_arr = None
        ewt = "EXPLICIT"
    else:
        raise InstanceError("JSON instance needs 'coords' or 'distance'")
    return TtpInstance(
        name=str(doc.get("name", "json-instance")),
        num_cities=int(doc["num_cities"]),
        capacity=float(doc["capacity"]),
        v_min=float(doc["v_min"]),
        v_max=float(doc["v_max"]),
        renting_ratio=float(doc.get("renting_ratio", 0.0)),
        distance=np.asarray(distance, dtype=float),
        items=items,
        coords=coord_arr,
        edge_weight_type=ewt,
    )


def load_instance(path) -> TtpInstance:
    """Load a ``.ttp`` text file or a ``.json`` instance document."""
    text = open(path, "rb").read()
    if str(path).endswith(".json"):
        return instance_from_json(text)
    return parse_instance(text)


def _fmt(value: float) -> str:
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def serialize_instance(inst: TtpInstance) -> str:
    """Write a CEIL_2D instance back to the TTP text format.

    Round-trips all header values and item lines up to whitespace.
    """
    if inst.coords is None:
        raise InstanceError("serialization needs coordinates (CEIL_2D instances)")
    out = [f"PROBLEM NAME: {inst.name}"]
    for key, value in inst.extra_headers:
        out.append(f"{key}: {value}")
    out.append(f"DIMENSION: {inst.num_cities}")
    out.append(f"NUMBER OF ITEMS: {inst.num_items}")
    out.append(f"CAPACITY OF KNAPSACK: {_fmt(inst.capacity)}")
    out.append(f"MIN SPEED: {_fmt(inst.v_min)}")
    out.append(f"MAX SPEED: {_fmt(inst.v_max)}")
    out.append(f"RENTING RATIO: {_fmt(inst.renting_ratio)}")
    out.append(f"EDGE_WEIGHT_TYPE: {inst.edge_weight_type}")
    out.append("NODE_COORD_SECTION\t(INDEX, X, Y):")
    for i, (x, y) in enumerate(inst.coords, start=1):
        out.append(f"{i} {_fmt(x)} {_fmt(y)}")
    out.append("ITEMS SECTION\t(INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER):")
    for i, it in enumerate(inst.items, start=1):
        out.append(f"{i} {_fmt(it.profit)} {_fmt(it.weight)} {it.city + 1}")
    return "\n".join(out) + "\n"
