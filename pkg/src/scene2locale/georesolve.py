"""Offline gazetteer: keyword -> (lat, lon, pincode) tuples, disambiguation,
reverse geocoding and regional-language lookup.

Three CSV databases back it:

* CSDB (post offices): Div_Name,Pincode,Taluk,Circle,Region,District,State
* LLDB (city coordinates): City_Id,City_Name,Latitude,Longitude,State
* RLDB (languages): place_or_state,languages  with languages joined by ';'
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .lingua import ScriptId, Token, normalize_name

EARTH_RADIUS_KM = 6371.0
COORD_TOL = 1e-6

CSDB_HEADER = ["Div_Name", "Pincode", "Taluk", "Circle", "Region", "District", "State"]
LLDB_HEADER = ["City_Id", "City_Name", "Latitude", "Longitude", "State"]
RLDB_HEADER = ["place_or_state", "languages"]


@dataclass(frozen=True)
class CsdbRecord:
    div_name: str
    pincode: int
    taluk: str
    circle: str
    region: str
    district: str
    state: str

    def __post_init__(self):
        if not 100000 <= self.pincode <= 999999:
            raise ValueError(f"pincode {self.pincode} is not a 6-digit code")
        if not self.taluk.strip():
            raise ValueError("taluk must be non-empty")


@dataclass(frozen=True)
class LldbRecord:
    city_id: int
    city_name: str
    latitude: float
    longitude: float
    state: str

    def __post_init__(self):
        _check_coords(self.latitude, self.longitude)


@dataclass(frozen=True)
class GeoTuple:
    latitude: float
    longitude: float
    pincode: int

    def __post_init__(self):
        _check_coords(self.latitude, self.longitude)

    def matches(self, other: "GeoTuple", tol: float = COORD_TOL) -> bool:
        return (self.pincode == other.pincode and abs(self.latitude - other.latitude) <= tol
                and abs(self.longitude - other.longitude) <= tol)


def _check_coords(lat: float, lon: float) -> None:
    if not (-90 <= lat <= 90 and -180 <= lon <= 180):
        raise ValueError(f"coordinates out of range: ({lat}, {lon})")


def _read_csv(path, header: list[str]) -> list[dict[str, str]]:
    with open(path, encoding="utf-8-sig", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [h.strip() for h in reader.fieldnames] != header:
            raise ValueError(f"{path}: expected header {','.join(header)}, got {reader.fieldnames}")
        return [{k.strip(): (v or "").strip() for k, v in row.items()} for row in reader]


def load_csdb(path) -> list[CsdbRecord]:
    return [CsdbRecord(r["Div_Name"], int(r["Pincode"]), r["Taluk"], r["Circle"], r["Region"],
                       r["District"], r["State"]) for r in _read_csv(path, CSDB_HEADER)]


def load_lldb(path) -> list[LldbRecord]:
    out = [LldbRecord(int(r["City_Id"]), r["City_Name"], float(r["Latitude"]), float(r["Longitude"]),
                      r["State"]) for r in _read_csv(path, LLDB_HEADER)]
    ids = [r.city_id for r in out]
    if len(set(ids)) != len(ids):
        raise ValueError(f"{path}: duplicate City_Id")
    return out


def load_rldb(path) -> dict[str, list[str]]:
    table: dict[str, list[str]] = {}
    for r in _read_csv(path, RLDB_HEADER):
        key = normalize_name(r["place_or_state"])
        if key in table:
            raise ValueError(f"{path}: duplicate RLDB key {r['place_or_state']!r}")
        langs = [x.strip() for x in r["languages"].split(";") if x.strip()]
        if not langs:
            raise ValueError(f"{path}: no languages for {r['place_or_state']!r}")
        table[key] = langs
    return table


def write_csv(path, header: list[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


class Gazetteer:
    """Read-only, indexed view of the three databases."""

    def __init__(self, csdb: Sequence[CsdbRecord], lldb: Sequence[LldbRecord], rldb: dict[str, list[str]]):
        self.csdb = list(csdb)
        self.lldb = list(lldb)
        self.rldb = {normalize_name(k): list(v) for k, v in rldb.items()}
        self._by_taluk: dict[str, list[CsdbRecord]] = {}
        for rec in self.csdb:
            self._by_taluk.setdefault(normalize_name(rec.taluk), []).append(rec)
        self._by_city: dict[str, list[LldbRecord]] = {}
        for rec in self.lldb:
            self._by_city.setdefault(normalize_name(rec.city_name), []).append(rec)
        self.place_index = frozenset(self._by_taluk) | frozenset(normalize_name(r.div_name) for r in self.csdb)
        self._pin_state: dict[int, set[str]] = {}
        for rec in self.csdb:
            self._pin_state.setdefault(rec.pincode, set()).add(rec.state)
        self._lat = np.array([r.latitude for r in self.lldb])
        self._lon = np.array([r.longitude for r in self.lldb])

    @classmethod
    def from_files(cls, csdb_path, lldb_path, rldb_path) -> "Gazetteer":
        return cls(load_csdb(csdb_path), load_lldb(lldb_path), load_rldb(rldb_path))

    def keyword_tuples(self, keyword: str) -> set[GeoTuple]:
        return keyword_tuples(keyword, self)

    def states_of(self, t: GeoTuple) -> set[str]:
        return set(self._pin_state.get(t.pincode, ()))

    def reverse_geocode(self, lat: float, lon: float) -> LldbRecord:
        if not self.lldb:
            raise ValueError("empty LLDB")
        d = haversine_km_array(lat, lon, self._lat, self._lon)
        best = d.min()
        cands = np.flatnonzero(d == best)
        return min((self.lldb[i] for i in cands), key=lambda r: r.city_id)


def keyword_tuples(keyword: str, gaz: Gazetteer) -> set[GeoTuple]:
    """Join CSDB rows whose Taluk is `keyword` to LLDB rows whose City_Name equals
    their Div_Name; yields the (latitude, longitude, pincode) combinations."""
    out = set()
    for c in gaz._by_taluk.get(normalize_name(keyword), ()):
        for city in gaz._by_city.get(normalize_name(c.div_name), ()):
            out.add(GeoTuple(city.latitude, city.longitude, c.pincode))
    return out


def _contains(s: Iterable[GeoTuple], t: GeoTuple) -> bool:
    return any(t.matches(u) for u in s)


def common_tuples(sets: Sequence[set[GeoTuple]]) -> set[GeoTuple]:
    """Intersection of the non-empty candidate sets (pincode exact, coordinates within 1e-6)."""
    live = [s for s in sets if s]
    if not live:
        raise ValueError("no candidates")
    first, rest = live[0], live[1:]
    return {t for t in first if all(_contains(s, t) for s in rest)}


def _states(cands: set[GeoTuple], gaz: Gazetteer) -> set[str]:
    states: set[str] = set()
    for t in cands:
        states |= gaz.states_of(t)
    return states


def is_resolved(cands: set[GeoTuple], gaz: Gazetteer) -> bool:
    """Non-empty and confined to a single state."""
    return bool(cands) and len(_states(cands, gaz)) == 1


def pick(cands: set[GeoTuple]) -> GeoTuple:
    """Deterministic representative of a resolved candidate set."""
    return min(cands, key=lambda t: (t.pincode, t.latitude, t.longitude))


def state_languages(state: str, gaz: Gazetteer) -> list[str]:
    return gaz.rldb.get(normalize_name(state), [])


@dataclass
class Resolution:
    candidates: set[GeoTuple]
    stage: str
    trail: list[tuple[str, list[GeoTuple]]] = field(default_factory=list)

    @property
    def resolved(self) -> bool:
        return bool(self.candidates)


def resolve_ambiguity(tokens: Sequence[Token | str], candidates: set[GeoTuple],
                      script: ScriptId | None, gaz: Gazetteer) -> Resolution:
    """Three-stage fallback for empty or multi-state candidate sets.

    1. keep candidates whose state speaks the language of the detected script;
    2. re-query with adjacent token pairs ("tok_i tok_i+1") left to right and
       intersect those results;
    3. give up with an empty set.
    """
    trail = []
    if candidates and script is not None:
        lang = normalize_name(script.language)
        kept = {t for t in candidates
                if any(lang in {normalize_name(x) for x in state_languages(s, gaz)} for s in gaz.states_of(t))}
        trail.append(("script", sorted(kept, key=_sort_key)))
        if is_resolved(kept, gaz):
            return Resolution(kept, "script", trail)

    words = [t.text if isinstance(t, Token) else t for t in tokens]
    pair_sets = [keyword_tuples(f"{a} {b}", gaz) for a, b in zip(words, words[1:])]
    if any(pair_sets):
        paired = common_tuples(pair_sets)
        trail.append(("pairs", sorted(paired, key=_sort_key)))
        if is_resolved(paired, gaz):
            return Resolution(paired, "pairs", trail)
    return Resolution(set(), "unresolved", trail)


def _sort_key(t: GeoTuple):
    return (t.pincode, t.latitude, t.longitude)


def resolve_keywords(keywords: Sequence[str], tokens: Sequence[Token | str], script: ScriptId | None,
                     gaz: Gazetteer) -> Resolution:
    """Common tuple over the keywords, falling back to `resolve_ambiguity`."""
    sets = [keyword_tuples(k, gaz) for k in keywords]
    cands = common_tuples(sets) if any(sets) else set()
    trail = [("keywords", sorted(cands, key=_sort_key))]
    if is_resolved(cands, gaz):
        return Resolution(cands, "keywords", trail)
    # nothing in common: let the script filter choose among everything the keywords matched
    pool = cands if cands else set().union(*sets) if sets else set()
    res = resolve_ambiguity(tokens, pool, script, gaz)
    res.trail[:0] = trail
    return res


def haversine_km(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Great-circle distance on a 6371 km sphere."""
    lat1, lon1 = map(math.radians, a)
    lat2, lon2 = map(math.radians, b)
    h = math.sin((lat2 - lat1) / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def haversine_km_array(lat: float, lon: float, lats: np.ndarray, lons: np.ndarray) -> np.ndarray:
    p1, p2 = np.radians(lat), np.radians(lats)
    dphi = p2 - p1
    dl = np.radians(lons) - np.radians(lon)
    h = np.sin(dphi / 2) ** 2 + np.cos(p1) * np.cos(p2) * np.sin(dl / 2) ** 2
    return 2 * EARTH_RADIUS_KM * np.arcsin(np.minimum(1.0, np.sqrt(h)))


def reverse_geocode(lat: float, lon: float, lldb) -> LldbRecord:
    """Nearest LLDB city by haversine distance; ties go to the smaller City_Id."""
    gaz = lldb if isinstance(lldb, Gazetteer) else Gazetteer([], lldb, {})
    return gaz.reverse_geocode(lat, lon)


def languages_for(record: LldbRecord, rldb) -> list[str]:
    """RLDB languages for the city, falling back to its state."""
    table = rldb.rldb if isinstance(rldb, Gazetteer) else {normalize_name(k): v for k, v in rldb.items()}
    for key in (record.city_name, record.state):
        langs = table.get(normalize_name(key))
        if langs:
            return list(langs)
    raise LookupError("no language data")


@dataclass
class GeotagRecord:
    image_id: str
    latitude: float
    longitude: float
    pincode: int | None
    place: str
    languages: list[str]
    resolved_at: str

    def to_json(self) -> str:
        return json.dumps(asdict(self), ensure_ascii=False, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "GeotagRecord":
        return cls(**json.loads(line))


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


def geotag(image_id: str, t: GeoTuple, languages: Sequence[str], place: str, path=None,
           clock: Callable[[], datetime] = utc_now) -> GeotagRecord:
    """Build a geotag record and, when `path` is given, append it as one JSON line."""
    rec = GeotagRecord(image_id, t.latitude, t.longitude, t.pincode, place, list(languages),
                       clock().isoformat())
    if path is not None:
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(rec.to_json() + "\n")
    return rec


def read_geotags(path) -> list[GeotagRecord]:
    return [GeotagRecord.from_json(ln) for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]
