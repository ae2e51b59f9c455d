"""Convert loosely formatted gazetteer CSVs into the canonical schemas."""

from __future__ import annotations

import csv
import re

from ..georesolve import CSDB_HEADER, LLDB_HEADER, RLDB_HEADER, load_csdb, load_lldb, load_rldb, write_csv

SCHEMAS = {"csdb": CSDB_HEADER, "lldb": LLDB_HEADER, "rldb": RLDB_HEADER}
LOADERS = {"csdb": load_csdb, "lldb": load_lldb, "rldb": load_rldb}

_ALIASES = {
    "divname": "Div_Name", "divisionname": "Div_Name", "division": "Div_Name",
    "pincode": "Pincode", "pin": "Pincode", "postalcode": "Pincode",
    "taluk": "Taluk", "circle": "Circle", "circlename": "Circle", "region": "Region", "regionname": "Region",
    "district": "District", "districtname": "District", "state": "State", "statename": "State",
    "cityid": "City_Id", "id": "City_Id", "cityname": "City_Name", "city": "City_Name",
    "latitude": "Latitude", "lat": "Latitude", "longitude": "Longitude", "lon": "Longitude", "lng": "Longitude",
    "placeorstate": "place_or_state", "place": "place_or_state", "languages": "languages", "language": "languages",
}

_COORD = re.compile(r"^\s*([+-]?\d+(?:\.\d+)?)\s*°?\s*([NSEW])?\s*'?\s*$", re.I)


def canonical_header(name: str) -> str | None:
    return _ALIASES.get(re.sub(r"[^a-z]", "", name.lower()))


def parse_coordinate(text: str) -> float:
    """'25.88 N'' -> 25.88, '92.76'' -> 92.76, '10.5 S' -> -10.5."""
    m = _COORD.match(text.replace("’", "'"))
    if not m:
        raise ValueError(f"unparseable coordinate {text!r}")
    value = float(m.group(1))
    if m.group(2) and m.group(2).upper() in "SW":
        value = -abs(value)
    return value


def _fmt(v: float) -> str:
    return repr(float(v))


def convert(source: str, in_path, out_path) -> int:
    """Write a canonical CSV for `source`; returns the row count. Output is re-read to validate it."""
    header = SCHEMAS[source]
    with open(in_path, encoding="utf-8-sig", newline="") as fh:
        first = fh.readline()
        fh.seek(0)
        reader = csv.reader(fh, delimiter="\t" if "\t" in first else ",")
        raw_header = next(reader, None)
        if raw_header is None:
            raise ValueError(f"{in_path}: empty file")
        mapping = {}
        for i, name in enumerate(raw_header):
            canon = canonical_header(name)
            if source == "rldb" and canon in ("State", "City_Name"):
                canon = "place_or_state"
            if canon in header and canon not in mapping:
                mapping[canon] = i
        missing = [h for h in header if h not in mapping]
        if missing:
            raise ValueError(f"{in_path}: missing columns {missing}")
        rows = []
        for row in reader:
            if not any(c.strip() for c in row):
                continue
            rec = {h: row[mapping[h]].strip() for h in header}
            if source == "lldb":
                rec["Latitude"] = _fmt(parse_coordinate(rec["Latitude"]))
                rec["Longitude"] = _fmt(parse_coordinate(rec["Longitude"]))
            if source == "rldb":
                langs = [x.strip() for x in re.split(r"[;,/]", rec["languages"]) if x.strip()]
                rec["languages"] = ";".join(langs)
            rows.append([rec[h] for h in header])
    write_csv(out_path, header, rows)
    LOADERS[source](out_path)
    return len(rows)
