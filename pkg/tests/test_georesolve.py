import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gazetteer_fixtures import UP_RANIGANJ, UP_RANIGANJ_BAZAR, raniganj_gazetteer
from oracles import haversine_scalar
from scene2locale.georesolve import (Gazetteer, GeoTuple, LldbRecord, common_tuples, geotag,
                                     haversine_km, haversine_km_array, is_resolved, keyword_tuples,
                                     languages_for, load_csdb, load_lldb, load_rldb, read_geotags,
                                     resolve_ambiguity, resolve_keywords, reverse_geocode, write_csv)
from scene2locale.lingua import ScriptId, tokenize
from scene2locale.pipeline.config import data_path

KAHARA = GeoTuple(25.88, 86.59, 852201)


@pytest.fixture(scope="module")
def tables():
    return Gazetteer.from_files(data_path("gazetteer", "csdb.csv"), data_path("gazetteer", "lldb.csv"),
                                data_path("gazetteer", "rldb.csv"))


@pytest.fixture(scope="module")
def raniganj():
    return raniganj_gazetteer()


def test_kahara_join(tables):
    assert keyword_tuples("Kahara", tables) == {KAHARA}
    assert keyword_tuples("KAHARA", tables) == {KAHARA}


def test_port_blair_join_is_empty(tables):
    assert keyword_tuples("Port Blair", tables) == set()


def test_resolve_kahara(tables):
    res = resolve_keywords(["Kahara"], tokenize("Kahara Bazar"), ScriptId.LATIN, tables)
    assert res.candidates == {KAHARA} and res.stage == "keywords"


def test_common_tuples_skip_empty_and_tolerate_rounding():
    a = {GeoTuple(1.0, 2.0, 123456), GeoTuple(3.0, 4.0, 654321)}
    b = {GeoTuple(1.0 + 1e-7, 2.0, 123456)}
    assert common_tuples([a, set(), b]) == {GeoTuple(1.0, 2.0, 123456)}
    with pytest.raises(ValueError):
        common_tuples([set(), set()])


def test_raniganj_is_ambiguous_then_script_resolves(raniganj):
    cands = keyword_tuples("Raniganj", raniganj)
    assert len(cands) == 2 and not is_resolved(cands, raniganj)
    res = resolve_ambiguity(tokenize("रानीगंज"), cands, ScriptId.DEVANAGARI, raniganj)
    assert res.stage == "script"
    assert res.candidates == {UP_RANIGANJ}


def test_bigram_requery_resolves(raniganj):
    res = resolve_keywords(["Raniganj"], tokenize("Raniganj Bazar"), ScriptId.LATIN, raniganj)
    assert res.stage == "pairs"
    assert res.candidates == {UP_RANIGANJ_BAZAR}


def test_unresolvable_returns_empty(raniganj):
    res = resolve_keywords(["Raniganj"], tokenize("Raniganj"), ScriptId.LATIN, raniganj)
    assert res.candidates == set() and res.stage == "unresolved" and not res.resolved


def test_haversine_port_blair_saharsa():
    d = haversine_km((11.67, 92.76), (25.88, 86.59))
    assert abs(d - haversine_scalar(11.67, 92.76, 25.88, 86.59)) < 1.0
    assert 1700 < d < 1716


@given(st.floats(-89, 89), st.floats(-179, 179), st.floats(-89, 89), st.floats(-179, 179))
def test_haversine_properties(a, b, c, d):
    x = haversine_km((a, b), (c, d))
    assert x == pytest.approx(haversine_km((c, d), (a, b)), abs=1e-9)
    assert 0 <= x <= math.pi * 6371 + 1e-6
    assert x == pytest.approx(haversine_scalar(a, b, c, d), abs=1e-3)
    assert haversine_km_array(a, b, np.array([c]), np.array([d]))[0] == pytest.approx(x, abs=1e-9)


def test_reverse_geocode_nearest_and_tie(tables):
    assert reverse_geocode(25.9, 86.6, tables).city_id == 255
    twins = [LldbRecord(7, "B", 0.0, 1.0, "S"), LldbRecord(3, "A", 0.0, -1.0, "S")]
    assert reverse_geocode(0.0, 0.0, twins).city_id == 3


def test_languages_city_then_state(tables):
    rec = LldbRecord(255, "Saharsa", 25.88, 86.59, "Bihar")
    assert languages_for(rec, tables) == ["Hindi", "Maithili"]
    assert languages_for(rec, {"Saharsa": ["Maithili"], "Bihar": ["Hindi"]}) == ["Maithili"]
    with pytest.raises(LookupError):
        languages_for(LldbRecord(1, "X", 0, 0, "Nowhere"), {})


def test_geotag_appends_json_lines(tmp_path, fixed_clock):
    path = tmp_path / "tags.jsonl"
    geotag("a", KAHARA, ["Hindi"], "Saharsa", path, fixed_clock)
    rec = geotag("b", KAHARA, ["Hindi"], "Saharsa", path, fixed_clock)
    back = read_geotags(path)
    assert [r.image_id for r in back] == ["a", "b"]
    assert back[1] == rec and rec.pincode == 852201
    assert rec.resolved_at.startswith("2024-01-01")


def test_loaders_enforce_headers(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("City,Lat\nX,1\n")
    with pytest.raises(ValueError, match="header"):
        load_lldb(p)


def test_loaders_validate_records(tmp_path):
    p = tmp_path / "c.csv"
    write_csv(p, ["Div_Name", "Pincode", "Taluk", "Circle", "Region", "District", "State"],
              [["A", "12", "T", "C", "R", "D", "S"]])
    with pytest.raises(ValueError):
        load_csdb(p)
    p = tmp_path / "l.csv"
    write_csv(p, ["City_Id", "City_Name", "Latitude", "Longitude", "State"],
              [[1, "A", 0, 0, "S"], [1, "B", 1, 1, "S"]])
    with pytest.raises(ValueError, match="duplicate"):
        load_lldb(p)


def test_rldb_splits_languages(tmp_path):
    p = tmp_path / "r.csv"
    write_csv(p, ["place_or_state", "languages"], [["Bihar", "Hindi;Maithili"]])
    assert load_rldb(p) == {"bihar": ["Hindi", "Maithili"]}
