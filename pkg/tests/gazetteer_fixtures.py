"""Small databases encoding the Raniganj ambiguity (same taluk name in two states)."""

from scene2locale.georesolve import CsdbRecord, Gazetteer, GeoTuple, LldbRecord

UP_RANIGANJ = GeoTuple(25.90, 81.95, 230304)
UP_RANIGANJ_BAZAR = GeoTuple(25.90, 81.95, 230502)


def raniganj_gazetteer() -> Gazetteer:
    csdb = [
        CsdbRecord("Pratapgarh", 230304, "Raniganj", "Uttar Pradesh", "Allahabad", "Pratapgarh", "Uttar Pradesh"),
        CsdbRecord("Asansol", 713347, "Raniganj", "West Bengal", "Kolkata", "Paschim Bardhaman", "West Bengal"),
        CsdbRecord("Pratapgarh", 230502, "Raniganj Bazar", "Uttar Pradesh", "Allahabad", "Pratapgarh",
                   "Uttar Pradesh"),
    ]
    lldb = [LldbRecord(10, "Pratapgarh", 25.90, 81.95, "Uttar Pradesh"),
            LldbRecord(11, "Asansol", 23.68, 86.98, "West Bengal")]
    rldb = {"Uttar Pradesh": ["Hindi", "Urdu"], "West Bengal": ["Bengali", "Nepali"]}
    return Gazetteer(csdb, lldb, rldb)
