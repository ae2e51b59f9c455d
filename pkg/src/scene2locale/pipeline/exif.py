"""Minimal JPEG EXIF GPS reader (APP1 -> TIFF -> GPS IFD) and a matching writer for fixtures."""

from __future__ import annotations

import struct
from fractions import Fraction
from pathlib import Path

GPS_IFD_TAG = 0x8825
_TYPE_SIZES = {1: 1, 2: 1, 3: 2, 4: 4, 5: 8, 7: 1, 9: 4, 10: 8}


class ExifError(ValueError):
    pass


def _app1_payloads(data: bytes):
    if data[:2] != b"\xff\xd8":
        return
    pos = 2
    while pos + 4 <= len(data):
        if data[pos] != 0xFF:
            return
        marker = data[pos + 1]
        if marker == 0xFF:
            pos += 1
            continue
        if marker in (0xD9, 0xDA):  # end of image / start of scan
            return
        if 0xD0 <= marker <= 0xD7 or marker == 0x01:
            pos += 2
            continue
        (length,) = struct.unpack(">H", data[pos + 2:pos + 4])
        seg = data[pos + 4:pos + 2 + length]
        if marker == 0xE1 and seg.startswith(b"Exif\x00\x00"):
            yield seg[6:]
        pos += 2 + length


def _ifd_entries(tiff: bytes, offset: int, endian: str):
    if offset + 2 > len(tiff):
        raise ExifError("IFD offset outside TIFF block")
    (count,) = struct.unpack(endian + "H", tiff[offset:offset + 2])
    for i in range(count):
        e = offset + 2 + 12 * i
        if e + 12 > len(tiff):
            raise ExifError("truncated IFD")
        tag, typ, n = struct.unpack(endian + "HHI", tiff[e:e + 8])
        size = _TYPE_SIZES.get(typ, 1) * n
        if size <= 4:
            raw = tiff[e + 8:e + 8 + size]
        else:
            (ptr,) = struct.unpack(endian + "I", tiff[e + 8:e + 12])
            if ptr + size > len(tiff):
                raise ExifError("IFD value outside TIFF block")
            raw = tiff[ptr:ptr + size]
        yield tag, typ, n, raw


def _rationals(raw: bytes, n: int, endian: str) -> list[float]:
    vals = struct.unpack(endian + "I" * (2 * n), raw[:8 * n])
    out = []
    for num, den in zip(vals[::2], vals[1::2]):
        if den == 0:
            raise ExifError("zero denominator in GPS rational")
        out.append(num / den)
    return out


def _dms(parts: list[float]) -> float:
    d, m, s = (parts + [0.0, 0.0, 0.0])[:3]
    return d + m / 60.0 + s / 3600.0


def parse_gps(tiff: bytes) -> tuple[float, float] | None:
    if tiff[:2] == b"II":
        endian = "<"
    elif tiff[:2] == b"MM":
        endian = ">"
    else:
        raise ExifError("bad TIFF byte order")
    magic, ifd0 = struct.unpack(endian + "HI", tiff[2:8])
    if magic != 42:
        raise ExifError("bad TIFF magic")
    gps_off = None
    for tag, _typ, _n, raw in _ifd_entries(tiff, ifd0, endian):
        if tag == GPS_IFD_TAG:
            (gps_off,) = struct.unpack(endian + "I", raw[:4])
    if gps_off is None:
        return None
    fields = {}
    for tag, typ, n, raw in _ifd_entries(tiff, gps_off, endian):
        if tag in (1, 3) and typ == 2:
            fields[tag] = raw.rstrip(b"\x00").decode("ascii", "replace").strip().upper()
        elif tag in (2, 4) and typ == 5:
            fields[tag] = _rationals(raw, n, endian)
    if 2 not in fields or 4 not in fields:
        return None
    lat = _dms(fields[2])
    lon = _dms(fields[4])
    if fields.get(1) == "S":
        lat = -lat
    if fields.get(3) == "W":
        lon = -lon
    if not (-90 <= lat <= 90 and -180 <= lon <= 180):
        raise ExifError("GPS coordinates out of range")
    return lat, lon


def read_gps(path_or_bytes) -> tuple[float, float] | None:
    """(latitude, longitude) in signed decimal degrees, or None when absent or unreadable."""
    data = path_or_bytes if isinstance(path_or_bytes, (bytes, bytearray)) else Path(path_or_bytes).read_bytes()
    try:
        for tiff in _app1_payloads(bytes(data)):
            gps = parse_gps(tiff)
            if gps is not None:
                return gps
    except (ExifError, struct.error, UnicodeDecodeError):
        return None
    return None


def _to_dms_rationals(value: float) -> list[tuple[int, int]]:
    value = abs(value)
    d = int(value)
    m_full = (value - d) * 60
    m = int(m_full)
    s = Fraction((m_full - m) * 60).limit_denominator(10000)
    return [(d, 1), (m, 1), (s.numerator, s.denominator)]


def gps_app1(lat: float, lon: float) -> bytes:
    """Little-endian EXIF APP1 segment carrying only a GPS IFD."""
    # layout: TIFF header(8) | IFD0 with 1 entry (2+12+4) | GPS IFD with 4 entries (2+48+4) | rationals
    ifd0 = 8
    gps = ifd0 + 18
    data_off = gps + 54
    lat_r, lon_r = _to_dms_rationals(lat), _to_dms_rationals(lon)
    tiff = b"II" + struct.pack("<HI", 42, ifd0)
    tiff += struct.pack("<H", 1) + struct.pack("<HHII", GPS_IFD_TAG, 4, 1, gps) + struct.pack("<I", 0)
    entries = [
        struct.pack("<HHI", 1, 2, 2) + (b"N\x00" if lat >= 0 else b"S\x00") + b"\x00\x00",
        struct.pack("<HHII", 2, 5, 3, data_off),
        struct.pack("<HHI", 3, 2, 2) + (b"E\x00" if lon >= 0 else b"W\x00") + b"\x00\x00",
        struct.pack("<HHII", 4, 5, 3, data_off + 24),
    ]
    tiff += struct.pack("<H", 4) + b"".join(entries) + struct.pack("<I", 0)
    for num, den in lat_r + lon_r:
        tiff += struct.pack("<II", num, den)
    payload = b"Exif\x00\x00" + tiff
    return b"\xff\xe1" + struct.pack(">H", len(payload) + 2) + payload


def add_gps(jpeg: bytes, lat: float, lon: float) -> bytes:
    """Insert a GPS APP1 segment right after the SOI marker."""
    if jpeg[:2] != b"\xff\xd8":
        raise ExifError("not a JPEG stream")
    return jpeg[:2] + gps_app1(lat, lon) + jpeg[2:]
