"""Write a runnable demo: rendered sign, detector maps, a GPS-tagged JPEG and a config file."""

import argparse
import io
import shutil
from pathlib import Path

from PIL import Image

from scene2locale.fixtures import render_sign, write_demo
from scene2locale.pipeline.config import data_path
from scene2locale.pipeline.exif import add_gps


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out", type=Path)
    ap.add_argument("--word", default="KAHARA")
    args = ap.parse_args(argv)
    out = args.out
    paths = write_demo(out / "images", args.word, "sign")
    (out / "images" / "maps").rename(out / "maps")

    # same sign as a JPEG carrying Saharsa's coordinates: the pipeline should short-circuit
    img, _ = render_sign([args.word])
    buf = io.BytesIO()
    Image.fromarray(img.astype("uint8")).save(buf, format="JPEG", quality=95)
    (out / "images" / "tagged.jpg").write_bytes(add_gps(buf.getvalue(), 25.88, 86.59))

    db = out / "db"
    db.mkdir(exist_ok=True)
    for name in ("csdb.csv", "lldb.csv", "rldb.csv"):
        shutil.copy(data_path("gazetteer", name), db / name)
    (out / "demo.cfg").write_text(
        "# demo configuration; relative paths are resolved against this file\n"
        "maps_dir = maps\n"
        "csdb = db/csdb.csv\n"
        "lldb = db/lldb.csv\n"
        "rldb = db/rldb.csv\n"
        "geotag_path = geotags.jsonl\n"
        "score_thresh = 0.8\n"
        "nms_iou = 0.2\n"
        "heads = en\n"
    )
    print(f"sign image: {paths['image']}")
    print(f"config:     {out / 'demo.cfg'}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
