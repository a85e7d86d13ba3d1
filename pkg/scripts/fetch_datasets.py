"""Populate data/ with the UCI Adult, German Credit and ProPublica Compas files.

The canonical files ship inside the ``responsibly`` wheel on PyPI, so the
script downloads that wheel with pip (no install), extracts the five files
and checks their SHA-256 digests.

    python scripts/fetch_datasets.py [--dest data] [--wheel path/to/responsibly.whl]
"""

import argparse
import hashlib
import subprocess
import sys
import tempfile
import zipfile
from pathlib import Path

WHEEL = "responsibly==0.1.2"
FILES = {
    "responsibly/dataset/adult/adult.data":
        "5b00264637dbfec36bdeaab5676b0b309ff9eb788d63554ca0a249491c86603d",
    "responsibly/dataset/adult/adult.test":
        "a2a9044bc167a35b2361efbabec64e89d69ce82d9790d2980119aac5fd7e9c05",
    "responsibly/dataset/adult/adult.names":
        "c248284c0b5de30c9e1958d6cdd168a34a654758b620e68f46aefa83fc0a576a",
    "responsibly/dataset/german/german.data":
        "b21f3d81db8071257d5ff1deaeba1fd4303b62712e6fcc9715c7a86202cb5871",
    "responsibly/dataset/compas/compas-scores-two-years.csv":
        "c451db85908b2f7fef1d83203bedf6b71ecda0d5af468d82ae62178f91d0cc7d",
}


def download_wheel(tmp: Path) -> Path:
    subprocess.run([sys.executable, "-m", "pip", "download", "--no-deps", "--only-binary=:all:",
                    "-d", str(tmp), WHEEL], check=True)
    return next(tmp.glob("responsibly-*.whl"))


def extract(wheel: Path, dest: Path) -> None:
    dest.mkdir(parents=True, exist_ok=True)
    with zipfile.ZipFile(wheel) as zf:
        for member, digest in FILES.items():
            payload = zf.read(member)
            got = hashlib.sha256(payload).hexdigest()
            if got != digest:
                raise SystemExit(f"checksum mismatch for {member}: {got}")
            (dest / Path(member).name).write_bytes(payload)
            print(f"wrote {dest / Path(member).name}")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--dest", default=str(Path(__file__).resolve().parents[1] / "data"))
    ap.add_argument("--wheel", help="use an already downloaded wheel")
    args = ap.parse_args()
    if args.wheel:
        extract(Path(args.wheel), Path(args.dest))
        return
    with tempfile.TemporaryDirectory() as tmp:
        extract(download_wheel(Path(tmp)), Path(args.dest))


if __name__ == "__main__":
    main()
