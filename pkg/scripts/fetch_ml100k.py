"""Rebuild MovieLens 100K ``u.data`` from the copy bundled in the RecBole wheel.

Only useful where grouplens.org is unreachable but a PyPI mirror is not.
The wheel ships ``ml-100k.inter`` (same 100,000 ratings, with a typed
header); this strips the header and writes the original tab-separated
layout. Usage:

    python scripts/fetch_ml100k.py [DEST_ROOT]   # default: $SYNTHRATINGS_DATA or /root/data
"""

import os
import subprocess
import sys
import tempfile
import zipfile
from pathlib import Path

WHEEL = "recbole==1.2.1"
MEMBER = "recbole/dataset_example/ml-100k/ml-100k.inter"


def main():
    root = Path(sys.argv[1] if len(sys.argv) > 1 else os.environ.get("SYNTHRATINGS_DATA", "/root/data"))
    dest = root / "ml-100k" / "u.data"
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run([sys.executable, "-m", "pip", "download", "--no-deps", "--only-binary", ":all:",
                        "-d", tmp, WHEEL], check=True)
        wheel = next(Path(tmp).glob("*.whl"))
        with zipfile.ZipFile(wheel) as zf:
            lines = zf.read(MEMBER).decode("utf-8").splitlines()
    rows = [line for line in lines[1:] if line.strip()]
    dest.parent.mkdir(parents=True, exist_ok=True)
    dest.write_text("\n".join(rows) + "\n", encoding="utf-8")
    print(f"wrote {len(rows)} ratings to {dest}")


if __name__ == "__main__":
    main()
