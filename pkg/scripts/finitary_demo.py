"""Build, check and read back finitary models for every machine in a fixture directory."""

import argparse
import json
from pathlib import Path

from dmw.cli import run_command


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("dir", nargs="?", default=str(Path(__file__).resolve().parent.parent / "fixtures" / "machines"))
    ap.add_argument("--steps", type=int, default=20)
    args = ap.parse_args()
    failed = 0
    for path in sorted(Path(args.dir).glob("*.json")):
        code, out, err = run_command(["demo", "--machine", str(path), "--steps", str(args.steps)])
        res = json.loads(out) if out else {}
        failed += code != 0
        print(f"{path.stem:14s} exit={code} worlds={res.get('worlds')} steps={len(res.get('tau', []))} "
              f"checks={res.get('checks')}")
    raise SystemExit(1 if failed else 0)


if __name__ == "__main__":
    main()
