"""Run ``dkcalc verify`` twice with one seed and confirm the reports agree.

usage: python scripts/run_verify.py [--lattice 3,3,3,3] [--seed 42]
"""
import argparse
import json
import sys
import tempfile
from pathlib import Path

from dkcalc import cli


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lattice", default="3,3,3,3")
    ap.add_argument("--seed", default="42")
    args = ap.parse_args()
    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp) / "verify.json"
        texts, code = [], 0
        for _ in range(2):
            code = cli.main(["verify", "--lattice", args.lattice, "--seed", args.seed, "--out", str(out)])
            report = json.loads(out.read_text())
            texts.append(cli.dumps_report(cli.strip_runtime(report)))
    for rec in report["checks"]:
        print(f"{rec['status']:>4}  {rec['id']:<40} {rec['residual']:.3e}  (tol {rec['tolerance']:.0e})")
    print(f"\nsummary {report['summary']}  exit {code}  identical reports: {texts[0] == texts[1]}")
    return 0 if texts[0] == texts[1] else 1


if __name__ == "__main__":
    sys.exit(main())
