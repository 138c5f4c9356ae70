"""Run every verification suite and write the report artifacts.

Usage: python3 scripts/run_verify_all.py --out-dir artifacts --seed 0
"""

import argparse
import pathlib
import sys

from ckemlab.report import emit
from ckemlab.suites import SuiteConfig, run_suite


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="artifacts")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--suite", default="all")
    args = ap.parse_args()

    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    reports = run_suite(args.suite, SuiteConfig(seed=args.seed))
    emit(reports, "json", out / f"{args.suite}.json")
    emit(reports, "csv", out / f"{args.suite}.csv")

    width = max(len(r.check_id) for r in reports)
    for r in reports:
        flag = "PASS" if r.passed else "FAIL"
        print(f"{flag}  {r.check_id:<{width}}  residual={r.residual:.3e}  "
              f"({r.runtime_ms} ms)")
    failed = [r.check_id for r in reports if not r.passed]
    print(f"\n{len(reports) - len(failed)}/{len(reports)} passed; "
          f"artifacts in {out}/")
    if failed:
        print("failing checks: " + ", ".join(failed))
    return 0 if not failed else 1


if __name__ == "__main__":
    sys.exit(main())
