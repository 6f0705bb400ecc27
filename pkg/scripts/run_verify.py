"""Run every bounded theorem check and print a summary table.

    python scripts/run_verify.py [--max-size N] [--fuel F] [--json out.json]
"""

import argparse
import time

from tightcalc.harness import THEOREMS, default_spec, report_json, verify


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-size", type=int, default=None)
    ap.add_argument("--fuel", type=int, default=50)
    ap.add_argument("--cap", type=int, default=10_000)
    ap.add_argument("--json", help="write the full reports here")
    a = ap.parse_args()

    reports = []
    print(f"{'theorem':<26}{'tested':>8}{'failed':>8}  skipped  time")
    for tid, th in THEOREMS.items():
        start = time.perf_counter()
        r = verify(tid, default_spec(th.calculus, a.max_size), a.fuel, a.cap)
        reports.append(r)
        print(f"{tid:<26}{r.tested:>8}{len(r.failures):>8}  {dict(r.skipped) or '-'}  "
              f"{time.perf_counter() - start:.1f}s")
    if a.json:
        with open(a.json, "w", encoding="utf-8") as fh:
            fh.write(report_json(reports))


if __name__ == "__main__":
    main()
