#!/usr/bin/env python3
"""Regenerate per-project ground-truth verdict files under tests/golden/.

Labels come from the textual body-replacement oracle (re-parse the project
with each mutant body spliced into the source, re-run the whole suite), not
from the library's matrix path, so the goldens stay independent evidence.
Run from the repository root after any corpus change:
    python tools/make_goldens.py
"""

import csv
import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from tplab import lang, pipeline
from tplab.interp import run_suite

from oracles import oracle_kills_by_test

GOLDEN = ROOT / "tests" / "golden"


def main():
    manifest = pipeline.load_corpus()
    for pid, directory in manifest.projects:
        with open(directory / "project.json", encoding="utf-8") as fh:
            mj = json.load(fh)
        sources = [(rel, (directory / rel).read_text(encoding="utf-8"))
                   for rel in mj["sources"]]
        program = lang.parse_project(sources, pid)
        log = run_suite(program)
        rows = []
        for method in lang.enumerate_methods(program):
            if not lang.mutation_eligible(method):
                continue
            covering = log.covering_tests(method.method_id)
            if not covering:
                continue
            kills = oracle_kills_by_test(sources, pid, method.method_id,
                                         step_budget=manifest.config.step_budget)
            verdict = "effective" if any(kills[t] for t in covering) \
                else "ineffective"
            rows.append((method.method_id, verdict))
        out = GOLDEN / f"verdicts_{pid}.csv"
        with open(out, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["method_id", "verdict"])
            w.writerows(rows)
        ineff = sum(1 for _, v in rows if v == "ineffective")
        print(f"{pid}: {len(rows)} methods, {ineff} ineffective -> {out.name}")


if __name__ == "__main__":
    main()
