"""Acceptance criteria 1-6, one PASS/FAIL line each.

Each test prints its verdict with capture disabled, so the lines show up in
plain `pytest` output as well as under -v.
"""

import time

from tightcalc import golden
from tightcalc.harness import THEOREMS, default_spec, verify
from tightcalc.syntax import parse
from tightcalc.tight import synthesize_tight
from tightcalc.translate import translate_derivation_v
from tightcalc.typesys import check_derivation


def _report(capsys, n, title, problems, elapsed):
    verdict = "PASS" if not problems else "FAIL"
    with capsys.disabled():
        print(f"\n[criterion {n}] {verdict}: {title} ({elapsed:.1f}s)")
        for p in problems[:10]:
            print(f"    {p}")
    assert not problems, "\n".join(problems)


def _run_theorems(ids):
    problems = []
    for tid in ids:
        r = verify(tid, default_spec(THEOREMS[tid].calculus), fuel=50, cap=10_000)
        if not r.passed:
            problems.append(f"{tid}: {len(r.failures)}/{r.tested} failures, "
                            f"e.g. {r.failures[0].term}: expected {r.failures[0].expected}, "
                            f"got {r.failures[0].got}")
    return problems


def test_criterion_1_golden_counters(capsys):
    start = time.perf_counter()
    problems = []
    for name, (system, build) in golden.ALL.items():
        d = build()
        if not check_derivation(d, system):
            problems.append(f"{name}: checker rejects the hand-built derivation")
        if (d.m, d.e, d.s) != golden.EXPECTED[name]:
            problems.append(f"{name}: {(d.m, d.e, d.s)} != {golden.EXPECTED[name]}")
    # the same numbers from synthesis and from translation
    for name, system, text in [("t0-N", "N", golden.T0), ("t0-V", "V", golden.T0),
                               ("t0'-B", "B", golden.T0_BANG), ("id-y-V", "V", golden.ID_Y)]:
        d = synthesize_tight(parse(text, "bang" if system == "B" else "lambda-es"), system).derivation
        if (d.m, d.e, d.s) != golden.EXPECTED[name]:
            problems.append(f"synthesized {name}: {(d.m, d.e, d.s)} != {golden.EXPECTED[name]}")
    for src, dst in [(golden.t0_v, "cbv(t0)-B"), (golden.id_y_v, "cbv(id-y)-B")]:
        b = translate_derivation_v(src())
        if (b.m, b.e, b.s) != golden.EXPECTED[dst]:
            problems.append(f"translated {dst}: {(b.m, b.e, b.s)} != {golden.EXPECTED[dst]}")
    _report(capsys, 1, "golden counters", problems, time.perf_counter() - start)


def test_criterion_2_completeness(capsys):
    start = time.perf_counter()
    problems = _run_theorems(["completeness-N", "completeness-V", "completeness-B"])
    _report(capsys, 2, "completeness and soundness in N, V, B", problems, time.perf_counter() - start)


def test_criterion_3_confluence(capsys):
    start = time.perf_counter()
    problems = _run_theorems(["confluence-f"])
    _report(capsys, 3, "path-length invariance in the bang calculus", problems,
            time.perf_counter() - start)


def test_criterion_4_simulation(capsys):
    start = time.perf_counter()
    problems = _run_theorems(["simulation-cbn", "simulation-cbv"])
    _report(capsys, 4, "CBN and CBV simulation", problems, time.perf_counter() - start)


def test_criterion_5_translations(capsys):
    start = time.perf_counter()
    problems = _run_theorems(["translation-N", "translation-V", "inversevr-V"])
    _report(capsys, 5, "derivation translations", problems, time.perf_counter() - start)


def test_criterion_6_structure(capsys):
    start = time.perf_counter()
    problems = _run_theorems(["census-N", "census-V", "census-B", "positivity-V",
                              "inverse-steps-N", "inverse-steps-V", "inverse-steps-B",
                              "image-discipline"])
    _report(capsys, 6, "structural properties", problems, time.perf_counter() - start)
