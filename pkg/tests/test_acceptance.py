"""Acceptance criteria 1-11.

Each test prints one ``criterion N: PASS|FAIL`` line (visible with ``-s`` or
in the terminal summary) and then asserts the criterion as stated.  Where a
displayed formula is wrong, the strict check fails and the corrected
statement is reported on the same line for information.
"""

from __future__ import annotations

import itertools
import random
import time
from functools import lru_cache

import numpy as np
import pytest

from heavenly.arith import MPoly, Q, RatFn
from heavenly.cli.oracle import numeric_ricci_oracle, well_conditioned_points
from heavenly.core import (
    ChartMismatch,
    DegenerateDiagonalization,
    EquationConstants,
    MetricTensor,
    SingularPoint,
    SolutionJet,
    biorthogonality_matrix,
    build_coframe,
    build_lax,
    build_metric,
    build_tetrad,
    diagonalize,
    modified_metric_matrix,
    normalization_value,
    residual_phi,
    signature_at_point,
)
from heavenly.curvature import (
    asd_check,
    closed_form_curvature_modified,
    compare_closed_form,
    curvature_pipeline,
    frame_components,
    max_pole_order,
    simplified_metric_and_curvature,
)
from heavenly.forms import VField, vf_commutator
from heavenly.solutions import DEPENDENT, random_solution, rederive_constraints
from heavenly.symmetry import (
    characteristic,
    invariance_residual,
    killing_check,
    killing_vectors,
    linearized_residual,
    make_generic_symmetry,
    make_modified_symmetries,
)

SEEDS = range(20)
BRANCHES = ("generic", "modified")
RESULTS: dict[int, str] = {}


def report(capsys, n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    with capsys.disabled():
        print("\n" + line)


@pytest.fixture(scope="module", autouse=True)
def summary():
    yield
    print("\n" + "\n".join(RESULTS[k] for k in sorted(RESULTS)))


@lru_cache(maxsize=None)
def draw(branch: str, seed: int):
    return random_solution(seed, branch)


def instances():
    return [draw(b, s) for b in BRANCHES for s in SEEDS]


@lru_cache(maxsize=None)
def metric(branch: str, seed: int, sign: int = 1):
    sol = draw(branch, seed)
    return build_metric(sol.consts, sol.jet(), sign)


@lru_cache(maxsize=None)
def bundle(branch: str, seed: int, sign: int = 1):
    return curvature_pipeline(metric(branch, seed, sign))


def _rpoly(rng: random.Random, nvars: int, deg: int) -> MPoly:
    terms = {e: Q(rng.randint(-5, 5), rng.randint(1, 3)) for e in itertools.product(range(deg + 1), repeat=nvars) if sum(e) <= deg}
    return MPoly.from_dict(terms, nvars)


# ---------------------------------------------------------------------------


def test_criterion_01_cubic_family(capsys):
    worst, bad = 0.0, []
    for b in BRANCHES:
        for s in SEEDS:
            t0 = time.perf_counter()
            sol = random_solution(s, b)
            ok = residual_phi(sol.consts, sol.u).is_zero()
            worst = max(worst, time.perf_counter() - t0)
            if not ok:
                bad.append(f"{b}-{s}")
    ok = not bad and worst < 1.0
    report(capsys, 1, ok, f"Phi == 0 on {2 * len(SEEDS)} draws, slowest {worst:.3f} s" + (f"; failing {bad}" if bad else ""))
    assert ok


def test_criterion_02_constraint_rederivation(capsys):
    r = rederive_constraints(None)
    matches = all(v == "match" for v in r.comparisons.values())
    slice_zero = r.derived[10] == 0 and r.derived[26] == 0
    special = bool(r.modified_comparisons) and all(v == "match" for v in r.modified_comparisons.values())
    ok = r.resolved == sorted(DEPENDENT) and matches and slice_zero and special and r.residual_zero
    report(capsys, 2, ok, f"{len(r.derived)} dependent coefficients re-derived; c4: {r.c4_verdict}; specialisation {'matches' if special else 'differs'}")
    assert ok


def test_criterion_03_lax_identity(capsys):
    rng = random.Random(2024)
    checked = 0
    failures = []
    while checked < 10:
        consts = EquationConstants(*(Q(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(3)))
        u = MPoly.from_dict({e: Q(rng.randint(-9, 9), rng.randint(1, 3)) for e in itertools.product(range(4), repeat=4) if sum(e) <= 3 and rng.random() < 0.4}, 4)
        phi = residual_phi(consts, u)
        if phi.is_zero():
            continue
        L0, M0 = build_lax(consts, SolutionJet(consts, u))
        s0, s1, s2 = vf_commutator(L0, M0)
        if not (s0.equals(VField((0, phi.diff(3), 0, -phi.diff(1)))) and s1.is_zero() and s2.is_zero()):
            failures.append(u.to_str())
        checked += 1
    ok = not failures
    report(capsys, 3, ok, f"[L0, M0] = d4(Phi) d2 - d2(Phi) d4 on {checked} non-solutions")
    assert ok


def test_criterion_04_tetrad_coframe(capsys):
    bad = []
    for sol in instances():
        jet = sol.jet()
        for sign in (1, -1):
            nu_ok = (normalization_value(sol.consts, jet, sign) - 1).is_zero()
            m = biorthogonality_matrix(build_coframe(sol.consts, jet, sign), build_tetrad(sol.consts, jet, sign))
            bi_ok = all((m[i][j] - (1 if i == j else 0)).is_zero() for i in range(4) for j in range(4))
            if not (nu_ok and bi_ok):
                bad.append((sol.consts, sign))
    ok = not bad
    report(capsys, 4, ok, f"bi-orthogonality and 24 nu = 1 on {len(instances())} instances x 2 charts")
    assert ok


def test_criterion_05_ricci_flat(capsys):
    worst, bad = 0.0, []
    for b in BRANCHES:
        for s in SEEDS:
            t0 = time.perf_counter()
            if not bundle(b, s).ricci_is_zero():
                bad.append(f"{b}-{s}")
            worst = max(worst, time.perf_counter() - t0)
    # negative control: one extra term in one metric component
    g = metric("modified", 0)
    comps = [list(row) for row in g.components]
    comps[1][1] = comps[1][1] + RatFn.coerce(MPoly.var(0))
    control = curvature_pipeline(MetricTensor(tuple(tuple(r) for r in comps)))
    ok = not bad and worst < 60 and not control.ricci_is_zero()
    report(capsys, 5, ok, f"Ricci == 0 on {2 * len(SEEDS)} instances (slowest {worst:.2f} s); perturbed metric has nonzero Ricci: {not control.ricci_is_zero()}")
    assert ok


def test_criterion_06_asd_structure(capsys):
    signs, zero_pattern, flat = set(), True, 0
    for b in BRANCHES:
        for s in SEEDS:
            res = asd_check(bundle(b, s), metric(b, s))
            if res.sign is None:
                flat += 1
            else:
                signs.add(res.sign)
            R = bundle(b, s).raised_frame()
            zero_pattern &= R[(0, 1)].is_zero() and R[(2, 3)].is_zero()
    ok = len(signs) == 1 and zero_pattern
    report(capsys, 6, ok, f"duality sign(s) {sorted(signs)} over {2 * len(SEEDS) - flat} nonflat instances; R^12 = R^34 = 0: {zero_pattern}")
    assert ok


def test_criterion_07_closed_form(capsys):
    """Judged on the Delta > 0 chart, where the tetrad carries the plain 1/sqrt(Delta)."""
    exact = {1: 0, -1: 0}
    factors = {1: set(), -1: set()}
    structure_ok = True
    for s in range(10):
        sol = draw("modified", s)
        for sign in (1, -1):
            g, bd = metric("modified", s, sign), bundle("modified", s, sign)
            closed = closed_form_curvature_modified(sol, sign)
            cmp = compare_closed_form(closed, bd, sol[5], sol[17])
            exact[sign] += cmp.exact_match
            factors[sign].add(str(cmp.sign_factor))
            pm = max_pole_order([g.components[i][j] for i in range(4) for j in range(4)], closed.D)
            pc = max_pole_order(frame_components(bd.raised_frame()[(1, 2)], g).values(), closed.D)
            structure_ok &= cmp.zero_pattern and cmp.relations_hold and (pm, pc) == (1, 3)
    # four-parameter family, including a*b*c != 0
    fam_exact = {1: 0, -1: 0}
    fam_metric = True
    fam_cases = [
        (EquationConstants(0, 1, 0), (1, 1, 1, 1)),
        (EquationConstants(2, Q(-1, 2), 3), (2, 3, -1, Q(1, 2))),
        (EquationConstants(-1, 3, Q(1, 4)), (Q(1, 3), 2, 5, 1)),
    ]
    for consts, params in fam_cases:
        for sign in (1, -1):
            fam = simplified_metric_and_curvature(consts, *params, sign=sign)
            fam_metric &= fam.metric_matches
            g = fam.metric
            bd = curvature_pipeline(g)
            cmp = compare_closed_form(fam.closed, bd, params[0], params[1])
            fam_exact[sign] += cmp.exact_match
            pm = max_pole_order([g.components[i][j] for i in range(4) for j in range(4)], fam.x)
            pc = max_pole_order(frame_components(bd.raised_frame()[(1, 2)], g).values(), fam.x)
            structure_ok &= cmp.zero_pattern and cmp.relations_hold and (pm, pc) == (1, 3)
    n = len(fam_cases)
    ok = exact[1] == 10 and fam_exact[1] == n and fam_metric and structure_ok
    detail = (
        f"Delta>0 chart: modified closed form exact {exact[1]}/10 (pipeline = {'/'.join(sorted(factors[1]))} x closed form), "
        f"four-parameter closed form exact {fam_exact[1]}/{n}; "
        f"displayed simplified metric reproduced: {fam_metric}; zero pattern, relations, pole orders 1/3: {structure_ok}; "
        f"[info] Delta<0 chart exact {exact[-1]}/10 and {fam_exact[-1]}/{n}"
    )
    report(capsys, 7, ok, detail)
    assert ok


def test_criterion_08_diagonalisation(capsys):
    counts = dict(diag=0, simple=0, corrected=0, u12=0, fermetr=0, total=0, modified=0, degenerate=0)
    for b in BRANCHES:
        for s in SEEDS:
            sol = draw(b, s)
            jet = sol.jet()
            try:
                data = diagonalize(sol.consts, jet, 1, metric(b, s))
            except DegenerateDiagonalization:
                counts["degenerate"] += 1
                continue
            counts["total"] += 1
            counts["diag"] += data.diag_equals_metric
            counts["simple"] += data.simple_equals_metric
            counts["corrected"] += data.corrected_simple_equals_metric
            counts["u12"] += data.u12_identity
            if sol.consts.is_modified:
                counts["modified"] += 1
                fm = modified_metric_matrix(jet, data, 1)
                counts["fermetr"] += all((fm[i][j] - data.simple_matrix[i][j]).is_zero() for i in range(4) for j in range(4))
    n = counts["total"]
    ok = n > 0 and counts["diag"] == counts["simple"] == counts["u12"] == n and counts["fermetr"] == counts["modified"]
    detail = (
        f"diag = metric {counts['diag']}/{n}; simplified = metric {counts['simple']}/{n} "
        f"(with Delta^2 in the dz4^2 term: {counts['corrected']}/{n}); u12 identity {counts['u12']}/{n}; "
        f"a=c=0,b=1 specialisation {counts['fermetr']}/{counts['modified']}; degenerate skipped {counts['degenerate']}"
    )
    report(capsys, 8, ok, detail)
    assert ok


def test_criterion_09_neutral_signature(capsys):
    total, neutral, short = 0, 0, []
    for b in BRANCHES:
        for s in SEEDS:
            sol = draw(b, s)
            delta = sol.jet().delta
            rng = random.Random(f"signature-{b}-{s}")
            seen = 0
            while seen < 100:
                p = [Q(rng.randint(-10, 10), rng.randint(1, 4)) for _ in range(4)]
                d = delta.evaluate(p)
                if d == 0:
                    continue
                try:
                    pair = signature_at_point(metric(b, s, 1 if d > 0 else -1), p).pair
                except (SingularPoint, ChartMismatch):
                    continue
                seen += 1
                neutral += pair == (2, 2)
            total += seen
    ok = total == neutral and total >= 100 * 2 * len(SEEDS)
    report(capsys, 9, ok, f"(2,2) at {neutral}/{total} exact sample points")
    assert ok


def test_criterion_10_symmetries(capsys):
    rng = random.Random(10)
    printed_fail, corrected_fail = set(), set()
    for s in range(5):
        sol = draw("modified", s)
        fn = dict(g=_rpoly(rng, 1, 3), l=_rpoly(rng, 1, 3), m=_rpoly(rng, 1, 3), n=_rpoly(rng, 1, 3), f=_rpoly(rng, 2, 3), h=_rpoly(rng, 2, 3))
        for corrected, sink in ((False, printed_fail), (True, corrected_fail)):
            for X in make_modified_symmetries(**fn, corrected=corrected):
                if not linearized_residual(sol.consts, sol.u, characteristic(X, sol.u)).is_zero():
                    sink.add(X.name)
    for s in range(5):
        sol = draw("generic", s)
        base = dict(F=_rpoly(rng, 1, 2), H=_rpoly(rng, 1, 2), m=_rpoly(rng, 1, 2), d=Q(rng.randint(-3, 3)), f=_rpoly(rng, 2, 2), g=_rpoly(rng, 2, 2))
        for name, X in make_generic_symmetry(sol.consts, N=_rpoly(rng, 2, 2), **base).items():
            if not linearized_residual(sol.consts, sol.u, characteristic(X, sol.u)).is_zero():
                printed_fail.add(name)

    invcon_ok, lie_ok, k_printed = True, True, set()
    for s in SEEDS:
        sol = draw("modified", s)
        kd = killing_vectors(sol)
        k_printed |= {name for name in ("K1 (printed)", "K2 (printed)") if not kd.invariant[name]}
        n0, m0 = rng.randint(-9, 9), rng.randint(-9, 9)
        invcon_ok &= invariance_residual(sol, **kd.generator_inputs(n0, m0)).is_zero()
        g = metric("modified", s)
        lie_ok &= killing_check(g, kd.k1, sol.jet()) and killing_check(g, kd.k2, sol.jet())

    ok = not printed_fail and invcon_ok and lie_ok
    detail = (
        f"generators failing as displayed: {sorted(printed_fail) or 'none'} "
        f"(after correcting X6: {sorted(corrected_fail) or 'none'}; X_inf holds when N,23 = m'); "
        f"invariance for n0 K1 + m0 K2: {invcon_ok} (displayed u-parts not invariant: {sorted(k_printed) or 'none'}); "
        f"L_k g = 0 for k1, k2 on {len(SEEDS)} instances: {lie_ok}"
    )
    report(capsys, 10, ok, detail)
    assert ok


@pytest.mark.slow
def test_criterion_11_numeric_oracle(capsys):
    worst, points, skipped = 0.0, 0, []
    for sol in instances():
        rng = random.Random(f"numeric-{sol.consts}-{sol.u.to_str()}")
        pts = well_conditioned_points(sol.u, sol.consts, rng, 5, sign=1)
        if len(pts) < 5:
            skipped.append(sol)
        for p in pts:
            ricci, scale = numeric_ricci_oracle(sol.u, sol.consts, p, with_scale=True)
            worst = max(worst, float(np.abs(ricci).max()) / scale)
            points += 1
    ok = worst < 1e-6 and not skipped
    report(capsys, 11, ok, f"worst relative finite-difference Ricci {worst:.2e} over {points} points (tolerance 1e-6)")
    assert ok
