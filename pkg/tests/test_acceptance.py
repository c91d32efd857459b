"""Acceptance gate: one test per criterion, one pass/fail line each.

Run order matters only for the shared flagship pipeline fixture; every
criterion asserts its own stated tolerances and budgets.
"""
import math
import sys
import time
from contextlib import contextmanager

import pytest

from orthantwalks.boltzmann import evaluate_gf
from orthantwalks.errors import AttemptsExhaustedError, DegenerateHullError
from orthantwalks.grammar import build_meander_grammar, count_meanders_dp, grammar_counts
from orthantwalks.halfspace import stepset1d_from_values
from orthantwalks.hull import convex_hull_3d, point_in_hull
from orthantwalks.pipeline import (
    assemble_pipeline,
    brute_force_orthant_counts,
    chi_square_endpoints,
    count_orthant_walks,
    endpoint_counts,
    endpoint_frequencies,
    endpoint_rmse,
    naive_sample,
    sample_orthant_walks,
)

SQRT2 = math.sqrt(2)


_CAPSYS = None


@pytest.fixture(autouse=True)
def _criterion_reporting(capsys):
    # let criterion() bypass pytest's fd-level capture for its one-line report
    global _CAPSYS
    _CAPSYS = capsys
    yield
    _CAPSYS = None


def _report(line):
    if _CAPSYS is not None:
        with _CAPSYS.disabled():
            print(line, flush=True)
    else:
        print(line, file=sys.__stdout__, flush=True)


@contextmanager
def criterion(num, summary):
    try:
        yield
    except BaseException as exc:
        _report("criterion %d: FAIL — %s (%s)" % (num, summary, exc))
        raise
    _report("criterion %d: PASS — %s" % (num, summary))


@pytest.fixture(scope="module")
def pipeline(request):
    return assemble_pipeline(request.getfixturevalue("flagship"))


def test_criterion_1_flagship_analysis(flagship):
    with criterion(1, "flagship analysis matches the reference values in < 1 s"):
        start = time.perf_counter()
        p = assemble_pipeline(flagship)
        elapsed = time.perf_counter() - start
        for c in p.minimizer.as_tuple():
            assert abs(c - SQRT2) <= 1e-6
        assert abs(p.minimizer.s_min - 6 * SQRT2) <= 1e-9
        assert p.integer_projection.as_tuple() == (1, 1, 1)
        multiset = sorted((a.value, a.weight) for a in p.stepset_1d.atoms)
        assert multiset == [(-1, 2)] * 3 + [(1, 1)] * 3  # totals +1 w3, -1 w6
        assert sum(w for v, w in multiset if v == 1) == 3
        assert sum(w for v, w in multiset if v == -1) == 6
        assert abs(p.rho - 1 / (6 * SQRT2)) <= 1e-9
        assert elapsed < 1.0


def test_criterion_2_grammar_oracle_equivalence():
    refs = [
        [(1, 3), (-1, 6)],
        [(1, 1), (-1, 1)],
        [(1, 1), (-2, 1)],
        [(0, 4), (1, 1), (-1, 2)],
        [(11, 1), (-11, 3), (7, 2), (-7, 4)],
    ]
    with criterion(2, "grammar counts equal the DP oracle for 5 stepsets, n <= 25, in < 30 s"):
        start = time.perf_counter()
        for vals in refs:
            ss = stepset1d_from_values(vals)
            counts = grammar_counts(build_meander_grammar(ss), 25)
            assert counts["W"] == count_meanders_dp(ss, 25)
            assert counts["D"] == count_meanders_dp(ss, 25, endpoint=0)
        assert time.perf_counter() - start < 30.0


def test_criterion_3_gf_values_at_singularity():
    with criterion(3, "flagship GF values at rho: D = 2, W = 4+2*sqrt(2), both within 1e-6"):
        ss = stepset1d_from_values([(1, 3), (-1, 6)])
        ev = evaluate_gf(build_meander_grammar(ss), 1 / (6 * SQRT2))
        assert abs(ev.values["D"] - 2.0) <= 1e-6
        assert abs(ev.values["W"] - (4 + 2 * SQRT2)) <= 1e-6


def test_criterion_4_uniformity(pipeline, flagship):
    with criterion(4, "length-10 uniformity: RMSE window, chi-square, decreasing trend, < 10 min"):
        start = time.perf_counter()
        exact = count_orthant_walks(flagship, 10)[10]
        rep = sample_orthant_walks(
            pipeline, 10, 10, 10**6, max_attempts=10**10, seed=20260823, collect="endpoints"
        )
        freqs = endpoint_frequencies(rep.endpoints)
        rmse = endpoint_rmse(freqs, exact)
        assert 5e-7 <= rmse <= 1e-5, "RMSE %g outside [5e-7, 1e-5]" % rmse
        _, p_value = chi_square_endpoints(endpoint_counts(rep.endpoints), exact)
        assert p_value > 0.001, "chi-square p = %g" % p_value
        trend = []
        for n, seed in ((10**3, 31), (10**4, 32), (10**5, 33)):
            r = sample_orthant_walks(
                pipeline, 10, 10, n, max_attempts=10**9, seed=seed, collect="endpoints"
            )
            trend.append(endpoint_rmse(endpoint_frequencies(r.endpoints), exact))
        assert trend[0] > trend[-1], "RMSE trend %r not decreasing" % (trend,)
        assert time.perf_counter() - start < 600.0


def test_criterion_5_yield_anchor(pipeline):
    with criterion(5, "window [95,105]: 10 walks within 2e6 free draws and 120 s"):
        start = time.perf_counter()
        rep = sample_orthant_walks(pipeline, 95, 105, 10, max_attempts=2 * 10**6, seed=42)
        elapsed = time.perf_counter() - start
        assert rep.accepted == 10
        assert 2 * 10**4 <= rep.free_draws <= 2 * 10**6
        assert elapsed <= 120.0


def test_criterion_6_benchmark_gap(pipeline, flagship):
    with criterion(6, "naive/Boltzmann attempt gap >= 20x at length 30; naive dead at 100"):
        nrep = naive_sample(flagship, 30, 200, max_attempts=10**7, seed=5)
        naive_apw = nrep.free_draws / nrep.accepted
        brep = sample_orthant_walks(pipeline, 18, 42, 200, seed=5)
        boltz_apw = brep.free_draws / brep.accepted
        assert naive_apw / boltz_apw >= 20.0, "gap %.1f" % (naive_apw / boltz_apw)
        with pytest.raises(AttemptsExhaustedError) as exc:
            naive_sample(flagship, 100, 1, max_attempts=10**6, seed=5)
        assert exc.value.report.accepted == 0
        long_rep = sample_orthant_walks(pipeline, 95, 105, 2, max_attempts=2 * 10**6, seed=6)
        assert long_rep.accepted == 2


def test_criterion_7_growth_trends(flagship):
    with criterion(7, "count ratios increase over n in [30,50] and land in the stated windows"):
        table = count_orthant_walks(flagship, 50)
        totals = [sum(t.values()) for t in table]
        ratios = [totals[n] / totals[n - 1] for n in range(30, 51)]
        assert all(b > a for a, b in zip(ratios, ratios[1:]))
        assert 7.3 <= ratios[-1] <= 8.49
        meanders = count_meanders_dp(stepset1d_from_values([(1, 3), (-1, 6)]), 50)
        # parity makes the one-step ratio oscillate; the two-step
        # geometric mean is the meaningful growth estimate at n = 50
        growth = math.sqrt(meanders[50] / meanders[48])
        assert 7.8 <= growth <= 8.49


def test_criterion_8_branch_coverage(unit_z, zero_drift):
    with criterion(8, "unit-z and trivial projection branches run end to end at length 8"):
        for stepset, branch in ((unit_z, "unit-z"), (zero_drift, "trivial")):
            p = assemble_pipeline(stepset)
            assert p.vector.branch == branch
            rep = sample_orthant_walks(
                p, 8, 8, 3000, max_attempts=10**8, seed=71, collect="endpoints"
            )
            exact = count_orthant_walks(stepset, 8)[8]
            _, p_value = chi_square_endpoints(endpoint_counts(rep.endpoints), exact)
            assert p_value > 0.001, "%s branch chi-square p = %g" % (branch, p_value)


def test_criterion_9_property_suites(pipeline, flagship):
    with criterion(9, "meander prefixes, lift round trip, brute-force counts, hulls, replays"):
        ip = pipeline.integer_projection
        by_id = {a.atom_id: a for a in pipeline.stepset_1d.atoms}
        rep = sample_orthant_walks(pipeline, 0, 40, 10**4, max_attempts=10**8, seed=13)
        assert len(rep.walks) == 10**4
        for walk in rep.walks:
            h = 0
            for s in walk.steps:
                # project each lifted step back: the 1D word must be a meander
                v = ip.p * s.dx + ip.q * s.dy + ip.r * s.dz
                h += v
                assert h >= 0
        # lift/project round trip: the source step of each atom projects
        # back to the atom's own value, so word -> walk -> word is identity
        for a in pipeline.stepset_1d.atoms:
            s = a.source
            assert ip.p * s.dx + ip.q * s.dy + ip.r * s.dz == a.value
        sources = [a.source for a in pipeline.stepset_1d.atoms]
        assert len(set(sources)) == len(sources)
        assert count_orthant_walks(flagship, 8) == brute_force_orthant_counts(flagship, 8)
        import random

        rng = random.Random(2024)
        built = 0
        for _ in range(10**3):
            pts = [
                (rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4))
                for _ in range(rng.randint(4, 25))
            ]
            try:
                mesh = convex_hull_3d(pts)
            except DegenerateHullError:
                continue
            built += 1
            assert all(point_in_hull(mesh, q) for q in pts)
        assert built > 900
        again = sample_orthant_walks(pipeline, 0, 40, 100, max_attempts=10**7, seed=13)
        assert [w.steps for w in again.walks] == [w.steps for w in rep.walks[:100]]
