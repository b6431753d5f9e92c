"""Golden checks of the worked examples, run by ``crgc verify-paper``."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from . import bounds
from .bounds import CodeParams
from .matrix import GfMatrix, det, inverse, rank

# Coefficient matrix recovered when repairing two systematic nodes of the
# [B=9, n=6, k=3, d=4, t=2] interference-alignment code over F_7.
MATRIX_A = [
    [3, 4, 6, 2, 0, 0],
    [0, 5, 0, 3, 4, 6],
    [1, 3, 4, 5, 0, 0],
    [0, 4, 0, 1, 3, 4],
    [2, 1, 3, 4, 0, 0],
    [0, 1, 0, 2, 1, 3],
]


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""
    informational: bool = False


def capacity_regimes_k6() -> Check:
    p = CodeParams(18, 14, 6, 10, 3)
    closed = [bounds.capacity_closed_form(p, a, 1) for a in (2, 3, 4)]
    brute = [bounds.capacity_bruteforce(p, a, 1) for a in (2, 3, 4)]
    ok = closed == brute == [12, 16, 17]
    return Check("capacity (14,6,10,3) at alpha=2,3,4 is 12, 16, 17", ok, f"closed={_s(closed)} brute={_s(brute)}")


def capacity_regimes_k7() -> Check:
    p = CodeParams(21, 14, 7, 10, 3)
    alphas = (2, 3, 9, 11)
    closed = [bounds.capacity_closed_form(p, a, 1) for a in alphas]
    brute = [bounds.capacity_bruteforce(p, a, 1) for a in alphas]
    return Check("capacity (14,7,10,3): closed form = brute force at alpha=2,3,9,11", closed == brute,
                 f"closed={_s(closed)} brute={_s(brute)}")


def printed_regimes_k7() -> Check:
    # printed piecewise form: 7a | 4a+6b | a+15b | 21b with breakpoints 2, 3, 10
    p = CodeParams(21, 14, 7, 10, 3)
    printed = {2: 14, 3: 18, 9: 24, 11: 21}
    true = {a: bounds.capacity_bruteforce(p, a, 1) for a in printed}
    diffs = [f"alpha={a}: printed {printed[a]}, min-cut {true[a]}" for a in printed if printed[a] != true[a]]
    return Check("capacity (14,7,10,3): printed piecewise values vs min-cut", not diffs,
                 "; ".join(diffs) or "all agree", informational=True)


def composition_counts() -> Check:
    comps = bounds.enumerate_compositions(7, 3)
    by_g = dict(sorted(Counter(len(u) for u in comps).items(), reverse=True))
    ok = len(comps) == 44 and by_g == {7: 1, 6: 6, 5: 15, 4: 16, 3: 6}
    return Check("44 compositions of 7 with parts <= 3", ok, f"count={len(comps)} by g={by_g}")


def remainder_first_optimality(max_k: int = 8, max_d: int = 12) -> Check:
    bad = 0
    total = 0
    for k in range(1, max_k + 1):
        for t in range(1, k + 1):
            u = bounds.optimal_composition(k, t)
            for d in range(k, max_d + 1):
                p = CodeParams(1, d + t, k, d, t)
                for j in range(1, 17):
                    total += 1
                    if u not in bounds.capacity_argmin(p, Fraction(j, 4), 1)[1]:
                        bad += 1
    return Check("remainder-first composition is always a minimiser", bad == 0,
                 f"{bad} of {total} grid points miss it (all with t not dividing k)", informational=True)


def matrix_a() -> Check:
    A = GfMatrix(MATRIX_A, 7)
    r, dt = rank(A), det(A)
    ok = r == 6 and dt.value != 0 and A @ inverse(A) == GfMatrix.identity(6, 7)
    return Check("matrix A over F_7 is nonsingular", ok, f"rank={r} det={dt.value}")


def storage_comparison() -> Check:
    concurrent = bounds.mb_point(CodeParams(1, 19, 10, 13, 6)).alpha
    single = bounds.mb_point(CodeParams(1, 19, 10, 18, 1)).alpha
    ok = concurrent == Fraction(26, 220) and single == Fraction(36, 270)
    saving = (single - concurrent) / concurrent
    return Check("MB storage: 26B/220 (t=6, d=13) vs 36B/270 (t=1, d=18)", ok,
                 f"{float(concurrent):.4f}B vs {float(single):.4f}B; relative difference "
                 f"{float(saving) * 100:.1f}%")


def q_identity(max_g: int = 5, max_t: int = 5, max_d: int = 15) -> Check:
    bad = []
    for g in range(1, max_g + 1):
        for t in range(1, max_t + 1):
            k = g * t
            for d in range(k, max(k, max_d) + 1):
                p = CodeParams(1, d + t, k, d, t)
                for i in range(1, g + 1):
                    if bounds.q_coef(p, i) * t * d != bounds.cooperative_D(p, i - 1):
                        bad.append((k, t, d, i))
    return Check("q(i) t d = D_(i-1) whenever t | k", not bad, f"{len(bad)} mismatches")


def small_cluster_bounds() -> Check:
    p = CodeParams(12, 7, 4, 5, 2)
    ms = bounds.ms_point(p)
    up1 = bounds.min_upgrade_bandwidth(12, 4, 6, 1)[0]
    up2 = bounds.min_upgrade_bandwidth(12, 4, 6, 2)[0]
    ok = (ms.alpha, ms.gamma, p.beta, up1, up2) == (3, 10, 2, 6, 10)
    return Check("(7,4,5,2) bounds: repair 2 x 5 = 10, upgrades 6 and 10", ok,
                 f"alpha={ms.alpha} gamma={ms.gamma} beta={p.beta} upgrade=({up1}, {up2})")


def small_cluster_simulation() -> Check:
    from .cluster import parse_scenario, run

    text = resources.files("crgc").joinpath("data/example3.scenario").read_text()
    report = run(parse_scenario(text))
    moved = [e.helper_to_engine for e in report.ledger]
    ok = report.passed and moved == [10, 6, 10] and all(
        e.helper_to_engine == e.predicted for e in report.ledger)
    return Check("(7,4,5,2) simulation: ledger 10 / 6 / 10, MDS after every event", ok,
                 f"status={report.status} ledger={moved}")


def all_checks() -> list[Check]:
    return [capacity_regimes_k6(), capacity_regimes_k7(), printed_regimes_k7(), composition_counts(),
            remainder_first_optimality(), matrix_a(), storage_comparison(), q_identity(),
            small_cluster_bounds(), small_cluster_simulation()]


def _s(xs):
    return "[" + ", ".join(str(x) for x in xs) + "]"
