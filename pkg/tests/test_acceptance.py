"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line."""
import itertools
import math
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
from conftest import ACCEPTANCE_RESULTS, WORKED_TABLE, random_instance

from fairkc.data import make_synthetic
from fairkc.fairness import FairnessParams, GroupModel, params_from_delta
from fairkc.fdlp import build_lp, lp_stats
from fairkc.geometry import PointSet, distance_matrix
from fairkc.greedy import greedy_k_center
from fairkc.joiners import build_frequency_table, mask_members, point_masks, table_from_counts
from fairkc.oracle import exact_classical, exact_fair, lp_feasible_exact
from fairkc.pipeline import cluster_from_search, fair_k_cluster, rounding_plan, search_radius
from fairkc.runner import RunConfig, run
from fairkc.simplex import check_feasible


@contextmanager
def criterion(number, title, budget=None):
    """Time the block, enforce an optional budget and record one summary line."""
    info = {}
    start = time.perf_counter()
    ok = False
    try:
        yield info
        elapsed = time.perf_counter() - start
        info["time"] = f"{elapsed:.2f}s"
        assert budget is None or elapsed < budget, f"took {elapsed:.1f}s, budget {budget}s"
        ok = True
    finally:
        detail = " ".join(f"{k}={v}" for k, v in info.items())
        ACCEPTANCE_RESULTS[number] = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}  {detail}"
        print(ACCEPTANCE_RESULTS[number])


def topology_instances(count=500, seed=1000):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(1, 201))
        k = int(rng.integers(1, 11))
        n_groups = int(rng.integers(1, 9))
        max_per_point = int(rng.integers(1, min(3, n_groups) + 1))
        groups = [set(rng.choice(n_groups, size=int(rng.integers(1, max_per_point + 1)), replace=False).tolist())
                  for _ in range(n)]
        pts = PointSet(rng.uniform(0, 10, size=(n, int(rng.integers(1, 4)))))
        yield rng, pts, GroupModel.from_memberships(groups, n_groups=n_groups), min(k, n)


def test_01_topology():
    with criterion(1, "joiner topology on random instances", budget=10) as info:
        cases = 0
        for rng, pts, model, k in topology_instances():
            centers = greedy_k_center(pts, None, k)
            dmat = distance_matrix(pts, centers.as_points())
            lam = float(rng.uniform(0, 1.2 * dmat.max))
            masks = point_masks(dmat.values, lam)
            naive = [sum(1 << j for j in range(k) if dmat.values[i, j] <= lam) for i in range(pts.count)]
            assert masks.tolist() == naive
            used = {int(m) for m in masks if m}
            assert len(used) <= min(2 ** k - 1, pts.count)

            full = float(rng.uniform(centers.radius, max(centers.radius, dmat.max)))
            table = build_frequency_table(pts, model, centers, dmat, full)
            members = [i for e in table for i in e.members]
            assert sorted(members) == list(range(pts.count))  # disjoint and covering
            assert table.total == pts.count
            assert len(table.nonempty_joiners()) <= min(2 ** k - 1, pts.count)
            cases += 1
        info["instances"] = cases
        assert cases >= 500


def test_02_lp_size():
    with criterion(2, "LP size within the variable and constraint bounds", budget=10) as info:
        cases = 0
        for rng, pts, model, k in topology_instances():
            assert model.max_groups_per_point <= 3 and model.n_groups <= 8
            centers = greedy_k_center(pts, None, k)
            dmat = distance_matrix(pts, centers.as_points())
            lam = float(rng.uniform(centers.radius, max(centers.radius, dmat.max)))
            table = build_frequency_table(pts, model, centers, dmat, lam)
            stats = lp_stats(build_lp(table, params_from_delta(model, 0.2), model, k))
            assert stats["variables"] <= stats["variable_bound"]
            assert stats["constraints"] <= stats["constraint_bound"]
            cases += 1
        info["instances"] = cases
        assert cases >= 500


def worked_placements(alpha):
    """Centre-by-colour tallies of every fair integral placement of the multi-joiner units."""
    fixed = {}
    movable = []
    for (sig, mask), count in WORKED_TABLE.items():
        centers = mask_members(mask)
        if len(centers) == 1:
            fixed[(sig, mask, centers[0])] = count
        else:
            movable.extend([(sig, mask, centers)] * count)
    fair = []
    for choice in itertools.product(*[c for _, _, c in movable]):
        x = dict(fixed)
        for (sig, mask, _), j in zip(movable, choice):
            x[(sig, mask, j)] = x.get((sig, mask, j), 0) + 1
        tally = np.zeros((3, 3), dtype=int)
        for (sig, _, j), v in x.items():
            tally[j, sig[0]] += v
        if all(tally[j, a] <= alpha * tally[j].sum() for j in range(3) for a in range(3)):
            fair.append(x)
    return fair


def draw_means(table, solution, k, draws):
    """Empirical mean count per (signature, joiner, center) cell."""
    plan = rounding_plan(solution, table, k)
    n_entries = len(table)
    sums = np.zeros(n_entries * k)
    for seed in range(draws):
        sums += np.bincount(table.point_entry * k + plan.draw(seed), minlength=n_entries * k)
    means = sums / draws
    return {(e.signature, e.mask, j): means[i * k + j] for i, e in enumerate(table) for j in mask_members(e.mask)}


def outside_band(table, solution, means, draws, slack=1e-9):
    counts = table.counts()
    bad = 0
    for (sig, mask, j), mean in means.items():
        n = counts[(sig, mask)]
        x = max(solution.get((sig, mask, j), 0.0), 0.0)
        p = min(x / n, 1.0)
        se = math.sqrt(n * p * (1 - p) / draws)
        bad += abs(mean - x) > 3 * se + slack
    return bad, len(means)


def test_03_worked_example():
    with criterion(3, "worked example LP, feasibility and rounding", budget=5) as info:
        model = GroupModel.from_labels([0, 1, 2])
        table = table_from_counts(WORKED_TABLE, 3)
        lp = build_lp(table, FairnessParams.uniform(3, 0.5), model, 3)
        equalities = lp.conservation_rows()
        info["variables"], info["equalities"] = lp.n_vars, len(equalities)
        assert lp.n_vars == 18 and len(equalities) == 13
        result = check_feasible(lp)
        assert result.feasible

        # the simplex vertex plus a fractional point: the centroid of all fair integral placements
        placements = worked_placements(Fraction(1, 2))
        centroid = {key: sum(p.get(key, 0) for p in placements) / len(placements) for key in lp.variables}
        values = np.array([centroid[key] for key in lp.variables])
        for row in lp.rows:
            lhs = sum(c * values[i] for i, c in row.coeffs)
            assert {"<=": lhs <= row.rhs + 1e-9, ">=": lhs >= row.rhs - 1e-9,
                    "==": abs(lhs - row.rhs) <= 1e-9}[row.sense]
        draws = 1000
        for name, solution in (("vertex", result.solution), ("centroid", centroid)):
            bad, cells = outside_band(table, solution, draw_means(table, solution, 3, draws), draws)
            info[f"{name}_outside"] = f"{bad}/{cells}"
            assert bad == 0


def oracle_cases(seed, count, supplier):
    rng = np.random.default_rng(seed)
    found = 0
    while found < count:
        n = int(rng.integers(2, 11))
        k = int(rng.integers(1, min(3, n) + 1))
        pts, model = random_instance(rng, n, int(rng.integers(1, 4)))
        facilities = PointSet(rng.uniform(0, 10, size=(int(rng.integers(k, 8)), 2))) if supplier else None
        params = params_from_delta(model, rng.uniform(0.05, 0.6))
        opt = exact_fair(pts, facilities, k, params, model)
        if opt.feasible:
            found += 1
            yield pts, facilities, k, params, model, opt.optimal_radius


# optimal radii found by the approximation suites, re-used by the ordering chain
ORACLE_LOG = []


def approximation_suite(number, supplier, ratio, seed):
    eps = 1e-3
    title = f"{ratio}-approximation ({'F!=C' if supplier else 'F=C'})"
    with criterion(number, title, budget=60) as info:
        worst = 0.0
        cases = 0
        for pts, fac, k, params, model, opt in oracle_cases(seed, 60, supplier):
            clustering, _ = fair_k_cluster(pts, fac, k, params, model, eps, seed=cases)
            assert clustering.lam <= ratio * opt + eps + 1e-9, (clustering.lam, opt)
            if opt > 0:
                worst = max(worst, clustering.lam / opt)
            ORACLE_LOG.append((pts, fac, k, opt))
            cases += 1
        info["instances"] = cases
        info["worst_ratio"] = f"{worst:.3f}"


def test_04_approximation_same_sets():
    approximation_suite(4, False, 3, 404)


def test_05_approximation_supplier():
    approximation_suite(5, True, 5, 505)


def test_06_greedy_two_approximation():
    with criterion(6, "greedy 2-approximation") as info:
        rng = np.random.default_rng(606)
        worst = 0.0
        for _ in range(120):
            n = int(rng.integers(1, 13))
            pts = PointSet(rng.uniform(0, 10, size=(n, int(rng.integers(1, 4)))))
            k = int(rng.integers(1, n + 1))
            greedy = greedy_k_center(pts, None, k).radius
            opt = exact_classical(pts, None, k).optimal_radius
            assert greedy <= 2 * opt + 1e-9
            if opt > 0:
                worst = max(worst, greedy / opt)
        info["instances"] = 120
        info["worst_ratio"] = f"{worst:.3f}"


def small_fd_lps(seed, count, max_vars=6):
    rng = np.random.default_rng(seed)
    made = 0
    while made < count:
        pts, model = random_instance(rng, int(rng.integers(2, 9)), int(rng.integers(1, 4)),
                                     overlap=float(rng.uniform(0, 0.5)))
        k = int(rng.integers(1, min(3, pts.count) + 1))
        centers = greedy_k_center(pts, None, k)
        dmat = distance_matrix(pts, centers.as_points())
        lam = float(rng.uniform(centers.radius, max(centers.radius, dmat.max) * 1.1))
        table = build_frequency_table(pts, model, centers, dmat, lam)
        # bounds on a 1/20 grid so the float LP has an exact rational counterpart
        alpha = rng.integers(8, 21, size=model.n_groups)
        beta = np.minimum(alpha, rng.integers(0, 6, size=model.n_groups))
        params = FairnessParams(alpha / 20, beta / 20)
        lp = build_lp(table, params, model, k)
        if lp.n_vars > max_vars:
            continue
        made += 1
        yield lp


def test_07_solver_cross_check():
    with criterion(7, "simplex status matches the rational oracle") as info:
        mismatches = feasible = 0
        cases = 0
        for lp in small_fd_lps(707, 240):
            rows = [({i: Fraction(c).limit_denominator(20) for i, c in row.coeffs}, row.sense, row.rhs)
                    for row in lp.rows]
            ours = check_feasible(lp, backend="simplex").feasible
            exact = lp_feasible_exact(lp.n_vars, rows)
            mismatches += ours != exact
            feasible += exact
            cases += 1
        info["lps"] = cases
        info["feasible"] = feasible
        info["disagreements"] = mismatches
        assert cases >= 200 and mismatches == 0
        assert 0 < feasible < cases


def test_08_expectation():
    with criterion(8, "rounding matches LP expectations") as info:
        draws = 2000
        bad = cells = 0
        for inst in range(20):
            pts, model = make_synthetic(500, n_groups=int(2 + inst % 3), overlap=0.2 * (inst % 2),
                                        mixing=1.5, seed=800 + inst)
            params = params_from_delta(model, 0.2)
            search = search_radius(pts, None, 4 + inst % 5, params, model, 1e-2)
            table, solution = search.probe.table, search.probe.result.solution
            b, c = outside_band(table, solution, draw_means(table, solution, search.centers.k, draws), draws)
            bad += b
            cells += c
        info["cells"] = cells
        info["outside_3se"] = bad
        assert bad <= 0.01 * cells


def test_09_ordering_chain():
    with criterion(9, "classical optimum never exceeds the fair optimum") as info:
        if not ORACLE_LOG:
            for seed, supplier in ((404, False), (505, True)):
                ORACLE_LOG.extend((p, f, k, opt) for p, f, k, _, _, opt in oracle_cases(seed, 60, supplier))
        for pts, fac, k, opt in ORACLE_LOG:
            assert exact_classical(pts, fac, k).optimal_radius <= opt
        info["instances"] = len(ORACLE_LOG)


def test_10_determinism():
    with criterion(10, "identical config gives identical report") as info:
        data = make_synthetic(300, n_groups=3, overlap=0.2, seed=1010)
        for algorithm in ("fair", "greedy"):
            config = RunConfig(k=5, delta=0.2, algorithm=algorithm, seed=42, repeats=3, trace=True)
            a = run(config, data=data).to_json(include_runtime=False)
            b = run(config, data=data).to_json(include_runtime=False)
            assert a == b
            assert '"runtime_seconds"' not in a
        info["bytes"] = len(a)


def test_11_scaling():
    with criterion(11, "N=30000, k=25, l=5 full pipeline", budget=300) as info:
        pts, model = make_synthetic(30_000, n_groups=5, dim=2, mixing=1.5, seed=1111)
        params = params_from_delta(model, 0.2)
        search = search_radius(pts, None, 25, params, model, 1e-2)
        clustering = cluster_from_search(search, model, params, seed=0)
        info["lambda"] = f"{clustering.lam:.4g}"
        info["iterations"] = search.trace.iterations
        assert clustering.assignment.shape == (30_000,)
