"""End-to-end acceptance checks.

Each test prints one `[criterion NN] PASS/FAIL <detail>` line (visible with
`pytest -s`), covering oracle equivalence, dynamical self-consistency, the
stability checkers, the classifier's gradients, the directional attack/defense
reproductions, the data anchors, the purify contract, and a scaling probe.

Criterion 07 states a quantitative defense-effect target that this
implementation does not reach on the synthetic family it prescribes; the test
asserts the stated target and is expected to fail. See the ledger for the
measured numbers and analysis.
"""

import math
import os
import time
import warnings

import numpy as np
import pytest

from resilgraph import (
    AttackSpec,
    PurifyConfig,
    SbmSpec,
    attack,
    attack_budget,
    boundary_k,
    degree_assortativity,
    equilibrium_numeric,
    evaluate,
    generate_sbm,
    integrate,
    load_graph,
    make_split,
    Model2D,
    numerical_rank,
    purify,
    sector_intervals,
    smoothness_histogram,
    spr_check_1d,
    summarize,
    theorem1_check,
    train,
    GeneralSystem,
    TrainConfig,
)

from oracles import condense_oracle, gradcheck_max_rel_err, purify_oracle, random_graph


class _Reporter:
    """Prints the criterion verdict line even when an assertion fails."""

    def __init__(self, num):
        self.num = num
        self.detail = ""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "PASS" if exc_type is None else "FAIL"
        print(f"[criterion {self.num:02d}] {status} {self.detail}".rstrip())
        return False


def test_criterion_01_condensation_matches_bruteforce():
    t0 = time.perf_counter()
    with _Reporter(1) as rep:
        rng = np.random.default_rng(1)
        worst = 0.0
        for _ in range(50):
            g = random_graph(rng, n_max=30)
            state = summarize(g)
            want = condense_oracle(g)
            got = state.to_dict()
            for key in ("r_gra", "q_gra", "gamma_r_avg", "gamma_q_avg"):
                worst = max(worst, abs(got[key] - want[key]))
        elapsed = time.perf_counter() - t0
        rep.detail = f"worst |err| {worst:.3e} over 50 graphs in {elapsed:.2f}s"
        assert worst <= 1e-12
        assert elapsed < 10.0


# multiplicative nudges applied to each stable root; zero coordinates get a
# small additive floor instead (a relative perturbation keeps near-marginal
# roots inside their slow basins, where a fixed offset would need t >> 500)
_STARTS = ((1.01, 1.01), (0.985, 1.005), (1.005, 0.985))
_ZERO_FLOOR = 1e-3


def _settle(model, start, root):
    y = np.asarray(start, dtype=float)
    target = np.array(root)
    for _ in range(10):  # chunks of t=50 up to t=500
        y = integrate(model, y, dt=0.05, t_end=50.0).states[-1]
        if np.abs(y - target).max() < 1e-7:
            break
    return float(np.abs(y - target).max())


def test_criterion_02_stable_roots_attract_perturbed_starts():
    t0 = time.perf_counter()
    with _Reporter(2) as rep:
        worst = 0.0
        roots_checked = 0
        for m in (0.3, 0.7):
            for c in (0.3, 0.7):
                for gr in (0.5, 1.0, 2.0):
                    for gq in (0.5, 1.0, 2.0):
                        model = Model2D(m=m, c=c, gamma_r=gr, gamma_q=gq)
                        for root in equilibrium_numeric(model):
                            if not root.stable:
                                continue
                            roots_checked += 1
                            for fr, fq in _STARTS:
                                start = (
                                    root.r * fr if root.r > 0 else _ZERO_FLOOR,
                                    root.q * fq if root.q > 0 else _ZERO_FLOOR,
                                )
                                err = _settle(model, start, (root.r, root.q))
                                worst = max(worst, err)
        elapsed = time.perf_counter() - t0
        rep.detail = (
            f"worst settle err {worst:.3e} over {roots_checked} stable roots"
            f" x 3 starts in {elapsed:.1f}s"
        )
        assert worst <= 1e-5
        assert elapsed < 30.0


def test_criterion_03_boundary_values_and_exact_sector_products():
    with _Reporter(3) as rep:
        b1 = boundary_k(1.0)
        b2 = boundary_k(2.0)
        rng = np.random.default_rng(31)
        exact = 0
        for _ in range(100):
            theta = float(np.exp(rng.uniform(np.log(0.05), np.log(20.0))))
            sb = sector_intervals(theta)
            if sb.k_r_min * sb.k_q_min == 1.0:
                exact += 1
        rep.detail = (
            f"boundary(1) err {abs(b1 - 1.0):.1e}, boundary(2) err "
            f"{abs(b2 - 0.5):.1e}, {exact}/100 products exactly 1.0"
        )
        assert abs(b1 - 1.0) <= 1e-9
        assert abs(b2 - 0.5) <= 1e-6
        assert exact == 100


def test_criterion_04_scalar_decompositions_pass_and_flip():
    with _Reporter(4) as rep:
        rng = np.random.default_rng(4)
        grid = np.logspace(-3.0, 3.0, 200)
        spr_ok = 0
        flip_ok = 0
        agree = 0
        cases = 100
        for _ in range(cases):
            m = float(rng.uniform(0.2, 3.0))
            c = float(rng.uniform(0.2, 3.0))
            gr = float(rng.uniform(0.1, 4.0))
            gq = float(rng.uniform(0.1, 4.0))
            theta = float(rng.uniform(0.3, 3.0))
            sector = sector_intervals(theta)
            k_r = sector.k_r_min * float(rng.uniform(1.0, 3.0))
            k_q = sector.k_q_min * float(rng.uniform(1.0, 3.0))
            loops = (
                (m, gq, k_r),  # first-state loop closed through the other gain
                (c, gr, k_q),
            )
            verdicts = []
            for damping, gain, k_gain in loops:
                system = GeneralSystem(
                    a_mat=[[-damping]], b_mat=[[gain]], c_mat=[[1.0]],
                    m_diag=[1.0 / k_gain], psi_diag=[0.0],
                )
                verdicts.append(theorem1_check(system))
                scan = spr_check_1d(damping, gain, k_gain, 0.0, grid)
                if scan.positive == verdicts[-1].spr:
                    agree += 1
            if all(v.spr and v.overall for v in verdicts):
                spr_ok += 1
            flipped = [
                theorem1_check(
                    GeneralSystem(
                        a_mat=[[+damping]], b_mat=[[gain]], c_mat=[[1.0]],
                        m_diag=[1.0 / k_gain], psi_diag=[0.0],
                    )
                )
                for damping, gain, k_gain in loops
            ]
            if all(not v.hurwitz for v in flipped):
                flip_ok += 1
        rep.detail = (
            f"{spr_ok}/{cases} sweeps SPR-positive, {flip_ok}/{cases} sign flips"
            f" break hurwitz, {agree}/{2 * cases} scalar-scan agreements"
        )
        assert spr_ok == cases
        assert flip_ok == cases
        assert agree == 2 * cases


def test_criterion_05_gradient_check():
    t0 = time.perf_counter()
    with _Reporter(5) as rep:
        worst, checked = gradcheck_max_rel_err()
        elapsed = time.perf_counter() - t0
        rep.detail = (
            f"max rel err {worst:.3e} over {checked} weight entries in"
            f" {elapsed:.2f}s"
        )
        assert worst < 1e-4
        assert elapsed < 5.0


_FIG_SBM = dict(n=600, classes=4, p_in=0.05, p_out=0.005, feature_noise=0.1)


def _fig_stages(seed_base, rap):
    clean = generate_sbm(SbmSpec(seed=seed_base, **_FIG_SBM))
    attacked, _ = attack(
        clean, AttackSpec(kind="dice", rap=rap, seed=seed_base + 1)
    )
    purified, _ = purify(attacked, PurifyConfig(alpha=0.85, w_jaccard=0.3,
                                                w_cosine=0.7))
    return clean, attacked, purified


def test_criterion_06_attack_and_purify_move_rank_and_smoothness():
    t0 = time.perf_counter()
    with _Reporter(6) as rep:
        up_rank = up_smooth = down_rank = down_smooth = 0
        for s in range(10):
            clean, attacked, purified = _fig_stages(10 * s, rap=0.25)
            r = [numerical_rank(g) for g in (clean, attacked, purified)]
            sm = [smoothness_histogram(g).mean
                  for g in (clean, attacked, purified)]
            # the 600-node SBM adjacency is already essentially full rank, so
            # the rank direction is asserted non-strictly (the module-level
            # invariant); smoothness moves strictly
            up_rank += r[1] >= r[0]
            down_rank += r[2] <= r[1]
            up_smooth += sm[1] > sm[0]
            down_smooth += sm[2] < sm[1]
        elapsed = time.perf_counter() - t0
        rep.detail = (
            f"attack: rank>= {up_rank}/10, smooth> {up_smooth}/10; purify:"
            f" rank<= {down_rank}/10, smooth< {down_smooth}/10 in {elapsed:.1f}s"
        )
        assert up_rank >= 9
        assert up_smooth >= 9
        assert down_rank >= 9
        assert down_smooth >= 9
        assert elapsed < 300.0


def _defense_delta(seed_base, rap):
    # stage seeds follow the package-wide offsets: attack +1, split +2, train +3
    clean, attacked, purified = _fig_stages(seed_base, rap)
    split = make_split(clean.n, seed=seed_base + 2)
    config = TrainConfig(seed=seed_base + 3)
    accs = {}
    for name, g in (("attacked", attacked), ("purified", purified)):
        model, _ = train(g, split, config)
        accs[name] = evaluate(model, g, split)["test"]
    return accs["purified"] - accs["attacked"]


def test_criterion_07_purification_recovers_accuracy():
    t0 = time.perf_counter()
    with _Reporter(7) as rep:
        deltas_25 = [_defense_delta(10 * s, 0.25) for s in range(10)]
        deltas_05 = [_defense_delta(10 * s, 0.05) for s in range(10)]
        mean_25 = float(np.mean(deltas_25))
        mean_05 = float(np.mean(deltas_05))
        elapsed = time.perf_counter() - t0
        rep.detail = (
            f"mean test-accuracy delta {mean_25:+.4f} at rap 0.25 (target"
            f" >= +0.03), {mean_05:+.4f} at rap 0.05 (target >= 0) in"
            f" {elapsed:.0f}s"
        )
        assert elapsed < 600.0
        assert mean_25 >= 0.03
        assert mean_05 >= 0.0


def test_criterion_08_citation_graph_anchors():
    with _Reporter(8) as rep:
        assert attack_budget(5069, 0.25) == 1267
        data_dir = os.environ.get("RESILGRAPH_CORA_DIR")
        if not data_dir:
            rep.detail = (
                "budget anchor 1267 ok; data anchors skipped (set"
                " RESILGRAPH_CORA_DIR to enable)"
            )
            return
        g = load_graph(
            os.path.join(data_dir, "edges.txt"),
            os.path.join(data_dir, "features.csv"),
            os.path.join(data_dir, "labels.txt"),
        )
        assort = degree_assortativity(g)
        rep.detail = (
            f"|edges| {g.num_edges} (want 5069), assortativity {assort:.4f}"
            f" (want -0.0588 +/- 0.005), budget anchor ok"
        )
        assert g.num_edges == 5069
        assert assort == pytest.approx(-0.0588, abs=0.005)


def test_criterion_09_purify_contract_fuzz():
    with _Reporter(9) as rep:
        rng = np.random.default_rng(9)
        noop_cases = 0
        for case in range(200):
            g = random_graph(rng, n_max=16, dim_range=(2, 4))
            alpha = 1.0 if case % 10 == 0 else float(rng.uniform(0.05, 1.0))
            protect = bool(rng.integers(0, 2))
            metric = ("cosine_distance", "l2")[int(rng.integers(0, 2))]
            hop = int(rng.integers(1, 4))
            w_j = float(rng.uniform(0.05, 1.0))
            w_c = float(rng.uniform(0.05, 1.0))
            cfg = PurifyConfig(alpha=alpha, w_jaccard=w_j, w_cosine=w_c,
                               hop=hop, protect_isolation=protect,
                               metric=metric)
            out, report = purify(g, cfg)
            # determinism: a second run reproduces graph and report exactly
            out2, report2 = purify(g, cfg)
            assert out.edges == out2.edges and report == report2
            # subset: nothing is ever added
            assert set(out.edges) <= set(g.edges)
            assert set(report.removed) <= set(g.edges)
            # budget: the examination count follows the alpha cut exactly
            e = g.num_edges
            expected = sum(1 for pos in range(e) if e - pos > alpha * e)
            assert report.candidates_examined == expected
            assert len(report.removed) + len(report.restored) == expected
            # full behavioral agreement with the independent reference walk
            want = purify_oracle(g, alpha, w_jaccard=w_j, w_cosine=w_c,
                                 hop=hop, protect_isolation=protect,
                                 metric=metric)
            assert report.removed == want["removed"]
            assert report.restored == want["restored"]
            assert report.stop_reason == want["stop_reason"]
            assert out.edges == want["final_edges"]
            if alpha == 1.0:
                noop_cases += 1
                assert out.edges == g.edges
                assert report.candidates_examined == 0
        rep.detail = (
            f"200 fuzz cases match the reference walk; {noop_cases}"
            f" alpha=1.0 cases were exact no-ops"
        )
        assert noop_cases == 20


def test_criterion_10_purify_scaling_trend():
    with _Reporter(10) as rep:
        sizes = (205, 410, 820, 1640)
        edge_counts = []
        times = []
        for n in sizes:
            g = generate_sbm(
                SbmSpec(n=n, classes=4, p_in=30.0 / n, p_out=3.0 / n, seed=7)
            )
            edge_counts.append(g.num_edges)
            t0 = time.perf_counter()
            purify(g, PurifyConfig(alpha=0.85))
            times.append(time.perf_counter() - t0)
        slope = float(
            np.polyfit(np.log(edge_counts), np.log(times), 1)[0]
        )
        rep.detail = (
            f"edges {edge_counts}, log-log slope {slope:.3f}"
            f" (informational band [0.8, 1.6])"
        )
        if not 0.8 <= slope <= 1.6:
            warnings.warn(
                f"purify scaling slope {slope:.3f} left the near-linear band"
                " [0.8, 1.6]",
                RuntimeWarning,
            )
        assert math.isfinite(slope)
