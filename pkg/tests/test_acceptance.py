"""Acceptance gate.

Each test prints one ``criterion N: PASS|FAIL (...)`` line.  Criterion 11
(reproducing published numbers for an external benchmark dataset) is not
part of the gate; the ingestion path it would use is exercised by
``test_criterion_11_ingestion_only`` and the fixture tests in
``test_signals.py`` / ``test_cli.py``.
"""

import math
import time

import numpy as np
from scipy import stats

from mcmillan.bounds import alpha_for_prob, prob_exact_iid
from mcmillan.dft import dft_forward, sup_norm
from mcmillan.hankel import HankelOperator, dft_norm_bound
from mcmillan.ident import (
    aic_scan,
    degree_lower_bound,
    empirical_degree_lower_bound,
    noise_norm_samples,
    simulate_lti,
)
from mcmillan.noise import NoiseKind, NoiseModel, SeededGenerator, sample_noise, trial_generator
from mcmillan.signals import (
    add_noise,
    load_system_matrix_market,
    nmr_signal,
    random_modal_system,
    save_system_matrix_market,
)
from mcmillan.spectrum import (
    count_at_or_above,
    dense_singular_values,
    hankel_norms,
    jacobi_svd,
    lanczos_singular_values,
)

CN = NoiseModel("complex-iid")


def report(capsys, k, ok, detail, elapsed=None, limit=None):
    if limit is not None and elapsed > limit:
        ok = False
        detail += f"; took {elapsed:.1f}s, limit {limit}s"
    elif elapsed is not None:
        detail += f"; {elapsed:.1f}s"
    with capsys.disabled():
        print(f"\ncriterion {k}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, detail


def covariance(kind, n):
    # AR(1) covariance; the complex one has a rotating lag-one correlation
    lag = np.arange(n)[:, None] - np.arange(n)[None, :]
    if kind is NoiseKind.REAL_COV:
        return 0.5 ** np.abs(lag)
    rho = 0.5 * np.exp(1j * np.pi / 5)
    S = np.where(lag >= 0, rho ** np.abs(lag), np.conj(rho) ** np.abs(lag))
    return S


def model_for(kind, n):
    return NoiseModel(kind, covariance(kind, n) if kind.has_covariance else None)


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_criterion_01_embedding_bound(capsys):
    t0 = time.perf_counter()
    ns = (8, 16, 32, 64, 128, 256)
    kinds = list(NoiseKind)
    per_cell = math.ceil(1000 / (len(ns) * len(kinds)))
    trials, worst, jacobi_checked = 0, 0.0, 0
    ok = True
    for n in ns:
        for i_kind, kind in enumerate(kinds):
            model = model_for(kind, n)
            root = 10 * n + i_kind
            g = np.stack([sample_noise(model, n, trial_generator(root, t))
                          for t in range(per_cell)])
            norms = hankel_norms(g, n // 2)
            bounds = dft_norm_bound(g)
            # in-repo dense SVD on a subset as an independent second opinion
            for i in range(3):
                s = jacobi_svd(HankelOperator(g[i], n // 2).dense(), compute_uv=False)
                ok &= abs(s[0] - norms[i]) <= 1e-12 * norms[i]
                jacobi_checked += 1
            worst = max(worst, float(np.max(norms / bounds)))
            ok &= bool(np.all(norms <= bounds * (1 + 1e-10)))
            trials += per_cell
    report(capsys, 1, ok and trials >= 1000,
           f"{trials} trials, max ||G||/bound = {worst:.4f}, {jacobi_checked} Jacobi cross-checks",
           time.perf_counter() - t0, 120)


def test_criterion_02_fast_matvec(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    worst = 0.0
    cases = 0
    shapes = [(n, m) for n in range(2, 65) for m in range(1, n)]
    shapes += [(n, m) for n in (255, 256, 257) for m in (1, 2, n // 3, n // 2, n - 2, n - 1)]
    for n, m in shapes:
        g = crandn(rng, n)
        G = HankelOperator(g, m)
        D = np.array([[g[j + k] for k in range(m)] for j in range(n - m)])
        x, v = crandn(rng, m), crandn(rng, n - m)
        fx, ref_x = G.matvec(x), D @ x
        fv, ref_v = G.rmatvec(v), D.conj().T @ v
        worst = max(worst,
                    np.linalg.norm(fx - ref_x) / np.linalg.norm(ref_x),
                    np.linalg.norm(fv - ref_v) / np.linalg.norm(ref_v))
        cases += 1
    report(capsys, 2, worst <= 1e-12, f"{cases} (n, m) pairs, worst relative error {worst:.2e}",
           time.perf_counter() - t0, 60)


def test_criterion_03_sharpness_witness(capsys):
    worst = 0.0
    count = 0
    for n in list(range(2, 65)) + [255, 256, 257]:
        e0 = np.zeros(n)
        e0[0] = 1
        bound = math.sqrt(n) * sup_norm(dft_forward(e0))
        for m in range(1, n):
            norm = dense_singular_values(HankelOperator(e0, m).dense()).values[0] if n <= 64 \
                else np.linalg.norm(HankelOperator(e0, m).dense(), 2)
            worst = max(worst, abs(norm - 1), abs(bound - 1), abs(dft_norm_bound(e0) - 1))
            count += 1
    report(capsys, 3, worst <= 1e-12, f"{count} (n, m) pairs, max deviation from 1: {worst:.1e}")


def test_criterion_04_theorem_coverage(capsys):
    t0 = time.perf_counter()
    trials = 2000
    lines, ok = [], True
    for kind in NoiseKind:
        for n in (16, 64, 256):
            model = model_for(kind, n)
            norms = noise_norm_samples(model, n, n // 2, trials, root_seed=400 + n)
            for p in (0.5, 0.9, 0.99):
                alpha = alpha_for_prob(p, model, n)
                cover = float(np.mean(norms <= alpha * math.sqrt(n)))
                need = p - 3 * math.sqrt(p * (1 - p) / trials)
                ok &= cover >= need
                if cover < need:
                    lines.append(f"{kind.value} n={n} p={p}: {cover:.4f} < {need:.4f}")
    detail = "36 cases, all covered" if ok else "; ".join(lines)
    report(capsys, 4, ok, detail, time.perf_counter() - t0, 600)


def test_criterion_05_exact_iid_cdf(capsys):
    t0 = time.perf_counter()
    trials = 5000
    parts, ok = [], True
    for kind in (NoiseKind.REAL_IID, NoiseKind.COMPLEX_IID):
        for n in (16, 64):
            g = sample_noise(NoiseModel(kind), n, SeededGenerator(500 + n), size=trials)
            sup = sup_norm(dft_forward(g))
            cdf = np.vectorize(lambda a: prob_exact_iid(a, kind, n) if a > 0 else 0.0)
            pval = stats.kstest(sup, cdf).pvalue
            ok &= pval > 0.001
            parts.append(f"{kind.value} n={n} p={pval:.3f}")
    report(capsys, 5, ok, ", ".join(parts), time.perf_counter() - t0, 180)


def test_criterion_06_asymptotic_rate(capsys):
    ratios = []
    for n in (2**10, 2**14, 2**20):
        a = alpha_for_prob(0.5, CN, n)
        ratios.append(a * math.sqrt(n) / math.sqrt(2 * n * math.log(n)))
    ok = all(0.8 <= r <= 1.3 for r in ratios)
    report(capsys, 6, ok, "ratios " + ", ".join(f"{r:.4f}" for r in ratios))


def test_criterion_07_nmr_recovery(capsys):
    t0 = time.perf_counter()
    s = dense_singular_values(HankelOperator(nmr_signal(), 128).dense()).values
    clean_rank = int(np.count_nonzero(s > 1e-8 * s[0]))
    theory, emp = [], []
    for seed in range(50):
        y = add_noise(nmr_signal(), 15.0, CN, SeededGenerator(1000 + seed))
        t = degree_lower_bound(y, 15.0, CN, p_hat=0.99)
        e = empirical_degree_lower_bound(y, 15.0, CN, gamma=99, trials=400, root_seed=seed)
        theory.append(t.lower_bound)
        emp.append(e.lower_bound)
    theory, emp = np.array(theory), np.array(emp)
    at_most_11 = int(np.sum(theory <= 11))
    ordered = int(np.sum(emp >= theory))
    ok = clean_rank == 11 and at_most_11 >= 48 and ordered == 50
    report(capsys, 7, ok,
           f"noise-free rank {clean_rank}; theorem <= 11 in {at_most_11}/50 "
           f"(values {sorted(set(theory.tolist()))}); empirical >= theorem in {ordered}/50 "
           f"(values {sorted(set(emp.tolist()))})",
           time.perf_counter() - t0, 600)


def test_criterion_08_lanczos_vs_dense(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    parts, ok = [], True
    for n in (256, 2048):
        H = HankelOperator(crandn(rng, n), n // 2)
        spec = lanczos_singular_values(H, 20, seed=n)
        if n == 256:
            ref = dense_singular_values(H.dense()).values[:20]
        else:
            ref = np.linalg.svd(H.dense(), compute_uv=False)[:20]
        conv = spec.converged
        err = float(np.max(np.abs(spec.values[conv] - ref[conv]) / ref[conv]))
        ok &= conv.sum() >= 10 and err <= 1e-8
        parts.append(f"n={n}: {conv.sum()}/20 converged, max rel err {err:.1e}")
    report(capsys, 8, ok, "; ".join(parts), time.perf_counter() - t0, 180)


def test_criterion_09_weyl_counting(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(9)
    worst_excess = -10**9
    for _ in range(200):
        rows, cols = (int(v) for v in rng.integers(4, 24, size=2))
        r = int(rng.integers(1, min(rows, cols)))
        low = crandn(rng, rows, r) @ crandn(rng, r, cols)
        E = 10.0 ** rng.uniform(-3, 1) * crandn(rng, rows, cols)
        count = count_at_or_above(dense_singular_values(low + E), np.linalg.norm(E, 2))
        worst_excess = max(worst_excess, count - r)
    report(capsys, 9, worst_excess <= 0,
           f"200 instances, max(count - r) = {worst_excess}", time.perf_counter() - t0, 60)


def test_criterion_10_aic_ordering(capsys):
    t0 = time.perf_counter()
    model = CN.with_eps(15.0)
    hits, pairs = 0, []
    for seed in range(50):
        y = add_noise(nmr_signal(), 15.0, CN, SeededGenerator(1000 + seed))
        lb = degree_lower_bound(y, 15.0, CN, p_hat=0.99).lower_bound
        q = aic_scan(y, model, 20).argmin_q
        hits += lb <= q
        pairs.append(q)
    report(capsys, 10, hits >= 45,
           f"theorem bound <= AIC argmin in {hits}/50 seeds; argmin range "
           f"{min(pairs)}..{max(pairs)}", time.perf_counter() - t0, 900)


def test_criterion_11_ingestion_only(capsys, tmp_path):
    # not a gate: the published large-n numbers need an external dataset.
    # Run the same path (Matrix Market system -> simulate -> estimate) at n = 8192.
    r = random_modal_system(12, 0.9995, seed=4)
    paths = [tmp_path / f for f in ("A.mtx", "c.mtx", "x0.mtx")]
    save_system_matrix_market(r, *paths, layout="coordinate")
    y = simulate_lti(load_system_matrix_market(*paths), 8192)
    y = add_noise(y, 0.05, CN, SeededGenerator(11))
    est = degree_lower_bound(y, 0.05, CN)
    with capsys.disabled():
        print(f"\ncriterion 11: EXCLUDED (external dataset); ingestion smoke run at n=8192 "
              f"gave lower bound {est.lower_bound} for a 12-mode system via "
              f"{est.spectrum.method.value}, certified={est.certified}")
    assert est.lower_bound <= 12 and est.certified
