"""Acceptance suite: eleven criteria, one printed pass/fail line each.

Criteria 1-6 and 9 need the full run matrix (5 trend arms x 3 seeds x 2
environments, the generative-decoder pairs, and a part-loss-weight sweep).
The ``campaign`` fixture trains whatever is missing into the cache root
(``$PHYSWM_OUT_ROOT`` or ``<repo>/runs``) and reuses completed runs, so
the first invocation costs about two hours on one core and later ones
minutes. Run with ``-s`` to see the per-criterion lines.
"""

import json
import os
import time
from pathlib import Path

import numpy as np
import pytest

import physwm.losses as L
from physwm import bench
from physwm.engine import config_for_arm, runner
from physwm.models import (
    VAE,
    LatentLayout,
    LatentPredictor,
    PartitionedDecoderSet,
    TinyAutoencoder,
    count_params,
)
from physwm.sim import constants as C
from physwm.sim import dynamics as D
from physwm.sim.render import render
from physwm.sim.types import Action, PhysState

TREND_ARMS = ("baseline", "p1_structured", "p2_equivariant", "p3_static", "p3_pseudo")
SEEDS = (0, 1, 2)
ENVS = ("cartpole", "lander")
HORIZONS = (1, 5, 10, 20, 50)

# Published reference values the size criterion reports alongside mine.
REF_SIZES = {"baseline": 200_259, "partitioned": 144_665}


def _root():
    return Path(os.environ.get(runner.OUT_ROOT_VAR,
                               Path(__file__).resolve().parents[1] / "runs"))


def _report(num, ok, detail):
    print(f"\ncriterion {num:2d} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, f"criterion {num}: {detail}"


def _trend_configs():
    return [config_for_arm(env, arm, seed=seed)
            for env in ENVS for arm in TREND_ARMS for seed in SEEDS]


def _p4_configs():
    cfgs = [config_for_arm(env, arm)
            for env in ENVS for arm in ("p4_partitioned", "p4_baseline")]
    cfgs += [config_for_arm("cartpole", "p4_partitioned", p4_lambda=lam)
             for lam in (0.01, 0.9)]
    return cfgs


@pytest.fixture(scope="session")
def campaign():
    """Ensure every needed run exists and is evaluated; returns the root."""
    root = _root()
    for cfg in _trend_configs() + _p4_configs():
        run = runner.train_run(cfg, root=root)
        if not (run / "eval").exists():
            runner.evaluate_run(run)
    return root


def _horizon_means(root, env, arm):
    """(seeds, horizons) array of per-seed mean MSE curves."""
    rows = []
    for seed in SEEDS:
        cfg = config_for_arm(env, arm, seed=seed)
        d = json.loads((root / cfg.run_name() / "eval" / "horizon.json").read_text())
        assert tuple(d["horizons"]) == HORIZONS
        rows.append(d["mean"])
    return np.array(rows)


def _gen_metrics(root, cfg):
    return json.loads(
        (root / cfg.run_name() / "eval" / "gen_metrics.json").read_text())


def test_c01_structured_beats_baseline_at_horizon_50(campaign):
    details = []
    ok = True
    for env in ENVS:
        base = _horizon_means(campaign, env, "baseline")[:, -1]
        p1 = _horizon_means(campaign, env, "p1_structured")[:, -1]
        non_overlap = p1.mean() + p1.std() < base.mean() - base.std()
        sweep = bool(np.all(p1 < base))
        env_ok = p1.mean() < base.mean() and (non_overlap or sweep)
        elapsed = sum(
            json.loads((campaign / config_for_arm(env, arm, seed=s).run_name()
                        / "done.json").read_text())["elapsed_seconds"]
            for arm in TREND_ARMS for s in SEEDS)
        env_ok = env_ok and elapsed <= 4 * 3600
        details.append(f"{env}: p1 {p1.mean():.5f}+-{p1.std():.5f} vs "
                       f"baseline {base.mean():.5f}+-{base.std():.5f}, "
                       f"per-seed wins {int((p1 < base).sum())}/3, "
                       f"train {elapsed/60:.0f} min")
        ok = ok and env_ok
    _report(1, ok, "; ".join(details))


def test_c02_equivariant_at_most_baseline_every_horizon(campaign):
    details = []
    ok = True
    for env in ENVS:
        base = _horizon_means(campaign, env, "baseline").mean(axis=0)
        p2 = _horizon_means(campaign, env, "p2_equivariant").mean(axis=0)
        env_ok = bool(np.all(p2 <= base))
        details.append(f"{env}: p2<=base at "
                       f"{int((p2 <= base).sum())}/{len(HORIZONS)} horizons")
        ok = ok and env_ok
    _report(2, ok, "; ".join(details))


def test_c03_pseudo_velocity_beats_static_every_horizon(campaign):
    details = []
    ok = True
    for env in ENVS:
        static = _horizon_means(campaign, env, "p3_static").mean(axis=0)
        pseudo = _horizon_means(campaign, env, "p3_pseudo").mean(axis=0)
        env_ok = bool(np.all(pseudo < static))
        details.append(f"{env}: pseudo<static at "
                       f"{int((pseudo < static).sum())}/{len(HORIZONS)} horizons")
        ok = ok and env_ok
    _report(3, ok, "; ".join(details))


def test_c04_partitioned_size_ratio(campaign):
    cfg_p = config_for_arm("cartpole", "p4_partitioned")
    cfg_b = config_for_arm("cartpole", "p4_baseline")
    size_p = _gen_metrics(campaign, cfg_p)["model_size"]
    size_b = _gen_metrics(campaign, cfg_b)["model_size"]
    ratio = size_p / size_b
    _report(4, ratio <= 0.75,
            f"cartpole partitioned {size_p:,} vs monolithic {size_b:,} "
            f"(ratio {ratio:.4f} <= 0.75; reference counts "
            f"{REF_SIZES['partitioned']:,} vs {REF_SIZES['baseline']:,})")


def test_c05_partitioned_ssim_quality(campaign):
    cp_p = _gen_metrics(campaign, config_for_arm("cartpole", "p4_partitioned"))
    cp_b = _gen_metrics(campaign, config_for_arm("cartpole", "p4_baseline"))
    ld_p = _gen_metrics(campaign, config_for_arm("lander", "p4_partitioned"))
    ld_b = _gen_metrics(campaign, config_for_arm("lander", "p4_baseline"))
    gap = abs(cp_b["avg_ssim"] - cp_p["avg_ssim"])
    _report(5, gap <= 0.02,
            f"cartpole SSIM partitioned {cp_p['avg_ssim']:.4f} vs monolithic "
            f"{cp_b['avg_ssim']:.4f} (|gap| {gap:.4f} <= 0.02); lander reported: "
            f"{ld_p['avg_ssim']:.4f} vs {ld_b['avg_ssim']:.4f} (no threshold)")


def test_c06_lambda_regimes(campaign):
    m_low = _gen_metrics(campaign,
                         config_for_arm("cartpole", "p4_partitioned", p4_lambda=0.01))
    m_mid = _gen_metrics(campaign, config_for_arm("cartpole", "p4_partitioned"))
    m_high = _gen_metrics(campaign,
                          config_for_arm("cartpole", "p4_partitioned", p4_lambda=0.9))
    low = np.array(m_low["out_of_mask_energy"])
    mid = np.array(m_mid["out_of_mask_energy"])
    leak_ok = bool(np.all(low > mid))
    mse_ok = m_high["avg_mse"] > m_mid["avg_mse"]
    _report(6, leak_ok and mse_ok,
            f"out-of-mask energy lambda=0.01 {np.round(low, 4).tolist()} > "
            f"lambda=0.2 {np.round(mid, 4).tolist()} per part: {leak_ok}; "
            f"composed MSE lambda=0.9 {m_high['avg_mse']:.5f} > "
            f"lambda=0.2 {m_mid['avg_mse']:.5f}: {mse_ok}")


def test_c07_loss_closed_forms_and_properties():
    t0 = time.perf_counter()
    tol = 1e-9

    # Closed forms.
    x = np.full((2, 3), 0.5)
    assert L.mse(x, x.copy()) <= tol
    assert abs(L.kl_to_unit(np.zeros((1, 4)), np.zeros((1, 4)))) <= tol
    assert abs(L.kl_to_unit(np.array([[1.0]]), np.array([[0.0]])) - 0.5) <= tol
    assert abs(L.smoothness_loss(np.array([[0.0], [1.0], [2.0]]))) <= tol
    assert abs(L.smoothness_loss(np.array([[0.0], [1.0], [4.0]])) - 4.0) <= tol
    assert abs(L.interval_loss(np.array([0.5]), np.array([0.0]),
                               np.array([1.0]))) <= tol
    z = np.zeros((1, 8))
    assert abs(L.supervised_state_loss(z, np.zeros((1, 2)), (0, 1))) <= tol
    one = np.ones((1, 4))
    assert abs(L.equivariance_value(one, one.copy()) - 0.0) <= tol

    rng = np.random.default_rng(0)
    # Smoothness null space: exactly the affine-in-time sequences.
    for _ in range(100):
        a = rng.normal(size=(1, 5))
        b = rng.normal(size=(1, 5))
        t = np.arange(6)[:, None]
        affine = a * t + b
        assert abs(L.smoothness_loss(affine)) <= tol
    # Equivariance identity pairs are exactly zero.
    for _ in range(100):
        e = rng.normal(size=(4, 16))
        assert abs(L.equivariance_value(e, e.copy())) <= tol
    elapsed = time.perf_counter() - t0
    _report(7, elapsed < 60.0,
            f"closed forms at 1e-9 and 2x100-input property sweeps in "
            f"{elapsed:.2f}s (< 60s)")


def _fd_input_check(f, grad, x, rng, n=10, rel=1e-3):
    """Central differences on n random coordinates of x."""
    g = grad(x)
    flat = x.reshape(-1)
    gflat = np.asarray(g).reshape(-1)
    worst = 0.0
    eps = 1e-6
    for idx in rng.choice(flat.size, size=min(n, flat.size), replace=False):
        keep = flat[idx]
        flat[idx] = keep + eps
        up = f(x)
        flat[idx] = keep - eps
        dn = f(x)
        flat[idx] = keep
        fd = (up - dn) / (2 * eps)
        denom = max(abs(fd), abs(gflat[idx]), 1e-8)
        worst = max(worst, abs(fd - gflat[idx]) / denom)
    return worst


def _fd_param_check(model, loss_and_back, rng, n=10, rel=1e-3):
    """Central differences on n random parameters of a float64 model."""
    loss_and_back()                        # populate grads
    params = model.parameters()
    worst = 0.0
    eps = 1e-6
    flat_entries = [(p, i) for p in params for i in
                    rng.choice(p.value.size, size=min(2, p.value.size),
                               replace=False)]
    rng.shuffle(flat_entries)
    for p, i in flat_entries[:n]:
        keep = p.value.reshape(-1)[i]
        p.value.reshape(-1)[i] = keep + eps
        up = loss_and_back(value_only=True)
        p.value.reshape(-1)[i] = keep - eps
        dn = loss_and_back(value_only=True)
        p.value.reshape(-1)[i] = keep
        fd = (up - dn) / (2 * eps)
        an = p.grad.reshape(-1)[i]
        denom = max(abs(fd), abs(an), 1e-8)
        worst = max(worst, abs(fd - an) / denom)
    return worst


def test_c08_gradient_suite():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worsts = {}

    # Every loss term against its gradient companion.
    a, b = rng.normal(size=(3, 4)), rng.normal(size=(3, 4))
    worsts["mse"] = _fd_input_check(lambda x: L.mse(x, b),
                                    lambda x: L.mse_grad(x, b), a.copy(), rng)
    mu, lv = rng.normal(size=(2, 5)), rng.normal(size=(2, 5))
    worsts["kl_mu"] = _fd_input_check(
        lambda m: L.kl_to_unit(m, lv), lambda m: L.kl_to_unit_grad(m, lv)[0],
        mu.copy(), rng)
    worsts["kl_logvar"] = _fd_input_check(
        lambda v: L.kl_to_unit(mu, v), lambda v: L.kl_to_unit_grad(mu, v)[1],
        lv.copy(), rng)
    efx, gex = rng.normal(size=(4, 6)), rng.normal(size=(4, 6))
    worsts["equivariance"] = _fd_input_check(
        lambda e: L.equivariance_value(e, gex),
        lambda e: L.equivariance_grad(e, gex)[0], efx.copy(), rng)
    zz = rng.normal(size=(3, 8))
    lab = rng.normal(size=(3, 4))
    worsts["supervised"] = _fd_input_check(
        lambda z: L.supervised_state_loss(z, lab, (0, 3)),
        lambda z: L.supervised_state_grad(z, lab, (0, 3)), zz.copy(), rng)
    seq = rng.normal(size=(6, 3))
    worsts["smoothness"] = _fd_input_check(
        L.smoothness_loss, L.smoothness_grad, seq.copy(), rng)
    p = rng.normal(size=(5,))
    lo, hi = np.full(5, -0.3), np.full(5, 0.3)
    worsts["interval"] = _fd_input_check(
        lambda q: L.interval_loss(q, lo, hi),
        lambda q: L.interval_grad(q, lo, hi), p.copy(), rng)
    pred, targ = rng.normal(size=(4, 2, 3)), rng.normal(size=(4, 2, 3))
    worsts["prediction"] = _fd_input_check(
        lambda q: L.prediction_loss(q, targ),
        lambda q: L.prediction_grad(q, targ), pred.copy(), rng)
    xs = rng.random((2, 3, 8, 8))
    xh = rng.random((2, 3, 8, 8))
    parts = rng.random((3, 2, 3, 8, 8))
    ptarg = rng.random((3, 2, 3, 8, 8))
    worsts["partitioned"] = _fd_input_check(
        lambda q: L.partitioned_gen_loss(xs, xh, q, ptarg),
        lambda q: L.partitioned_gen_grad(xs, xh, q, ptarg)[1], parts.copy(), rng)

    # Every model variant end to end in float64.
    def vae_check(structured):
        layout = LatentLayout("cartpole", 16)
        vae = VAE.build(layout, 16, np.random.default_rng(2),
                        structured=structured, dtype=np.float64)
        x = np.random.default_rng(3).random((2, 3, 16, 16))

        def run(value_only=False):
            (mu_v, logvar), enc_cache = vae.encoder.forward(x)
            xh, dec_cache = vae.decoder.forward(mu_v)
            loss = L.mse(xh, x) + 0.1 * L.kl_to_unit(mu_v, logvar)
            if not value_only:
                vae.zero_grad()
                dmu_dec = vae.decoder.backward(dec_cache, L.mse_grad(xh, x))
                dmu_kl, dlv = L.kl_to_unit_grad(mu_v, logvar)
                vae.encoder.backward(enc_cache,
                                     (dmu_dec + 0.1 * dmu_kl, 0.1 * dlv))
            return loss
        return vae, run

    for structured in (False, True):
        vae, run = vae_check(structured)
        key = "vae_structured" if structured else "vae_monolithic"
        worsts[key] = _fd_param_check(vae, run, rng)

    pred_model = LatentPredictor(6, np.random.default_rng(4), hidden_dim=8,
                                 num_layers=2, dtype=np.float64)
    zseq = np.random.default_rng(5).normal(size=(5, 2, 6))
    target = np.random.default_rng(6).normal(size=(5, 2, 6))

    def pred_run(value_only=False):
        out, cache = pred_model.forward(zseq)
        loss = L.prediction_loss(out, target)
        if not value_only:
            pred_model.zero_grad()
            pred_model.backward(cache, L.prediction_grad(out, target))
        return loss
    worsts["predictor"] = _fd_param_check(pred_model, pred_run, rng)

    pset = PartitionedDecoderSet("cartpole", 16, np.random.default_rng(7),
                                 channels=4, seed_side=8, dtype=np.float64)
    states = np.random.default_rng(8).normal(size=(2, 4))
    frames = np.random.default_rng(9).random((2, 3, 16, 16))
    ptargets = np.random.default_rng(10).random((3, 2, 3, 16, 16))

    def pset_run(value_only=False):
        (parts_, composed), cache = pset.forward(states)
        loss = L.partitioned_gen_loss(frames, composed, parts_, ptargets)
        if not value_only:
            pset.zero_grad()
            dxh, dparts = L.partitioned_gen_grad(frames, composed, parts_, ptargets)
            pset.backward(cache, (dparts, dxh))
        return loss
    worsts["partitioned_set"] = _fd_param_check(pset, pset_run, rng)

    tiny = TinyAutoencoder("cartpole", 16, np.random.default_rng(11),
                           dtype=np.float64)
    tx = np.random.default_rng(12).random((2, 3, 16, 16))

    def tiny_run(value_only=False):
        xh, cache = tiny.forward(tx)
        loss = L.mse(xh, tx)
        if not value_only:
            tiny.zero_grad()
            tiny.backward(cache, L.mse_grad(xh, tx))
        return loss
    worsts["tiny_autoencoder"] = _fd_param_check(tiny, tiny_run, rng)

    elapsed = time.perf_counter() - t0
    bad = {k: v for k, v in worsts.items() if v > 1e-3}
    _report(8, not bad and elapsed < 300.0,
            f"{len(worsts)} terms/models, worst relative error "
            f"{max(worsts.values()):.2e} (<= 1e-3), {elapsed:.1f}s (< 300s)"
            + (f"; failing: {bad}" if bad else ""))


def test_c09_ibp_soundness_on_trained_decoders(campaign):
    cfg = config_for_arm("cartpole", "p4_partitioned")
    _, models = runner.load_run(campaign / cfg.run_name())
    decoders = models["model"].decoders
    assert len(decoders) == 3

    rng = np.random.default_rng(13)
    small = config_for_arm("cartpole", "p4_partitioned", n_episodes=2)
    dataset = runner.build_dataset(small)
    states = np.concatenate([ep.states_norm() for ep in dataset.episodes])
    centers = states[rng.choice(len(states), size=3, replace=False)]
    boxes = [bench.BoundBox(c - 0.05, c + 0.05) for c in centers]

    violations = 0
    for dec in decoders:
        for box in boxes:
            violations += bench.mc_containment(
                dec, box, n_samples=10_000, rng=np.random.default_rng(14))

    mono_ok = True
    dec = decoders[0]
    for _ in range(100):
        c = rng.uniform(-0.5, 0.5, size=centers.shape[1])
        r1 = rng.uniform(0.01, 0.1)
        r2 = r1 + rng.uniform(0.01, 0.2)
        small = bench.interval_bound_propagate(dec, bench.BoundBox(c - r1, c + r1))
        big = bench.interval_bound_propagate(dec, bench.BoundBox(c - r2, c + r2))
        mono_ok = mono_ok and bool(
            (big.output_lo <= small.output_lo + 1e-12).all()
            and (big.output_hi >= small.output_hi - 1e-12).all())

    _report(9, violations == 0 and mono_ok,
            f"{violations} containment violations over 3 decoders x 3 boxes x "
            f"10^4 samples; widening monotone on 100/100 box pairs: {mono_ok}")


def test_c10_simulator_fidelity():
    rng = np.random.default_rng(15)
    worst = 0.0
    for env in ENVS:
        lo, hi = C.state_box(env)
        for _ in range(500):
            values = rng.uniform(lo, hi)
            if env == "lander":
                values[6:] = 0.0
            state = PhysState(env, values)
            if env == "cartpole":
                act = Action(env, float(rng.choice([-10.0, 0.0, 10.0])))
            else:
                act = Action(env, (float(rng.uniform(0, 1)),
                                   float(rng.uniform(-1, 1))))
            mine = D.step(state, act, 0.02)
            ref = D.reference_step(state, act, 0.02)
            worst = max(worst, float(np.max(np.abs(
                mine.values[:6] - ref.values[:6]))))

    partition_ok = True
    for _ in range(1000):
        env = "cartpole" if rng.random() < 0.5 else "lander"
        lo, hi = C.state_box(env)
        values = rng.uniform(lo, hi)
        if env == "lander":
            values[6:] = 0.0
        obs = render(PhysState(env, values), 32)
        disjoint = not np.any(obs.masks[0] & obs.masks[1]) and \
            not np.any(obs.masks[0] & obs.masks[2]) and \
            not np.any(obs.masks[1] & obs.masks[2])
        covers = bool(obs.masks.any(axis=0).all())
        partition_ok = partition_ok and disjoint and covers

    _report(10, worst <= 1e-3 and partition_ok,
            f"stepper vs RK4 worst per-component error {worst:.2e} (<= 1e-3) "
            f"over 10^3 states; mask partition on 10^3 renders: {partition_ok}")


def test_c11_pipeline_determinism(tmp_path):
    import physwm.data.io as dio
    cfg = config_for_arm("cartpole", "baseline", seed=0,
                         n_episodes=5, episode_len=20, epochs=1, pred_epochs=1,
                         horizons=(1, 2), context=3, val_fraction=0.2)

    results = []
    for trial in ("a", "b"):
        ds = runner.build_dataset(cfg)
        dio.save(ds, tmp_path / f"ds_{trial}")
        run = runner.train_run(cfg, root=tmp_path / f"runs_{trial}", dataset=ds)
        runner.evaluate_run(run)
        hist = [json.loads(line) for line in
                (run / "history.jsonl").read_text().splitlines()]
        pred_hist = [json.loads(line) for line in
                     (run / "pred_history.jsonl").read_text().splitlines()]
        results.append({
            "hash": dio.dataset_hash(tmp_path / f"ds_{trial}"),
            "final": hist[-1]["total"],
            "pred_final": pred_hist[-1]["total"],
        })

    a, b = results
    hash_ok = a["hash"] == b["hash"]
    loss_ok = abs(a["final"] - b["final"]) <= 1e-6 and \
        abs(a["pred_final"] - b["pred_final"]) <= 1e-6
    _report(11, hash_ok and loss_ok,
            f"dataset hashes identical: {hash_ok}; final losses "
            f"{a['final']:.8f} vs {b['final']:.8f} and predictor "
            f"{a['pred_final']:.8f} vs {b['pred_final']:.8f} equal to 1e-6")
