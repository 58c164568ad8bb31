import numpy as np
import pytest

from _oracles import exact_gbm
from dpsde import validate
from dpsde.driver import generate_increments, make_grid
from dpsde.errors import DegenerateFit, DelayNotAligned, DelayTooFine
from dpsde.experiments import (
    StudySpec,
    compare_schemes,
    default_study,
    moment_scan,
    path_sup_gaps,
    rate_fit,
    run_convergence,
    strong_error,
)
from dpsde.scheme import simulate_old_batch


def small_spec(**kw):
    base = dict(
        model_id="affine",
        params=validate(0.6, -1.0, 0.0, 1.0),
        n_list=(8, 16, 32),
        p_list=(2.0,),
        paths=40,
        grid=make_grid(256, 1.0),
        master_seed=7,
        scheme="new",
    )
    base.update(kw)
    return StudySpec(**base)


def test_spec_enforces_resolution_rule():
    with pytest.raises(DelayTooFine):
        small_spec(n_list=(8, 64))  # 64 leaves only 4 steps per delay on L=256


def test_spec_enforces_alignment():
    with pytest.raises(DelayNotAligned):
        small_spec(n_list=(3,))


def test_spec_rejects_bad_p_and_paths():
    with pytest.raises(ValueError):
        small_spec(p_list=(0.5,))
    with pytest.raises(ValueError):
        small_spec(paths=0)
    with pytest.raises(ValueError):
        small_spec(scheme="euler")


def test_strong_error_zero_for_degenerate_dynamics():
    # x0 = 0 with coefficients vanishing at 0: scheme and reference are both
    # identically zero, the self-comparison limit of the estimator
    spec = small_spec(model_id="gbm")
    est, se = strong_error(spec, 8, 2.0)
    assert est == 0.0 and se == 0.0


def test_strong_error_requires_listed_n():
    with pytest.raises(ValueError):
        strong_error(small_spec(), 64, 2.0)


def test_degenerate_coupling_estimates_are_float_noise():
    # b=0, sigma=1, beta=0: the delay cancels exactly, so the estimates sit
    # at the rounding floor for every n instead of showing n-decay
    spec = small_spec(
        model_id="zero-drift-unit-diffusion",
        params=validate(0.5, 0.0, 0.0, 1.0),
        n_list=(8, 16, 32),
        paths=100,
    )
    for n in (8, 16, 32):
        est, _ = strong_error(spec, n, 2.0)
        assert est <= 1e-24


def test_delayed_euler_against_exact_gbm():
    # alpha = beta = 0 reduces the plain delayed scheme to delayed Euler; its
    # error against the closed-form path must drop as the delay shrinks
    grid = make_grid(1024, 1.0)
    params = validate(0.0, 0.0, 1.0, 1.0)
    from dpsde.models import get_model

    model = get_model("gbm")
    dw = np.stack([generate_increments(3, i, grid) for i in range(200)])
    gaps = {}
    for n in (8, 64):
        xn = simulate_old_batch(model, params, grid, n, dw)[3]
        exact = np.stack([exact_gbm(1.0, 0.05, 0.2, grid, dw[i]) for i in range(200)])
        gaps[n] = float(np.mean(np.max(np.abs(xn - exact), axis=1)))
    assert gaps[64] < gaps[8]


def test_strong_error_decreases_for_delayed_gbm():
    spec = small_spec(model_id="gbm", params=validate(0.0, 0.0, 1.0, 1.0), scheme="old", paths=200)
    estimates = [strong_error(spec, n, 2.0)[0] for n in (8, 16, 32)]
    assert estimates[0] > estimates[1] > estimates[2]


def test_rate_fit_exact_geometric_decay():
    slope, intercept = rate_fit([(8, 0.1), (16, 0.05), (32, 0.025)])
    assert slope == pytest.approx(-1.0, abs=1e-12)
    assert intercept == pytest.approx(np.log2(0.1) + 3.0, abs=1e-12)


def test_rate_fit_flat():
    slope, _ = rate_fit([(8, 0.3), (16, 0.3), (32, 0.3)])
    assert slope == pytest.approx(0.0, abs=1e-12)


def test_rate_fit_degenerate_inputs():
    with pytest.raises(DegenerateFit):
        rate_fit([(8, 0.1)])
    with pytest.raises(DegenerateFit):
        rate_fit([(8, 0.1), (16, 0.0), (32, 0.025)])
    with pytest.raises(DegenerateFit):
        rate_fit([(8, 0.1), (8, 0.2), (8, 0.3)])


def test_moment_scan_zero_model():
    spec = small_spec(model_id="gbm")  # x0 = 0 keeps every path at zero
    rows = moment_scan(spec)
    assert all(r.estimate == 0.0 for r in rows)


def test_moment_scan_deterministic_drift():
    # b = 1, sigma = 0, no perturbation: X_t = t, sup over [0,1] is 1
    spec = small_spec(
        model_id="unit-drift-no-noise",
        params=validate(0.0, 0.0, 0.0, 1.0),
        p_list=(1.0,),
        paths=3,
    )
    rows = moment_scan(spec)
    for r in rows:
        assert r.estimate == pytest.approx(1.0, rel=1e-12)


def test_moment_scan_bounded_in_n():
    spec = small_spec(
        model_id="affine",
        grid=make_grid(1024, 1.0),
        n_list=(8, 16, 32, 64, 128),
        p_list=(2.0, 4.0),
        paths=300,
    )
    rows = moment_scan(spec)
    for p in (2.0, 4.0):
        vals = [r.estimate for r in rows if r.p == p]
        assert max(vals) / min(vals) < 2.0


def test_jensen_consistency_between_moments():
    spec = small_spec(p_list=(2.0, 4.0), paths=150)
    gaps = path_sup_gaps(spec, 8)
    e2 = float(np.mean(gaps**2.0))
    e4 = float(np.mean(gaps**4.0))
    assert e4 ** (1.0 / 4.0) >= e2 ** (1.0 / 2.0) - 1e-12


def test_std_err_scales_with_paths():
    se_small = strong_error(small_spec(paths=300), 8, 2.0)[1]
    se_large = strong_error(small_spec(paths=1200), 8, 2.0)[1]
    ratio = se_small / se_large
    assert 1.4 < ratio < 2.9  # 4x paths should halve the standard error


def test_run_convergence_report_shape_and_fit():
    spec = small_spec(paths=200, p_list=(2.0, 4.0))
    report = run_convergence(spec)
    assert len(report.errors) == 6  # 3 n times 2 p
    assert {f.p for f in report.fits} == {2.0, 4.0}
    est = {(e.n, e.p): e.estimate for e in report.errors}
    assert est[(8, 2.0)] > est[(32, 2.0)]


def test_compare_schemes_identical_without_perturbation():
    spec = small_spec(params=validate(0.0, 0.0, 0.0, 1.0), model_id="affine", paths=60)
    cmp = compare_schemes(spec)
    for e_new, e_old in zip(cmp.new.errors, cmp.old.errors):
        assert e_new.estimate == e_old.estimate
        assert e_new.std_err == e_old.std_err


def test_compare_schemes_beyond_mao_reports_both():
    cmp = compare_schemes(small_spec(paths=80))
    new_est = [e.estimate for e in cmp.new.errors]
    assert new_est[0] > new_est[-1]  # new scheme error drops with n
    assert len(cmp.old.errors) == len(new_est)  # old column reported as observed


def test_compare_schemes_large_negative_pair():
    cmp = compare_schemes(small_spec(params=validate(-3.0, -3.0, 0.0, 1.0), paths=80))
    new_est = [e.estimate for e in cmp.new.errors]
    assert all(np.isfinite(v) for v in new_est)
    assert new_est[0] > new_est[-1]
    assert all(np.isfinite(e.estimate) for e in cmp.old.errors)


def test_bitwise_deterministic_and_worker_invariant():
    spec = small_spec(paths=530)  # forces several unequal chunks
    a = run_convergence(spec, workers=1)
    b = run_convergence(spec, workers=1)
    c = run_convergence(spec, workers=4)
    for x, y in ((a, b), (a, c)):
        for e_x, e_y in zip(x.errors, y.errors):
            assert (e_x.estimate, e_x.std_err) == (e_y.estimate, e_y.std_err)
        for f_x, f_y in zip(x.fits, y.fits):
            assert (f_x.slope, f_x.intercept) == (f_y.slope, f_y.intercept)


def test_default_study_matches_documented_defaults():
    spec = default_study()
    assert spec.model_id == "affine"
    assert (spec.params.alpha, spec.params.beta) == (0.6, -1.0)
    assert spec.n_list == (8, 16, 32, 64)
    assert spec.p_list == (2.0, 4.0)
    assert spec.paths == 2000
    assert spec.grid.steps == 4096
    assert spec.master_seed == 42
