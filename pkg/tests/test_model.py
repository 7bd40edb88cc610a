import math
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from throughputlab.model import (
    CalibrationError,
    CostModel,
    Prediction,
    Regime,
    WorkloadParams,
    crossover_mcs,
    crossover_treiber,
    discontinuity_mcs,
    fit_alpha,
    predict_mcs,
    predict_treiber,
)

models = st.builds(
    CostModel,
    alpha=st.floats(min_value=0.001, max_value=1000.0, allow_nan=False),
    W=st.integers(1, 100),
    Ri=st.integers(1, 100),
    M=st.integers(1, 100),
    X=st.integers(0, 100),
)


class TestPredictMcs:
    def test_saturated_substitution(self):
        m = CostModel(alpha=1, W=10, Ri=50)
        p = predict_mcs(m, WorkloadParams(N=15, C=100, P=0))
        assert p.regime is Regime.SATURATED
        assert p.throughput == pytest.approx(1 / 220, rel=1e-12)

    def test_single_worker_forces_thread_bound(self):
        m = CostModel(alpha=1, W=1, Ri=1)
        p = predict_mcs(m, WorkloadParams(N=1, C=10, P=10))
        assert p.regime is Regime.THREAD_BOUND
        assert p.throughput == pytest.approx(1 / 24, rel=1e-12)

    def test_thread_bound_substitution(self):
        m = CostModel(alpha=1, W=1, Ri=1)
        p = predict_mcs(m, WorkloadParams(N=2, C=0, P=1000))
        assert p.regime is Regime.THREAD_BOUND
        assert p.throughput == pytest.approx(2 / 1004, rel=1e-12)

    def test_rejects_zero_workers(self):
        with pytest.raises(ValueError, match="N"):
            predict_mcs(CostModel(), WorkloadParams(N=0))

    def test_rejects_non_positive_alpha(self):
        with pytest.raises(ValueError, match="alpha"):
            CostModel(alpha=0.0)
        with pytest.raises(ValueError, match="alpha"):
            CostModel(alpha=-2.0)

    def test_tie_goes_to_saturated(self):
        # boundary P with the <= condition: still the first branch
        m = CostModel(alpha=1, W=2, Ri=3)
        N, C = 4, 5
        p_star = crossover_mcs(m, C, N)
        assert predict_mcs(m, WorkloadParams(N=N, C=C, P=p_star)).regime is Regime.SATURATED
        assert predict_mcs(m, WorkloadParams(N=N, C=C, P=p_star + 1)).regime is Regime.THREAD_BOUND


class TestPredictTreiber:
    def test_saturated_substitution(self):
        p = predict_treiber(CostModel(alpha=1, M=5, W=10), WorkloadParams(N=8, P=0))
        assert p.regime is Regime.SATURATED
        assert p.throughput == pytest.approx(1 / 15, rel=1e-12)

    def test_thread_bound_substitution(self):
        p = predict_treiber(CostModel(alpha=1, M=5, W=10), WorkloadParams(N=2, P=100))
        assert p.regime is Regime.THREAD_BOUND
        assert p.throughput == pytest.approx(2 / 115, rel=1e-12)

    def test_branches_agree_at_boundary(self):
        m = CostModel(alpha=1, M=5, W=10)
        p = predict_treiber(m, WorkloadParams(N=8, P=105))
        assert p.regime is Regime.SATURATED
        assert p.throughput == pytest.approx(1 / 15, rel=1e-12)
        other = m.alpha * 8 / (105 + 15)
        assert p.throughput == pytest.approx(other, rel=1e-12)


class TestCrossover:
    def test_mcs_values(self):
        assert crossover_mcs(CostModel(W=10, Ri=50), C=100, N=15) == 2370
        assert crossover_mcs(CostModel(W=1, Ri=1), C=0, N=1) == -1
        assert crossover_mcs(CostModel(W=10, Ri=50), C=100, N=2) == 160

    def test_treiber_values(self):
        assert crossover_treiber(CostModel(M=5, W=10), N=8) == 105
        assert crossover_treiber(CostModel(M=5, W=10), N=1) == 0
        assert crossover_treiber(CostModel(M=1, W=1), N=16) == 30

    def test_rejects_bad_n(self):
        with pytest.raises(ValueError):
            crossover_mcs(CostModel(), C=0, N=0)


def test_discontinuity_is_positive_and_matches_branches():
    m = CostModel(W=1, Ri=50)
    jump = discontinuity_mcs(m, C=0, N=4)
    # thread-bound branch exceeds the saturated one by Ri/(2W+C+Ri)
    assert jump == pytest.approx(50 / 52, rel=1e-12)
    assert discontinuity_mcs(m, C=0, N=1) == 0.0


@given(models, st.integers(2, 64))
@settings(max_examples=200)
def test_treiber_continuity_at_crossover(model, N):
    p_star = crossover_treiber(model, N)
    sat = predict_treiber(model, WorkloadParams(N=N, P=p_star)).throughput
    tb = model.alpha * N / (p_star + model.M + model.W)
    assert math.isclose(sat, tb, rel_tol=1e-12)


@given(models, st.integers(1, 32), st.integers(0, 500), st.integers(0, 500), st.integers(0, 500))
def test_mcs_monotone_in_p_and_c(model, N, C, P, delta):
    w = WorkloadParams(N=N, C=C, P=P)
    base = predict_mcs(model, w).throughput
    assert predict_mcs(model, WorkloadParams(N=N, C=C, P=P + delta)).throughput <= base + 1e-15
    assert predict_mcs(model, WorkloadParams(N=N, C=C + delta, P=P)).throughput <= base + 1e-15


@given(models, st.integers(1, 32), st.integers(0, 500), st.integers(0, 500))
def test_treiber_monotone_in_p(model, N, P, delta):
    base = predict_treiber(model, WorkloadParams(N=N, P=P)).throughput
    assert predict_treiber(model, WorkloadParams(N=N, P=P + delta)).throughput <= base + 1e-15


@given(models, st.integers(2, 64), st.integers(2, 64), st.integers(0, 100))
def test_saturated_branch_ignores_n_and_p(model, n1, n2, C):
    # pick P values inside both saturated regions
    p1 = predict_mcs(model, WorkloadParams(N=n1, C=C, P=0))
    p2 = predict_mcs(model, WorkloadParams(N=n2, C=C, P=min(crossover_mcs(model, C, n2), 50)))
    assert p1.regime is Regime.SATURATED and p2.regime is Regime.SATURATED
    assert p1.throughput == p2.throughput  # exact equality required
    t1 = predict_treiber(model, WorkloadParams(N=n1, P=0))
    t2 = predict_treiber(model, WorkloadParams(N=n2, P=0))
    assert t1.throughput == t2.throughput


@given(models, st.integers(1, 63), st.integers(0, 100), st.integers(0, 100))
def test_thread_bound_scales_with_n(model, N, C, P_extra):
    # force the second branch by exceeding the larger crossover
    P = max(crossover_mcs(model, C, N + 1), 0) + 1 + P_extra
    lo = predict_mcs(model, WorkloadParams(N=N, C=C, P=P))
    hi = predict_mcs(model, WorkloadParams(N=N + 1, C=C, P=P))
    assert lo.regime is Regime.THREAD_BOUND and hi.regime is Regime.THREAD_BOUND
    assert hi.throughput > lo.throughput


@given(models, st.floats(min_value=0.001, max_value=1e6), st.integers(1, 64), st.integers(0, 1000), st.integers(0, 1000))
def test_alpha_linearity_exact(model, a, N, C, P):
    w = WorkloadParams(N=N, C=C, P=P)
    unit = replace(model, alpha=1.0)
    scaled = replace(model, alpha=a)
    assert predict_mcs(scaled, w).throughput == a * predict_mcs(unit, w).throughput
    assert predict_treiber(scaled, w).throughput == a * predict_treiber(unit, w).throughput


class _Rec:
    def __init__(self, N, C, P, throughput):
        self.N, self.C, self.P = N, C, P
        self.throughput_ops_s = throughput


class TestFitAlpha:
    def test_round_trip_identity(self):
        truth = CostModel(alpha=3.0, W=10, Ri=50)
        recs = [
            _Rec(N, C, P, predict_mcs(truth, WorkloadParams(N=N, C=C, P=P)).throughput)
            for N in (2, 4, 8, 15)
            for C in (0, 100)
            for P in (0, 10)
        ]
        fitted = fit_alpha(recs, CostModel(alpha=1.0, W=10, Ri=50), "mcs")
        assert fitted.alpha == pytest.approx(3.0, abs=1e-9)
        assert (fitted.W, fitted.Ri) == (10, 50)

    def test_one_point_fit(self):
        base = predict_treiber(CostModel(alpha=1, M=5, W=10), WorkloadParams(N=8, P=0)).throughput
        fitted = fit_alpha([_Rec(8, 0, 0, 2 * base)], CostModel(alpha=1, M=5, W=10), "treiber")
        assert fitted.alpha == pytest.approx(2.0, rel=1e-12)

    def test_no_records_raises(self):
        with pytest.raises(CalibrationError):
            fit_alpha([], CostModel(), "mcs")

    def test_unknown_kind_raises(self):
        with pytest.raises(ValueError, match="kind"):
            fit_alpha([_Rec(1, 0, 0, 1.0)], CostModel(), "stack")

    def test_nonpositive_measurements_raise(self):
        with pytest.raises(CalibrationError):
            fit_alpha([_Rec(2, 0, 0, -5.0)], CostModel(), "treiber")
