import json
import math
import pathlib

import pytest

import irt_interference as irt

DATA = pathlib.Path(__file__).resolve().parents[1] / "data"


def test_version():
    assert irt.__version__ == "0.1.0"


def test_exposure_levels():
    net = irt.build_network(3, [(0, 1)])
    assert irt.exposure_three_level(net, [1, 0, 0]) == [2, 1, 0]
    assert net.size == 3


def test_diff_in_means_undefined_group():
    assert irt.diff_in_means([0, 0, 1], [1.0, 2.0, 4.0], 0, 1) == pytest.approx(2.5)
    assert irt.diff_in_means([0, 0], [1.0, 2.0], 0, 1) is None


def test_design_enumeration_sums_to_one():
    design = irt.Design.complete(5, 2)
    support = design.enumerate()
    assert len(support) == 10
    assert sum(p for _, p in support) == pytest.approx(1.0)
    assert sum(design.sample(3)) == 2


def test_exact_and_monte_carlo_agree():
    net = irt.build_network(6, [(0, 1), (2, 3), (4, 5)])
    design = irt.Design.complete(6, 2)
    contrast = irt.Contrast(net, 0, 1)
    theta = [0.1, 1.3, -0.4, 0.8, 2.0, 0.5]
    z = [1, 0, 0, 0, 1, 0]
    exact = irt.exact_frt_pvalue(design, contrast, theta, z)
    mc = irt.frt_pvalue_mc(design, contrast, theta, z, k=20000, seed=4)
    assert abs(mc["p_hat"] - exact) <= 3 / math.sqrt(20000)


def test_irt_pvalue_with_missing_outcomes():
    net = irt.cluster_network([0, 0, 1, 1, 2, 2, 3, 3])
    design = irt.Design.two_stage([0, 0, 1, 1, 2, 2, 3, 3])
    contrast = irt.Contrast(net, 0, 1)
    z = [1, 0, 0, 0, 0, 1, 0, 0]
    y = [None, 0.4, 1.1, -0.2, 0.3, None, 0.9, 0.0]
    a = irt.irt_pvalue(design, contrast, y, z, {"kind": "nig"}, k=400, seed=9)
    b = irt.irt_pvalue(design, contrast, y, z, {"kind": "nig"}, k=400, seed=9)
    assert a == b
    assert 0.0 <= a["p_hat"] <= 1.0
    assert a["k"] == 400


def test_imputer_beta_binomial_hand_case():
    imp = irt.Imputer.fit({"kind": "beta_binomial", "m": 1}, [1, 0, 1])
    assert imp.pmf(1) == pytest.approx(0.6, abs=1e-12)
    with pytest.raises(irt.IrtError):
        imp.density(0.5)


def test_kernel_fallback_warns():
    imp = irt.Imputer.fit({"kind": "kernel"}, [2.0, 2.0, 2.0])
    assert imp.kind == "empirical"
    assert imp.warning


def test_lr_curve_shape():
    points = irt.lr_expectation_curve("beta_binomial", [100, 1000], 0.5, 5, seed=1)
    assert [p["N"] for p in points] == [100, 1000]
    assert all(p["mean_abs_dev"] >= 0 for p in points)


def test_clustered_study_csv_is_deterministic():
    args = dict(n=24, clusters=6, taus=[0.0], methods=["empirical"], datasets=1, experiments=5, k=50, seed=2)
    first = irt.clustered_study(**args)
    assert first.splitlines()[0] == "scenario,method,tau,rejection_rate,std_error,replications"
    assert first == irt.clustered_study(**args)


def test_run_config_round_trip():
    out = json.loads(irt.run_config(str(DATA / "experiment.json"), seed=3))
    assert out["n"] == 8
    assert out["exposure_counts"] == {"0": 3, "1": 3, "2": 2}
    with pytest.raises(irt.IrtError):
        irt.run_config(str(DATA / "experiment.json"))
    with pytest.raises(irt.IrtError):
        irt.run_config(str(DATA / "bad_contrast.json"))
