import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hilberg import experiment as ex
from hilberg.errors import ParameterError, ResourceError
from hilberg.exponents import CurveRecord
from hilberg.sampling import ProcessSpec

SF = ProcessSpec.santa_fe(0.5)


def test_simulate_shape_and_bytes(tmp_path):
    cfg = ex.ExperimentConfig(SF, k_min=4, k_max=12, replicates=200, seed=7, out=str(tmp_path / "a.csv"))
    ex.run_simulate(cfg)
    rows = (tmp_path / "a.csv").read_text().splitlines()
    assert rows[0] == ",".join(ex.CURVE_HEADER)
    assert len(rows) == 10
    assert all(r.split(",")[1] == "200" for r in rows[1:])
    cfg2 = ex.ExperimentConfig(SF, k_min=4, k_max=12, replicates=200, seed=7, out=str(tmp_path / "b.csv"), workers=2)
    ex.run_simulate(cfg2)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.paths.csv").read_bytes() == (tmp_path / "b.paths.csv").read_bytes()


def test_simulate_agrees_with_analytic():
    cfg = ex.ExperimentConfig(SF, k_min=4, k_max=12, replicates=200, seed=7)
    curve, _ = ex.run_simulate(cfg)
    ok = [abs(r.mean_mi - r.analytic_mi) <= 3 * math.sqrt(r.var_mi / r.replicates) for r in curve]
    assert sum(ok) >= len(ok) - 1


def test_simulate_mixture_shift():
    cfg = ex.ExperimentConfig(ProcessSpec.mixture(), k_min=2, k_max=8, replicates=50, seed=1)
    curve, paths = ex.run_simulate(cfg)
    B = curve[0].B
    assert B >= 1 and np.all(paths["exact"] + B >= 1)
    assert all(0 < r.harmonic_mean_shifted <= 1 for r in curve)


def test_simulate_with_codec():
    cfg = ex.ExperimentConfig(SF, k_min=2, k_max=7, replicates=5, seed=3, codec="lz78")
    curve, paths = ex.run_simulate(cfg)
    assert {r.source for r in curve} == {"exact", "code:lz78"}
    assert paths["code:lz78"].shape == (5, 6)


@pytest.mark.parametrize("k_min,k_max,reps", [(1, 5, 2), (5, 5, 2), (2, 25, 2), (2, 5, 0)])
def test_config_validation(k_min, k_max, reps):
    with pytest.raises(ParameterError):
        ex.run_simulate(ex.ExperimentConfig(SF, k_min=k_min, k_max=k_max, replicates=reps))


def test_analytic(tmp_path):
    cfg = ex.ExperimentConfig(SF, k_min=0, k_max=10, out=str(tmp_path / "an.csv"))
    curve = ex.run_analytic(cfg)
    assert curve[0].n == 1 and curve[0].analytic_mi == pytest.approx(0.4, abs=1e-10)
    vals = [r.analytic_mi for r in curve]
    assert vals == sorted(vals)
    assert ex.read_curve(tmp_path / "an.csv") == curve


def test_analytic_mixture_limit():
    with pytest.raises(ResourceError):
        ex.run_analytic(ex.ExperimentConfig(ProcessSpec.mixture(), k_min=2, k_max=15))


@given(
    st.lists(
        st.tuples(
            st.integers(0, 24),
            st.floats(-1e6, 1e6, allow_nan=False),
            st.floats(0, 1e9),
            st.floats(1e-9, 1),
            st.one_of(st.none(), st.floats(0, 1e6)),
            st.integers(1, 10**6),
        ),
        max_size=20,
    )
)
@settings(max_examples=50)
def test_csv_round_trip(rows):
    curve = [
        CurveRecord(n=2**k, mean_mi=m, var_mi=v, harmonic_mean_shifted=h, B=1.0, analytic_mi=a, replicates=r)
        for k, m, v, h, a, r in rows
    ]
    assert ex.parse_curve(ex.curve_to_csv(curve)) == curve


def test_parse_errors_name_rows():
    good = ",".join(ex.CURVE_HEADER) + "\n4,1,1.0,0.0,0.5,1.0,,exact\n"
    with pytest.raises(ex.CurveParseError, match="row 3"):
        ex.parse_curve(good + "8,1,abc,0.0,0.5,1.0,,exact\n")
    with pytest.raises(ex.CurveParseError, match="row 3"):
        ex.parse_curve(good + "6,1,1.0,0.0,0.5,1.0,,exact\n")
    with pytest.raises(ex.CurveParseError, match="row 2"):
        ex.parse_curve(",".join(ex.CURVE_HEADER) + "\n4,1,1.0\n")
    with pytest.raises(ex.CurveParseError, match="row 1"):
        ex.parse_curve("n,mean\n")


def test_estimate_embeds_config(tmp_path):
    out = tmp_path / "c.csv"
    ex.run_simulate(ex.ExperimentConfig(SF, k_min=2, k_max=12, replicates=100, seed=5, out=str(out)))
    rep = ex.run_estimate(str(out), out=str(tmp_path / "r.json"))
    d = json.loads((tmp_path / "r.json").read_text())
    assert d["config"]["run"]["config"]["seed"] == 5
    assert d["gamma_plus"] is not None and d["gamma_spread"]["realizations"] == 100
    assert ex.read_report(tmp_path / "r.json") == rep
    assert rep.epsilon_hat < 0.5


def test_estimate_without_sidecar(tmp_path):
    out = tmp_path / "c.csv"
    ex.run_analytic(ex.ExperimentConfig(SF, k_min=2, k_max=12, out=str(out)))
    rep = ex.run_estimate(str(out))
    assert rep.gamma_plus is None
    assert rep.delta_plus == pytest.approx(rep.zeta_plus)


def test_code_mi(tmp_path):
    rnd = tmp_path / "rnd.bin"
    rnd.write_bytes(np.random.default_rng(0).integers(0, 256, 2**14, dtype=np.uint8).tobytes())
    _, rep = ex.run_code_mi(str(rnd), k_min=2, k_max=10, max_windows=8)
    assert rep.fit.model in ("log", "ambiguous")
    _, rep2 = ex.run_code_mi(str(rnd), k_min=2, k_max=10, max_windows=8)
    assert json.dumps(rep.to_dict()) == json.dumps(rep2.to_dict())

    rep_file = tmp_path / "rep.bin"
    rep_file.write_bytes(b"abcd" * 2**12)
    curve, _ = ex.run_code_mi(str(rep_file), k_min=2, k_max=10, max_windows=8)
    assert all(r.mean_mi > 0 for r in curve)


def test_code_mi_short_file(tmp_path):
    f = tmp_path / "s.bin"
    f.write_bytes(b"x" * 100)
    with pytest.raises(ParameterError, match="at least 2048"):
        ex.run_code_mi(str(f), k_min=2, k_max=10)


@pytest.mark.parametrize("seed", range(3))
def test_sandwich_shadow(seed):
    from hilberg.exponents import pointwise_exponents

    curve, paths = ex.run_simulate(ex.ExperimentConfig(SF, k_min=2, k_max=14, replicates=200, seed=seed))
    rep = ex.build_report(curve, paths=paths["exact"])
    assert rep.delta_plus - rep.epsilon_hat - 0.05 <= rep.gamma_plus <= rep.delta_plus + 0.05
    plus, _ = pointwise_exponents(paths["exact"], [r.n for r in curve], rep.k0)
    inside = (plus <= rep.delta_plus + 0.05) & (plus >= rep.delta_plus - rep.epsilon_hat - 0.05)
    assert inside.mean() >= 0.95


@pytest.mark.parametrize("seed", range(3))
def test_code_exponent_dominates(seed):
    curve, _ = ex.run_simulate(ex.ExperimentConfig(SF, k_min=2, k_max=11, replicates=30, seed=seed, codec="lz78"))
    exact = ex.build_report([r for r in curve if r.source == "exact"])
    code = ex.build_report([r for r in curve if r.source == "code:lz78"])
    assert code.delta_plus >= exact.delta_minus - 0.05
