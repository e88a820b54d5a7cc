import numpy as np
import pytest

from infserv import files
from infserv.repair import fit_scenario_from_log


def poisson_log(rng, lam, weeks, q=0.3, p=0.9):
    n = rng.poisson(lam * weeks)
    times = np.sort(rng.uniform(0.0, weeks, n))
    station = rng.random(n) < q
    transported = station & (rng.random(n) < p)
    return [(t, "station" if s else "base", bool(tr)) for t, s, tr in zip(times, station, transported)]


def test_evenly_spaced_log():
    times = np.linspace(0.0, 52.0, 52)
    fit = fit_scenario_from_log([(t, "base", False) for t in times])
    assert fit.lam == pytest.approx(1.0)
    assert fit.q == 0.0
    assert fit.p is None
    assert fit.poisson.dispersion_index == pytest.approx(0.0, abs=1e-12)
    assert fit.poisson.df == fit.poisson.bins - 1


def test_poisson_log_is_not_overdispersed():
    rng = np.random.default_rng(5)
    fit = fit_scenario_from_log(poisson_log(rng, 0.25, 10_000))
    assert fit.lam == pytest.approx(0.25, rel=0.05)
    assert 0.9 <= fit.poisson.dispersion_index <= 1.1
    assert fit.q == pytest.approx(0.3, abs=0.03)
    assert fit.p == pytest.approx(0.9, abs=0.03)
    pc = fit.poisson
    assert pc.chi2 == pytest.approx(pc.df * pc.dispersion_index, rel=1e-12)


def test_clustered_log_is_overdispersed():
    rng = np.random.default_rng(6)
    bursts = np.sort(rng.uniform(0, 2000, 100))
    times = np.sort(np.concatenate([b + rng.uniform(0, 0.5, 5) for b in bursts]))
    fit = fit_scenario_from_log([(t, "base", False) for t in times])
    assert fit.poisson.dispersion_index > 2


def test_degenerate_logs():
    with pytest.raises(ValueError):
        fit_scenario_from_log([(1.0, "base", False)])
    with pytest.raises(ValueError):
        fit_scenario_from_log([(1.0, "base", False), (1.0, "station", True)])
    with pytest.raises(ValueError):
        fit_scenario_from_log([(2.0, "base", False), (1.0, "base", False)])


def test_log_file_round_trip(tmp_path):
    rng = np.random.default_rng(7)
    events = poisson_log(rng, 0.25, 200)
    path = tmp_path / "log.csv"
    files.write_failure_log(path, events)
    assert files.read_failure_log(path) == events


def test_log_file_diagnostics(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("timestamp_weeks,site,transported\n1.0,base,false\nxx,base,false\n2.0,depot,true\n3.0,station\n")
    with pytest.raises(files.InputError) as err:
        files.read_failure_log(path)
    msg = str(err.value)
    assert "line 3: bad timestamp" in msg
    assert "line 4: site must be base or station" in msg
    assert "line 5: expected 3 fields" in msg
    bad_header = tmp_path / "hdr.csv"
    bad_header.write_text("time,site,transported\n")
    with pytest.raises(files.InputError, match="line 1"):
        files.read_failure_log(bad_header)
