import pytest

from mcsense import config_from_dict, run_trial, sweep_snr
from mcsense.estimator import report_record
from mcsense.harness import write_csv, read_csv
from mcsense.plots import emit_plot

from test_harness import base_config_dict


@pytest.fixture(scope="module")
def rows(tmp_path_factory):
    cfg = config_from_dict(base_config_dict(snr_db_grid=[0.0, 10.0], trials=3))
    out = tmp_path_factory.mktemp("rows") / "m.csv"
    write_csv(sweep_snr(cfg), out)
    return read_csv(out)


@pytest.fixture(scope="module")
def trace_record():
    cfg = config_from_dict(base_config_dict())
    outcome = run_trial(cfg, trial_seed=3, snr_db=10.0)
    return report_record(outcome.nlls, cfg.pattern, cfg.sigma2)


@pytest.mark.parametrize("kind", ["pd-snr", "pf-snr"])
def test_snr_plots_deterministic(rows, kind, tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    emit_plot(rows, kind, a)
    emit_plot(rows, kind, b)
    assert a.read_bytes() == b.read_bytes()
    assert a.stat().st_size > 1000


def test_pd_vs_m_plot(rows, tmp_path):
    out = tmp_path / "m.svg"
    emit_plot(rows, "pd-m", out)
    assert out.exists()


def test_trace_plot(trace_record, tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    emit_plot(trace_record, "trace", a)
    emit_plot(trace_record, "trace", b)
    assert a.read_bytes() == b.read_bytes()
    assert len(trace_record["steps"]) == 6


def test_empty_inputs_rejected(tmp_path):
    with pytest.raises(ValueError, match="empty"):
        emit_plot([], "pd-snr", tmp_path / "x.svg")
    with pytest.raises(ValueError, match="no steps"):
        emit_plot({"steps": [], "pattern": {"p": 10}, "sigma2": 1.0},
                  "trace", tmp_path / "x.svg")


def test_unknown_kind(rows, tmp_path):
    with pytest.raises(ValueError, match="unknown plot kind"):
        emit_plot(rows, "roc", tmp_path / "x.svg")
