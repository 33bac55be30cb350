import io
import json

import pytest

from corrflow import ScenarioError
from corrflow.report import dumps_json
from corrflow.sweep import (
    SWEEP_FIELDS,
    emit_sweep_csv,
    evaluate_point,
    load_family,
    parse_family,
    run_sweep,
)

from test_report import ROOT

FAMILY = """
name = small
[family]
sigma = 0.5, 2, 3
chirp = -1, 1, 3
[schedule]
t_end = 1
n_samples = 11
"""


@pytest.fixture(scope="module")
def arrow():
    return run_sweep(load_family(ROOT / "scenarios" / "families" / "arrow.fam"), jobs=1)


class TestParseFamily:
    def test_ranges(self):
        family = parse_family(FAMILY)
        assert family.sigma == (0.5, 1.25, 2.0)
        assert family.chirp == (-1.0, 0.0, 1.0)
        assert family.p0 == (0.0,) and family.x0 == (0.0,)
        assert len(list(family.specs())) == 9

    @pytest.mark.parametrize("line,fragment", [
        ("sigma = 1, 2", "start, stop, count"),
        ("sigma = 1, 2, 0", "count must be >= 1"),
        ("sigma = -1", "sigma values must all be > 0"),
        ("chirp = nan", "finite"),
        ("spin = 1", "unknown key"),
    ])
    def test_errors(self, line, fragment):
        text = f"name = bad\n[family]\n{line}\n[schedule]\nt_end = 1\nn_samples = 3\n"
        with pytest.raises(ScenarioError) as info:
            parse_family(text)
        assert fragment in str(info.value)
        assert info.value.errors[0].line == 3


class TestSweep:
    def test_hundred_points_no_violations(self, arrow):
        assert len(arrow.points) == 100
        assert len(arrow.evaluated) == 100
        assert arrow.violations == 0
        assert arrow.global_min_delta_c >= -1e-9
        assert arrow.global_min_slope > 0

    def test_min_slope_is_twice_energy(self, arrow):
        # dC/dt = 2 <H> = var_p for a centred Gaussian
        for point in arrow.points:
            expected = 1 / (4 * point.sigma**2) + 4 * point.chirp**2 * point.sigma**2
            assert point.min_slope == pytest.approx(expected, rel=1e-9)

    def test_jobs_do_not_change_output(self):
        family = parse_family(FAMILY)
        serial, parallel = run_sweep(family, jobs=1), run_sweep(family, jobs=4)
        a, b = io.StringIO(), io.StringIO()
        emit_sweep_csv(serial, a)
        emit_sweep_csv(parallel, b)
        assert a.getvalue() == b.getvalue()
        assert dumps_json(serial.to_dict()) == dumps_json(parallel.to_dict())

    def test_csv_layout(self):
        out = io.StringIO()
        emit_sweep_csv(run_sweep(parse_family(FAMILY)), out)
        lines = out.getvalue().splitlines()
        assert lines[0] == ",".join(SWEEP_FIELDS)
        assert len(lines) == 10
        assert all(line.split(",")[5] == "ok" for line in lines[1:])

    def test_summary_is_json(self):
        data = json.loads(dumps_json(run_sweep(parse_family(FAMILY)).to_dict()))
        assert data["points"] == 9 and data["violations"] == 0
        assert "wall_time" not in json.dumps(data)

    def test_nyquist_point_skipped(self):
        # k_max = pi / dx ~ 20 on this grid; p0 = 19 puts mass at the edge
        family = parse_family(
            "name = edge\n[family]\nsigma = 1\np0 = 0, 19, 2\n"
            "[grid]\nn = 256\nx_min = -20\nx_max = 20\n[schedule]\nt_end = 0.1\nn_samples = 3\n"
        )
        summary = run_sweep(family)
        assert [p.status for p in summary.points] == ["ok", "skipped"]
        assert "Nyquist" in summary.skipped[0].reason
        assert summary.to_dict()["skipped"][0]["reason"]

    def test_leak_point_skipped(self):
        family = parse_family(FAMILY + "[grid]\nn = 128\nx_min = -4\nx_max = 4\n")
        point = evaluate_point(family, 0, 0.0, 2.0, 0.0, 0.0)
        assert point.status == "skipped"
        assert "leak" in point.reason

    def test_rejects_bad_jobs(self):
        with pytest.raises(ValueError):
            run_sweep(parse_family(FAMILY), jobs=0)
