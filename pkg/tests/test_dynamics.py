import csv
import math

import numpy as np
import pytest

from sasakian_euler import families as Fam
from sasakian_euler.dynamics import BOUNDARY_STOP, integrate_flowline, vortex_line
from sasakian_euler.frames import FrameField, s3_frame


def test_xi_flowline_rotates_both_angles():
    xi = FrameField(s3_frame(), lambda fp: (1.0, 0.0, 0.0))
    tr = integrate_flowline(xi, (0.6, 0.0, 0.0), 0.01, 100)
    assert tr.steps == 100 and tr.status == "ok"
    s, p1, p2 = tr.points[-1]
    assert s == pytest.approx(0.6, abs=1e-13)
    assert p1 == pytest.approx(1.0, abs=1e-12) and p2 == pytest.approx(1.0, abs=1e-12)


def test_bernoulli_drift_small():
    tr = integrate_flowline(Fam.two_killing(1.0, 2.0), (0.6, 0.4, 1.3), 1e-2, 300)
    assert tr.drift("b") < 1e-6 and tr.drift("u2") < 1.0


def test_kkps_speed_conserved():
    tr = integrate_flowline(Fam.kkps("x", "1-x"), (0.6, 0.4, 1.3), 1e-2, 200)
    assert tr.drift("u2") < 1e-12


def test_zero_steps_and_bad_arguments():
    tr = integrate_flowline(Fam.kkps("1", "0"), (0.6, 0.4, 1.3), 1e-3, 0)
    assert len(tr) == 1 and tr.steps == 0
    with pytest.raises(ValueError):
        integrate_flowline(Fam.kkps("1", "0"), (0.6, 0.4, 1.3), -1.0, 10)
    with pytest.raises(ValueError):
        integrate_flowline(Fam.kkps("1", "0"), (0.001, 0.4, 1.3), 1e-3, 10)


def test_boundary_stop():
    # field pushing s towards the pole
    u = FrameField(s3_frame(), lambda fp: (0.0, 1.0, 0.0))
    tr = integrate_flowline(u, (0.6, 0.0, 0.0), 0.05, 1000)
    assert tr.status == BOUNDARY_STOP and tr.steps < 1000


def test_vortex_line_of_beltrami_is_streamline():
    desc = Fam.kkps("1", "0")
    a = integrate_flowline(desc, (0.6, 0.4, 1.3), 1e-2, 50)
    b = vortex_line(desc, (0.6, 0.4, 1.3), 0.5e-2, 50)
    assert np.allclose(a.points[50], b.points[50], atol=1e-12)  # curl u = 2u


def test_periodic_wrap_on_nil(tmp_path):
    desc = Fam.ansatz_example("nil", "1", "x")
    tr = integrate_flowline(desc, (0.3, 0.4, 0.9), 0.05, 40)
    arr = np.array(tr.points)
    assert np.all((arr >= 0) & (arr < 1))
    out = tmp_path / "line.csv"
    tr.write_csv(out)
    rows = list(csv.reader(open(out)))
    assert rows[0] == ["t", "x", "y", "z", "b", "u2"] and len(rows) == len(tr) + 1
