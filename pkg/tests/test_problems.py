import numpy as np
import pytest

from molreg.errors import DomainError
from molreg.forward import Conductivity, apply_forward
from molreg.grid import Grid2D, RealField
from molreg.problems import (
    custom_problem,
    exact_pair,
    get_problem,
    make_exact_data,
    make_initial,
    shepp_logan,
)


class TestCatalogue:
    @pytest.mark.parametrize("eid,tau,Gamma", [(1, 1.0, 0.2), (2, 1.0, 0.15), (3, 1.0, 0.1), (4, 0.5, 0.1)])
    def test_parameters(self, eid, tau, Gamma):
        p = get_problem(eid)
        assert p.tau == tau
        assert p.Gamma == pytest.approx(Gamma)

    @pytest.mark.parametrize("bad", [0, 5, "x", None])
    def test_unknown(self, bad):
        with pytest.raises(DomainError):
            get_problem(bad)

    def test_initial_states(self):
        g = Grid2D(64, 10.0)
        x1, x2 = g.mesh()
        np.testing.assert_allclose(make_initial(get_problem(1), g).values, np.exp(-x1 ** 2 - x2 ** 2))
        tri = make_initial(get_problem(2), g).values
        assert tri.max() <= 1.0 and tri.min() == 0.0
        assert np.all(tri[np.abs(x1) > 3] == 0)
        box = make_initial(get_problem(3), g).values
        assert set(np.unique(box)) == {0.0, 1.0}
        assert box.sum() * g.kappa ** 2 == pytest.approx(100.0)

    def test_exact_pair_cached_and_consistent(self):
        g = Grid2D(32, 10.0)
        u0, gdata = exact_pair(2, g)
        assert exact_pair(2, g)[1] is gdata
        np.testing.assert_array_equal(apply_forward(get_problem(2).symbol, u0).values, gdata.values)
        np.testing.assert_array_equal(make_exact_data(get_problem(2), g).values, gdata.values)


class TestPhantom:
    def test_range_and_symmetry(self):
        x = np.linspace(-1, 1, 101)
        x1, x2 = np.meshgrid(x, x, indexing="ij")
        img = shepp_logan(x1, x2)
        assert img.min() == 0.0 and img.max() == 1.0
        # outer skull has intensity 1, brain interior 0.02
        assert shepp_logan(0.0, 0.9) == pytest.approx(1.0)
        assert shepp_logan(0.0, 0.0) == pytest.approx(0.02, abs=1e-12)

    def test_scaled_window(self):
        assert shepp_logan(0.0, 9.0, 10.0) == shepp_logan(0.0, 0.9)


class TestCustom:
    def test_custom_round_trip(self):
        g = Grid2D(16, 2.0)
        u0 = RealField(g, np.arange(256.0).reshape(16, 16) / 256)
        p = custom_problem(u0, 0.7, Conductivity.constant(0.05))
        assert p.id == 0
        np.testing.assert_array_equal(make_initial(p, g).values, u0.values)
        with pytest.raises(DomainError):
            make_initial(p, Grid2D(8, 2.0))
