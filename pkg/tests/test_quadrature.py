import math

import numpy as np
import pytest

from qutrit_link import quadrature


def test_integrate_splits_at_breakpoints():
    times = np.linspace(0.0, 1.0, 101)
    value = quadrature.integrate(lambda s: float(np.interp(s, times, np.abs(times - 0.5))), 0.0, 1.0,
                                 breakpoints=times)
    assert value == pytest.approx(0.25, abs=1e-12)


def test_reversed_limits_flip_the_sign():
    assert quadrature.integrate(math.cos, math.pi / 2, 0.0) == pytest.approx(-1.0, abs=1e-12)
    assert quadrature.integrate(math.cos, 1.0, 1.0) == 0.0


def test_unresolved_integrand_is_logged_as_warning(caplog):
    with caplog.at_level("WARNING", logger="quadrature"):
        quadrature.integrate(lambda s: math.sin(500.0 * s), 0.0, 1000.0)
    assert "abserr" in caplog.text
