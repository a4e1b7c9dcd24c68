import math

import pytest

from jackvar.errors import QuadratureFailure
from jackvar.quadrature import adaptive_simpson


@pytest.mark.parametrize("f,a,b,exact", [
    (math.sin, 0.0, math.pi, 2.0),
    (math.exp, -1.0, 2.0, math.e ** 2 - math.e ** -1),
    (lambda x: x ** 3, 0.0, 1.0, 0.25),
    (lambda x: math.sqrt(abs(x)), -1.0, 1.0, 4.0 / 3.0),
])
def test_known_integrals(f, a, b, exact):
    assert adaptive_simpson(f, a, b, tol=1e-10) == pytest.approx(exact, abs=1e-9)


def test_reversed_and_empty():
    assert adaptive_simpson(math.cos, 1.0, 0.0) == pytest.approx(-math.sin(1.0), abs=1e-10)
    assert adaptive_simpson(math.cos, 0.3, 0.3) == 0.0


def test_failure_is_reported():
    with pytest.raises(QuadratureFailure):
        adaptive_simpson(lambda x: math.sin(1.0 / x) if x else 0.0, 0.0, 1.0, tol=1e-14, max_depth=5)
