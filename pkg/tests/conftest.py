import random

import pytest


@pytest.fixture
def rng():
    """Seeded generator so every run sees the same draws."""
    return random.Random(42)


def rel_err(got, want) -> float:
    got, want = complex(got), complex(want)
    return abs(got - want) / max(1.0, abs(want))


def assert_close(got, want, tol=1e-10):
    err = rel_err(got, want)
    assert err <= tol, f"got {got}, want {want}, rel err {err:.3e} > {tol:.1e}"
