"""Shared fixtures and random generators for the test suite."""

import random
from fractions import Fraction

import pytest

from berkres import ratmap
from berkres.berktree import TypeIIPoint
from berkres.ratmap import HomogeneousPair, Mobius
from berkres.valfield import FieldConfig


@pytest.fixture
def cfg3():
    return FieldConfig("padic", p=3, e=2)


@pytest.fixture
def cfg5():
    return FieldConfig("padic", p=5, e=1)


@pytest.fixture
def cfg2():
    return FieldConfig("padic", p=2, e=2)


@pytest.fixture
def laurent():
    return FieldConfig("laurent", e=1)


@pytest.fixture
def lox_map(cfg3):
    return ratmap.parse_map("-z*(z-10)/(z-4)", cfg3)


@pytest.fixture
def parabolic_map(cfg2):
    return ratmap.parse_map("(z-2)*(z-1)/z", cfg2)


@pytest.fixture
def acyclic_map(laurent):
    return ratmap.parse_map("s*z*(z-(1+t^2))/(z-(1+t))", laurent)


def rng_for(name):
    return random.Random(f"berkres:{name}")


def random_scalar(cfg, rng, span=6, allow_zero=True):
    """Small random scalar: rational combination of uniformizer powers."""
    while True:
        k = rng.randint(-2, 2) * (1 if cfg.backend == "laurent" else 1)
        num = rng.randint(-span, span)
        den = rng.choice([1, 1, 1, 2, 3])
        base = cfg.from_fraction(Fraction(num, den))
        x = base * cfg.uniformizer_power(rng.randint(0, 2 * cfg.e))
        if rng.random() < 0.4:
            x = x + cfg.from_int(rng.randint(-span, span))
        if allow_zero or not x.is_zero():
            return x


def random_unit(cfg, rng, span=6):
    while True:
        x = random_scalar(cfg, rng, span)
        if x.valuation() == 0:
            return x


def random_quadratic(cfg, rng, span=4):
    """Random degree-2 pair with nonzero resultant."""
    while True:
        coeffs = []
        for _ in range(6):
            c = cfg.from_int(rng.randint(-span, span))
            if rng.random() < 0.35:
                c = c * cfg.uniformizer_power(rng.randint(1, 2 * cfg.e))
            coeffs.append(c)
        f, g = coeffs[:3], coeffs[3:]
        if all(c.is_zero() for c in f) or all(c.is_zero() for c in g):
            continue
        try:
            return HomogeneousPair(f, g, cfg, check=True)
        except Exception:
            continue


def random_point(cfg, rng, span=4):
    center = cfg.from_int(rng.randint(-span, span))
    if rng.random() < 0.3:
        center = center + cfg.uniformizer_power(1)
    texp = Fraction(rng.randint(-2 * cfg.e, 2 * cfg.e), cfg.e)
    return TypeIIPoint(cfg, center, texp)


def random_mobius(cfg, rng, span=4):
    while True:
        a, b, c, d = (random_scalar(cfg, rng, span) for _ in range(4))
        try:
            return Mobius(a, b, c, d)
        except Exception:
            continue
