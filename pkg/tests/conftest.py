from functools import lru_cache

import pytest
from hypothesis import settings

from obstructio.barth import FAMILIES, assemble_presentation, even_set_ideal, extract_quartic, sample_section
from obstructio.certify import run_pipeline
from obstructio.quadric import standard_quadric

settings.register_profile("default", deadline=None, max_examples=25)
settings.load_profile("default")

P = 31991


@lru_cache(maxsize=None)
def quadric(p=P):
    return standard_quadric(p)


@lru_cache(maxsize=None)
def pipeline(tag, seed=0):
    return run_pipeline(tag, P, seed, ctx=quadric())


@lru_cache(maxsize=None)
def surface(tag, seed=0):
    """(section, presentation, quartic, even set) for a family at a seed."""
    ctx = quadric()
    section = sample_section(FAMILIES[tag], ctx, seed)
    pres = assemble_presentation(section)
    f = extract_quartic(pres, ctx, seed=seed)
    w = even_set_ideal(pres, ctx, seed=seed)
    return section, pres, f, w


@pytest.fixture(scope="session")
def ctx():
    return quadric()


@pytest.fixture(scope="session")
def ring(ctx):
    return ctx.ring
