import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from misalloc.corpus import load_corpus_problem
from misalloc.densities import TruncatedGaussian, UniformDensity
from misalloc.problems import MisProblem


@pytest.fixture(scope="session")
def fig2():
    return load_corpus_problem("fig2_asymmetric")


@pytest.fixture(scope="session")
def symmetric():
    return load_corpus_problem("symmetric")


@pytest.fixture(scope="session")
def three_techniques():
    return load_corpus_problem("three_techniques")


@pytest.fixture(scope="session")
def perfect_sampler():
    return load_corpus_problem("perfect_sampler")


def make_single_uniform(value=1.0, overhead_cost=0.0, overhead_variance=0.0,
                        cost=1.0):
    """One uniform technique estimating a constant integrand."""
    return MisProblem(
        domain=(0.0, 1.0),
        subintegrands=(lambda x: np.full_like(np.asarray(x, float), value),),
        techniques=(UniformDensity((0.0, 1.0)),),
        indicator=[[True]],
        costs=[cost],
        overhead_cost=overhead_cost,
        overhead_variance=overhead_variance,
    )


def make_twin_uniform(beta_aware_check=False):
    """Two identical uniform techniques sharing one constant subintegrand."""
    return MisProblem(
        domain=(0.0, 1.0),
        subintegrands=(lambda x: np.ones_like(np.asarray(x, float)),),
        techniques=(UniformDensity((0.0, 1.0)), UniformDensity((0.0, 1.0))),
        indicator=[[True, True]],
        costs=[1.0, 1.0],
    )


def make_gaussian_problem(overhead_cost=1.0, overhead_variance=1.0):
    """Uniform plus matched truncated Gaussian, both estimating one bump."""
    dom = (0.0, 1.0)
    bump = TruncatedGaussian(dom, 0.5, 0.12)
    return MisProblem(
        domain=dom,
        subintegrands=(lambda x: 1.5 * bump.pdf(x) + 0.25,),
        techniques=(UniformDensity(dom), TruncatedGaussian(dom, 0.5, 0.15)),
        indicator=[[True, True]],
        costs=[1.0, 2.5],
        overhead_cost=overhead_cost,
        overhead_variance=overhead_variance,
    )
