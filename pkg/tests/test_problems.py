import json

import numpy as np
import pytest

from misalloc.densities import Density, TruncatedGaussian, UniformDensity
from misalloc.problems import (MisProblem, ProblemValidationError,
                               load_problem, problem_from_dict)

DOM = (0.0, 1.0)


def constant(c):
    return lambda x: np.full_like(np.asarray(x, float), c)


class LeakyDensity(Density):
    """Deliberately unnormalized (integrates to 1.1)."""

    def pdf(self, x):
        return np.full_like(np.asarray(x, float), 1.1)

    def sample(self, u):
        return np.asarray(u, float)


def test_valid_problem_constructs():
    problem = MisProblem(
        domain=DOM,
        subintegrands=(constant(1.0),),
        techniques=(UniformDensity(DOM),),
        indicator=[[True]],
        costs=[2.0],
        overhead_cost=1.0,
        overhead_variance=0.5,
    )
    assert problem.n_techniques == 1
    assert problem.reference_integral() == pytest.approx(1.0)


def test_uncovered_subintegrand_rejected():
    with pytest.raises(ProblemValidationError, match="no technique"):
        MisProblem(
            domain=DOM,
            subintegrands=(constant(1.0), constant(2.0)),
            techniques=(UniformDensity(DOM),),
            indicator=[[True], [False]],
            costs=[1.0],
        )


def test_nonpositive_cost_rejected():
    with pytest.raises(ProblemValidationError, match="costs"):
        MisProblem(
            domain=DOM,
            subintegrands=(constant(1.0),),
            techniques=(UniformDensity(DOM),),
            indicator=[[True]],
            costs=[0.0],
        )


def test_unnormalized_density_rejected():
    with pytest.raises(ProblemValidationError, match="integrates to"):
        MisProblem(
            domain=DOM,
            subintegrands=(constant(1.0),),
            techniques=(LeakyDensity(DOM),),
            indicator=[[True]],
            costs=[1.0],
        )


def test_degenerate_coverage_rejected():
    # The only admissible technique has no density on half the domain
    # while the subintegrand is nonzero there.
    with pytest.raises(ProblemValidationError, match="admissible technique"):
        MisProblem(
            domain=DOM,
            subintegrands=(constant(1.0),),
            techniques=(UniformDensity(DOM, lo=0.0, hi=0.5),
                        TruncatedGaussian(DOM, 0.25, 0.05)),
            indicator=[[True, False]],
            costs=[1.0, 1.0],
        )


def test_indicator_shape_checked():
    with pytest.raises(ProblemValidationError, match="indicator shape"):
        MisProblem(
            domain=DOM,
            subintegrands=(constant(1.0),),
            techniques=(UniformDensity(DOM),),
            indicator=[[True, True]],
            costs=[1.0],
        )


def test_problem_from_dict_and_file(tmp_path):
    spec = {
        "domain": [0.0, 1.0],
        "subintegrands": ["gaussian(x, 0.5, 0.1)"],
        "techniques": [{"type": "uniform"}],
        "indicator": [[True]],
        "costs": [1.0],
        "overhead_cost": 1.0,
        "overhead_variance": 1.0,
    }
    problem = problem_from_dict(spec, name="inline")
    assert problem.name == "inline"

    path = tmp_path / "p.json"
    path.write_text(json.dumps(spec))
    assert load_problem(path).name == "p"


def test_malformed_file_reports_schema_error(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ProblemValidationError, match="invalid JSON"):
        load_problem(path)

    path2 = tmp_path / "missing.json"
    path2.write_text(json.dumps({"domain": [0, 1]}))
    with pytest.raises(ProblemValidationError, match="malformed"):
        load_problem(path2)
