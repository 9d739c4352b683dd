import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from helmacms.acms import AcmsContext
from helmacms.assembly import assemble
from helmacms.mesh import generate
from helmacms.problem import scenario_boundary_source, scenario_interior_source, scenario_plane_wave
from helmacms.reference import ErrorEvaluator, fem_solve

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.function_scoped_fixture])
settings.load_profile("default")


class Setup:
    def __init__(self, problem, refinements, exact=None):
        self.problem, self.exact = problem, exact
        self.mesh, self.skeleton = generate(problem.geometry, refinements)
        self.dofmap, self.forms = assemble(self.mesh, problem)
        self.u_fem = fem_solve(self.forms)
        self.context = AcmsContext(self.mesh, self.skeleton, self.dofmap, self.forms)
        self.evaluator = ErrorEvaluator(self.mesh, self.dofmap)


@pytest.fixture(scope="session")
def plane_wave_1():
    problem, exact = scenario_plane_wave(1.0)
    return Setup(problem, 1, exact)


@pytest.fixture(scope="session")
def plane_wave_3():
    problem, exact = scenario_plane_wave(1.0)
    return Setup(problem, 3, exact)


@pytest.fixture(scope="session")
def interior_source_2():
    return Setup(scenario_interior_source(1.0), 2)


@pytest.fixture(scope="session")
def boundary_source_2():
    return Setup(scenario_boundary_source(16.0), 2)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "ACCEPTANCE_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
