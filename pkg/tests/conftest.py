from functools import lru_cache

import pytest

from fracnoether import Grid, get_problem, solve_pontryagin


@lru_cache(maxsize=None)
def _solve(pid, alpha, N):
    pr = get_problem(pid, alpha)
    return solve_pontryagin(pr, Grid(pr.a, pr.b, N))


@pytest.fixture(scope="session")
def solved():
    """Cached ``solved(problem_id, alpha, N)`` shared across test modules."""
    return _solve
