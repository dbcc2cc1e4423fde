import pytest

from heavenly.solutions import random_solution, worked_instance


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running checks")


@pytest.fixture(scope="session")
def worked():
    return worked_instance()


@pytest.fixture(scope="session", params=["modified", "generic"])
def draw(request):
    return random_solution(7, request.param)
