# tests/conftest.py
import os

import pytest

FIXTURES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures")

# marker -> environment switch that turns it on
OPT_IN = {"census": "ODOMETER_CENSUS", "slow": "ODOMETER_SLOW"}


def pytest_collection_modifyitems(config, items):
    for marker, env in OPT_IN.items():
        if os.getenv(env) == "1":
            continue
        skip = pytest.mark.skip(reason=f"set {env}=1 to run")
        for item in items:
            if marker in item.keywords:
                item.add_marker(skip)


@pytest.fixture(scope="session")
def fixture_path():
    return lambda name: os.path.join(FIXTURES, name)


@pytest.fixture(scope="session")
def gamma():
    from gpa import GraphContext

    return GraphContext.gamma()


@pytest.fixture(scope="session")
def rules():
    import rules_init

    rules_init.load_rules(strict=False)
    return rules_init.get_rules()
