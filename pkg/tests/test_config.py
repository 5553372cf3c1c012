import pytest

from meettree.config import BUDGET_ENV_VAR, DEFAULT_NODE_BUDGET, NodeCounter, SearchConfig
from meettree.errors import BudgetExceeded, InputError


def test_defaults(monkeypatch):
    monkeypatch.delenv(BUDGET_ENV_VAR, raising=False)
    config = SearchConfig.from_env()
    assert config.node_budget == DEFAULT_NODE_BUDGET
    assert config.seed == 17
    assert config.extension_budget == 3


def test_budget_from_environment(monkeypatch):
    monkeypatch.setenv(BUDGET_ENV_VAR, "1234")
    assert SearchConfig.from_env(seed=5).node_budget == 1234
    assert SearchConfig.from_env(seed=5).seed == 5
    monkeypatch.setenv(BUDGET_ENV_VAR, "lots")
    with pytest.raises(InputError):
        SearchConfig.from_env()
    monkeypatch.setenv(BUDGET_ENV_VAR, "0")
    with pytest.raises(InputError):
        SearchConfig.from_env()


def test_counter_stops_at_budget():
    counter = NodeCounter.for_config(SearchConfig(node_budget=3), "unit")
    counter.charge(3)
    with pytest.raises(BudgetExceeded) as err:
        counter.charge()
    assert err.value.what == "unit"
    assert err.value.reached == 4
