import warnings

import pytest

from mddag.simulator import DurationNotHyperPeriodMultiple


@pytest.fixture(autouse=True)
def _silence_duration_warning():
    # tests deliberately use short horizons; the warning is exercised explicitly
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DurationNotHyperPeriodMultiple)
        yield
