import pytest

from mangoldt import CATALOG, sf_const


@pytest.fixture(scope="session")
def catalog():
    """Built-in functions plus a concrete squarefree-constant instance."""
    fs = dict(CATALOG)
    fs["sf_const(0.5)"] = sf_const(0.5)
    return fs
