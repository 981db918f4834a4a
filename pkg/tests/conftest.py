import pytest

from cpgames.cli import load_game


@pytest.fixture(scope="session")
def pd():
    return load_game("pd")


@pytest.fixture(scope="session")
def bos():
    return load_game("bos")


@pytest.fixture(scope="session")
def rps():
    return load_game("rps")


@pytest.fixture(scope="session")
def bos_extended():
    return load_game("bos_extended")


@pytest.fixture(scope="session")
def leduc():
    return load_game("leduc_empirical")


@pytest.fixture(scope="session")
def fullsupport():
    return load_game("fullsupport")


@pytest.fixture(scope="session")
def all_games(pd, bos, rps, bos_extended, leduc, fullsupport):
    return {
        "pd": pd,
        "bos": bos,
        "rps": rps,
        "bos_extended": bos_extended,
        "leduc_empirical": leduc,
        "fullsupport": fullsupport,
    }
