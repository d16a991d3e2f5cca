import mpmath
import pytest

from hyperbilliard.dynamics import sample_word
from hyperbilliard.scalars.parser import parse_direction

REFERENCE = "1,sqrt(3),sqrt(2)"
GOLDEN = "1,(sqrt(5)-1)/2"
MILLION = 10**6


@pytest.fixture(scope="session")
def ref_dir():
    return parse_direction(REFERENCE)


@pytest.fixture(scope="session")
def golden_dir():
    return parse_direction(GOLDEN)


@pytest.fixture(scope="session")
def ref_word(ref_dir):
    return sample_word(ref_dir, 42, MILLION)


@pytest.fixture(scope="session")
def golden_word(golden_dir):
    return sample_word(golden_dir, 42, MILLION)


@pytest.fixture(scope="session")
def ref_word_short(ref_word):
    return ref_word.letters[:100_000]


@pytest.fixture
def mp():
    ctx = mpmath.MPContext()
    ctx.prec = 128
    return ctx


ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = {}


@pytest.fixture
def acceptance_log(request):
    return request.config.stash[ACCEPTANCE]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(ACCEPTANCE, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
