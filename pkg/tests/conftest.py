import pytest

from microspdc import CrystalConfig, PumpConfig, load_material

# One-line verdicts accumulated by tests/test_acceptance.py and echoed
# after the run so they survive pytest's stdout capture.
ACCEPTANCE_LINES = []


def record_acceptance(passed, text):
    line = ("PASS" if passed else "FAIL") + "  " + text
    ACCEPTANCE_LINES.append(line)
    assert passed, line


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def ln():
    return load_material("lithium_niobate_mgo")


@pytest.fixture(scope="session")
def bbo():
    return load_material("bbo")


@pytest.fixture(scope="session")
def silica():
    return load_material("fused_silica")


@pytest.fixture(scope="session")
def vacuum():
    return load_material("vacuum")


@pytest.fixture
def pump():
    return PumpConfig(center_wavelength_nm=405.0, waist_m=100e-6)


@pytest.fixture
def thin_crystal(ln):
    # one coherence length of the degenerate collinear e-e-e process
    return CrystalConfig(thickness_m=1.3754e-6, material=ln,
                         d_eff_pm_per_v=40.0)
