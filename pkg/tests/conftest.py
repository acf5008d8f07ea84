import pytest

from massosc import MatchedDetector, PhysicalConfig, ProbRequest, ProfileSpec, build_spectrum


@pytest.fixture(scope="session")
def paper_cfg():
    return PhysicalConfig()


@pytest.fixture(scope="session")
def paper_spectrum(paper_cfg):
    return build_spectrum(paper_cfg)


def matched_request(cfg, m0_index, mD_index, **kw):
    sp = build_spectrum(cfg)
    msq = sp.masses_sq
    emit = ProfileSpec(msq[m0_index - 1], cfg.delta0, cfg.W)
    det = MatchedDetector(ProfileSpec(msq[mD_index - 1], cfg.deltaD, cfg.W))
    return ProbRequest(sp, emit, det, **kw)


@pytest.fixture(scope="session")
def req31(paper_cfg):
    """Emitted m3, detected m1 (the density-plot setup)."""
    return matched_request(paper_cfg, 3, 1)


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line for a criterion, then assert it."""
    def record(number, ok, detail):
        line = f"acceptance {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
