import pytest

import caseval as cv


@pytest.fixture
def lightbulb_doc() -> cv.CaseDocument:
    return cv.parse_document(cv.load_fixture("lightbulb"))


@pytest.fixture
def lightbulb(lightbulb_doc) -> cv.CaseGraph:
    return lightbulb_doc.case


@pytest.fixture
def eliminative() -> cv.CaseGraph:
    return cv.parse_case(cv.load_fixture("eliminative_light"))


@pytest.fixture
def minimal() -> cv.CaseGraph:
    b = cv.CaseBuilder(name="minimal")
    b.top(b.assumption("the system is adequate", "accepted for exploration", id="top"))
    return b.finish()
