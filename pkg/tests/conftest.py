import pytest

from maxplushybrid import fixtures


@pytest.fixture
def gaubert():
    return fixtures.gaubert_mpa()


@pytest.fixture
def production():
    return fixtures.production_line_smpl()


@pytest.fixture
def feedback():
    return fixtures.feedback_demo_smpl()
