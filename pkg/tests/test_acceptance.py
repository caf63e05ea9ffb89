import pytest

from capax.acceptance import CRITERIA


@pytest.mark.acceptance
@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda c: c.__name__)
def test_criterion(criterion):
    res = criterion()
    print(res.line())
    assert res.passed, res.detail
