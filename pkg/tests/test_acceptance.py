"""One test per numbered acceptance criterion, at the stated tolerances."""
import pytest

from udn_sg import acceptance


@pytest.mark.parametrize("number", sorted(acceptance.CHECKS))
def test_criterion(number, acceptance_log, tmp_path):
    kwargs = {"output_dir": str(tmp_path)} if number == 12 else {}
    res = acceptance.run_check(number, **kwargs)
    print(res.line())
    acceptance_log.append(res.line())
    assert res.passed, res.line()
