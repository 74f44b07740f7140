"""End-to-end verification battery.

Every numbered check in the library's verification registry runs at its
stated tolerance.  Each one prints a single ``[PASS]``/``[FAIL]`` line to
the terminal (bypassing capture) so the full ledger of outcomes is
visible in the test log.
"""

import pytest

from detproc import acceptance


@pytest.mark.parametrize(
    "number",
    acceptance.ALL_CHECKS,
    ids=[f"check_{n:02d}" for n in acceptance.ALL_CHECKS],
)
def test_criterion(number, capsys):
    result = acceptance._REGISTRY[number]()
    with capsys.disabled():
        print(f"\n{result.line()}")
    assert result.passed, result.line()
