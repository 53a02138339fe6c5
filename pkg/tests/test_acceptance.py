"""The twelve acceptance checks at their stated tolerances.

Each check prints one ``PASS``/``FAIL`` line; pytest repeats the lines in
its terminal summary.  Run this file directly for the bare report.
"""

import pytest

from netrw.checks import CHECKS, CheckConfig

REPORT = []


@pytest.mark.parametrize("check_id", list(CHECKS))
def test_acceptance(check_id):
    result = CHECKS[check_id](CheckConfig())
    REPORT.append(result.line())
    print(result.line())
    assert result.passed, "\n".join(result.detail)


if __name__ == "__main__":
    import sys

    results = [CHECKS[c](CheckConfig()) for c in CHECKS]
    for r in results:
        print(r.line(), flush=True)
    sys.exit(0 if all(r.passed for r in results) else 1)
