from pathlib import Path

import pytest

from qheis.parser import parse_expression

GOLDEN = Path(__file__).parent / "golden"


def load_residuals():
    """Hand-derived residuals keyed by (check, config, label)."""
    table = {}
    for line in (GOLDEN / "residuals.txt").read_text().splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        check, config, label, residual = (part.strip() for part in line.split(" | "))
        table[(check, config, label)] = parse_expression(residual)
    return table


@pytest.fixture(scope="session")
def residuals():
    return load_residuals()
