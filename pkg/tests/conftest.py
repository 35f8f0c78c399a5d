import math

from qtoa import FreeFallParams


def params_from_dimensionless(q, sigma_over_x, x=1.0, g=2.0, m=1.0):
    """Parameter set hitting a given (q, sigma/x) at detector height x.

    Inverts q = hbar / (2 m sigma sqrt(2 g x)) for hbar, which places the
    problem anywhere on the regime plane without touching m, g, or x.
    """
    sigma = sigma_over_x * x
    hbar = 2.0 * m * sigma * q * math.sqrt(2.0 * g * x)
    return FreeFallParams(m=m, g=g, sigma=sigma, hbar=hbar)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import CRITERION_LINES
    except ImportError:
        return
    if CRITERION_LINES:
        terminalreporter.write_line("")
        terminalreporter.write_line("acceptance criteria:")
        for _, line in sorted(CRITERION_LINES.items()):
            terminalreporter.write_line("  " + line)
