import contextlib
import sys


@contextlib.contextmanager
def criterion_report(name):
    """Print one PASS/FAIL line per acceptance criterion (visible with -s)."""
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {name}: FAIL", file=sys.stderr)
        raise
    print(f"ACCEPTANCE {name}: PASS")
