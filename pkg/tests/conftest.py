import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

# criterion number -> (passed, description, failed sub-checks); filled by test_acceptance
ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_RESULTS):
        ok, desc, failed = ACCEPTANCE_RESULTS[num]
        line = f"criterion {num:2d} {'PASS' if ok else 'FAIL'}: {desc}"
        if failed:
            line += f"  [failed: {'; '.join(failed)}]"
        terminalreporter.write_line(line)
