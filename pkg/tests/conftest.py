import acceptance_log


def pytest_terminal_summary(terminalreporter):
    if not acceptance_log.RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(acceptance_log.RESULTS):
        title, ok, lines = acceptance_log.RESULTS[number]
        tr.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
        for line in lines:
            tr.write_line(f"    {line}")
