def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(RESULTS, key=lambda s: (int(s.rstrip("ab")), s)):
        title, ok, detail = RESULTS[label]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {label}: {title} -- {detail}")
