def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for i, (passed, detail) in sorted(mod.RESULTS.items()):
        terminalreporter.write_line(f"criterion {i:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
