def pytest_terminal_summary(terminalreporter):
    """One pass/fail line per acceptance criterion, after the normal report."""
    lines = {}
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            props = dict(getattr(rep, "user_properties", []))
            if "criterion" not in props or (rep.when != "call" and rep.passed):
                continue
            verdict = "PASS" if rep.passed else "FAIL"
            if lines.get(props["criterion"], ("PASS",))[0] == "FAIL":
                continue
            lines[props["criterion"]] = (verdict, props.get("title", ""), props.get("detail", ""))
    if not lines:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for n in sorted(lines):
        verdict, title, detail = lines[n]
        terminalreporter.write_line(f"criterion {n:>2} {verdict}: {title}" + (f" [{detail}]" if detail else ""))
