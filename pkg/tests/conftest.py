def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion checked by the test")


_OUTCOMES = {}


def pytest_runtest_logreport(report):
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _OUTCOMES[report.nodeid] = report


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m:
            _LABELS[item.nodeid] = (m.args[0], item.name)


_LABELS = {}


def _key(label):
    digits = "".join(c for c in label if c.isdigit())
    return int(digits), label


def pytest_terminal_summary(terminalreporter):
    if not _LABELS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for nodeid, (label, name) in sorted(_LABELS.items(), key=lambda kv: _key(kv[1][0])):
        rep = _OUTCOMES.get(nodeid)
        if rep is None:
            status = "NOT RUN"
        else:
            status = "PASS" if rep.passed else "FAIL"
        tr.write_line(f"criterion {label:>3}: {status:7} {name}")
