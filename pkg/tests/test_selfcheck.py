from mangoldt.selfcheck import CHECKS, run_selfcheck


def test_selfcheck_all_pass():
    results = run_selfcheck()
    assert len(results) == len(CHECKS)
    failures = [(name, detail) for name, ok, detail in results if not ok]
    assert failures == []
