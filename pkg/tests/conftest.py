from hypothesis import settings

settings.register_profile("repro", derandomize=True, deadline=None, print_blob=True)
settings.load_profile("repro")


def brute_partitions(n, max_part=None):
    """All partitions of n as non-increasing tuples (plain recursion)."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for p in range(min(n, max_part), 0, -1):
        for rest in brute_partitions(n - p, p):
            yield (p,) + rest


def brute_series_product(factors, N):
    """Integer expansion of prod (1 - q^k) ** sign by literal polynomial arithmetic.

    ``factors`` is a list of (k, sign); division by (1 - q^k) uses the
    geometric series 1 + q^k + q^2k + ...
    """
    c = [1] + [0] * (N - 1)
    for k, sign in factors:
        if sign > 0:
            poly = [1 if i == 0 else (-1 if i == k else 0) for i in range(N)]
        else:
            poly = [1 if i % k == 0 else 0 for i in range(N)]
        c = [sum(c[i] * poly[n - i] for i in range(n + 1)) for n in range(N)]
    return c


def pytest_configure(config):
    config._acceptance = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_acceptance", [])
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, ok, detail in sorted(results):
        line = f"[{'PASS' if ok else 'FAIL'}] {num}. {title}"
        terminalreporter.write_line(line + (f" -- {detail}" if detail else ""))
