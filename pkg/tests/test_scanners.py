import pytest

from etaparity import scanners as sc
from etaparity.oracle import count_a_no3mod6, count_regular, eval_eta_exact


def test_parity_stream_first_bits():
    counts = count_a_no3mod6(16).coeffs
    bits = sc.parity_stream(sc.A_EXPR, 16).bits().tolist()
    assert bits == [c % 2 for c in counts]
    assert bits[:12] == [1, 1, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0]


def test_parity_stream_one_and_regular():
    assert sc.parity_stream("f1*f1^-1", 4).bits().tolist() == [1, 0, 0, 0]
    assert sc.parity_stream("f6/f1", 8).bits().tolist() == [c % 2 for c in count_regular(6, 8).coeffs]


def test_parity_stream_cached():
    assert sc.parity_stream("f3/(f1*f6)", 500) is sc.parity_stream(" f3 / ( f1 * f6 ) ", 500)


def test_verify_theorem():
    rep = sc.verify_theorem(4)
    assert rep.passed and rep.checked == 2
    assert sc.verify_theorem(10**5).passed


def test_theorem_scan_fails_on_six_regular():
    counts = count_regular(6, 100).coeffs
    expected = next(n for n in range(100) if n % 4 >= 2 and counts[n] % 2)
    rep = sc.verify_theorem(100, sc.REGULAR6_EXPR)
    assert not rep.passed
    assert rep.first_violation == expected == 3


def test_density_small():
    rep = sc.density(sc.A_EXPR, 1000, 4, workers=1)
    by_r = {c.residue: c for c in rep.classes}
    assert by_r[2].odd_count == by_r[3].odd_count == 0
    assert by_r[1].odd_fraction > 0
    assert sum(c.class_size for c in rep.classes) == 1000
    assert sum(c.odd_count for c in rep.classes) == rep.odd_total
    counts = count_a_no3mod6(1000).coeffs
    assert rep.odd_total == sum(c % 2 for c in counts)
    for c in rep.classes:
        assert c.odd_count == sum(counts[n] % 2 for n in range(c.residue, 1000, 4))
        assert 0.0 <= c.odd_fraction <= 1.0


def test_density_checkpoints():
    rep = sc.density(sc.A_EXPR, 12345, 1, workers=3)
    ns = [p.n for p in rep.checkpoints]
    assert ns == sorted(ns) and ns[-1] == 12345 and len(ns) == 10
    odd = [p.odd_count for p in rep.checkpoints]
    assert odd == sorted(odd) and odd[-1] == rep.odd_total


@pytest.mark.parametrize("m", [1, 4, 7, 64])
def test_density_worker_independent(m):
    reps = [sc.density(sc.A_EXPR, 20011, m, workers=w).as_dict() for w in (1, 2, 3, 8)]
    assert all(r == reps[0] for r in reps)


def test_density_rejects_bad_modulus():
    with pytest.raises(ValueError):
        sc.density(sc.A_EXPR, 100, 0)
    with pytest.raises(ValueError):
        sc.density(sc.A_EXPR, 3, 4)


# -- ap_scan -----------------------------------------------------------------

def even_classes(wits):
    return {(w.modulus, w.residue) for w in wits if w.status == "even-up-to-N"}


def test_ap_scan_mod4():
    wits = sc.ap_scan(sc.A_EXPR, 10**5, 4, workers=1)
    by = {(w.modulus, w.residue): w for w in wits}
    assert even_classes(wits) == {(4, 2), (4, 3)}
    assert by[(4, 2)].subsumed and by[(4, 3)].subsumed
    assert by[(4, 0)].witness == 0 and by[(4, 1)].witness == 1


def test_ap_scan_mod8():
    wits = sc.ap_scan(sc.A_EXPR, 10**5, 8)
    assert {c for c in even_classes(wits) if c[0] == 8} == {(8, 2), (8, 3), (8, 6), (8, 7)}
    assert all(w.subsumed for w in wits if w.status == "even-up-to-N")


def test_ap_scan_mod3_has_no_even_class():
    wits = sc.ap_scan(sc.A_EXPR, 10**5, 3)
    assert even_classes(wits) == set()


def test_ap_witnesses_are_smallest_odd():
    N = 2000
    counts = count_a_no3mod6(N).coeffs
    for w in sc.ap_scan(sc.A_EXPR, N, 12):
        odd = [n for n in range(w.residue, N, w.modulus) if counts[n] % 2]
        assert w.witness == (odd[0] if odd else None)


def test_ap_scan_sorted_and_deterministic():
    runs = [sc.ap_scan(sc.A_EXPR, 5000, 40, workers=w) for w in (1, 2, 8)]
    keys = [(w.modulus, w.residue) for w in runs[0]]
    assert keys == sorted(keys)
    assert runs[0] == runs[1] == runs[2]


def test_ap_scan_requires_coverage():
    with pytest.raises(ValueError):
        sc.ap_scan(sc.A_EXPR, 639, 64)


def test_subsumption_by_enumeration():
    for m in range(1, 65):
        for r in range(m):
            members = range(r, r + 4 * m, m)  # one full period mod 4
            inside = all(n % 4 in (2, 3) for n in members)
            assert sc.is_subsumed(m, r) == inside


def test_ap_insufficient_data():
    # f4 is supported on multiples of 4, so odd residues never see an odd bit
    odd = sc.parity_stream("f4", 100).support()
    status = {w.residue: w.status for w in sc._scan_modulus(odd, 100, 20)}
    assert status[3] == "insufficient-data"  # 5 samples
    status = {w.residue: w.status for w in sc._scan_modulus(odd, 100, 4)}
    assert status[3] == "even-up-to-N"  # 25 samples
    assert status[0] == "odd-witness"


# -- equidistribution ---------------------------------------------------------

def test_equidistribution_rejects_even_class():
    with pytest.raises(sc.IdenticallyEvenClass):
        sc.equidistribution(sc.A_EXPR, 4, 2, 10**4)


def test_equidistribution_small():
    rep = sc.equidistribution(sc.A_EXPR, 4, 1, 1000)
    assert 0 < rep.odd_fraction < 1
    assert rep.class_size == 250
    assert rep.max_deviation == max(p["deviation"] for p in rep.trace)
    counts = count_a_no3mod6(1000).coeffs
    assert rep.odd_count == sum(counts[n] % 2 for n in range(1, 1000, 4))


def test_equidistribution_errors():
    with pytest.raises(ValueError):
        sc.equidistribution(sc.A_EXPR, 4, 4, 100)
    with pytest.raises(ValueError):
        sc.equidistribution(sc.A_EXPR, 200, 150, 100)


# -- the 4m / 4m+1 link --------------------------------------------------------

def test_link_small_values():
    a = count_a_no3mod6(8).coeffs
    reg = count_regular(6, 2).coeffs
    comp = eval_eta_exact("f2/f3", 2).coeffs
    assert a[1] % 2 == reg[0] % 2 == 1
    assert a[5] % 2 == reg[1] % 2 == 1
    assert a[4] % 2 == comp[1] % 2 == 0


def test_link_against_oracle():
    N = 4000
    a = count_a_no3mod6(N).coeffs
    reg = count_regular(6, N // 4).coeffs
    comp = eval_eta_exact("f2/f3", N // 4).coeffs
    assert all(a[4 * m + 1] % 2 == reg[m] % 2 for m in range(N // 4))
    assert all(a[4 * m] % 2 == comp[m] % 2 for m in range(N // 4))


@pytest.mark.parametrize("N", [8, 9, 10, 11, 1001, 10**5])
def test_link_passes(N):
    rep = sc.check_remark1_link(N)
    assert rep.passed
    assert rep.checked_1mod4 == len(range(1, N, 4))
    assert rep.checked_0mod4 == len(range(0, N, 4))


def test_link_requires_n8():
    with pytest.raises(ValueError):
        sc.check_remark1_link(7)


def test_default_workers_env(monkeypatch):
    monkeypatch.setenv("ETAQ_THREADS", "3")
    assert sc.default_workers() == 3
    monkeypatch.delenv("ETAQ_THREADS")
    assert sc.default_workers() >= 1
