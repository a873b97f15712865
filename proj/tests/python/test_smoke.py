import cmath
import math

import pytest

import qvar


def test_arith_values():
    assert [qvar.mobius(n) for n in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]
    assert qvar.totient(36) == 12
    assert qvar.reduced_residues(10) == [1, 3, 7, 9]
    assert abs(qvar.ramanujan_sum(30, 7) - qvar.mobius(30)) < 1e-12
    lam = qvar.von_mangoldt_table(10)
    assert lam[8] == pytest.approx(math.log(2))
    assert lam[6] == 0.0


def test_gauss_sum_magnitude():
    for q in (3, 5, 7, 11):
        s = qvar.complete_poly_sum(q, [0, 1])
        assert abs(s) == pytest.approx(q ** -0.5, abs=1e-12)


def test_variation():
    assert qvar.hvar([0, 1, 0], 2.0) == pytest.approx(math.sqrt(2))
    assert qvar.ivar([0, 1, 0], 2.0) == pytest.approx(math.sqrt(3))
    assert qvar.greedy_jump_count([0, 2, 1, 3], 1.5) == 1
    assert qvar.lazy_jump_count([0, 2, 1, 3], 1.5) == 2
    assert qvar.time_grid(1.0, 16) == [2, 4, 8, 16]


def test_kernels():
    # mean of e(n^2 a) over n <= 4 at a = 1/4
    want = sum(cmath.exp(2j * math.pi * n * n / 4) for n in range(1, 5)) / 4
    assert abs(qvar.poly_kernel_ft(4, 2, [0.0, 0.25]) - want) < 1e-12
    assert abs(qvar.prime_kernel_ft(100, 0.0) - sum(qvar.von_mangoldt_table(100)) / 100) < 1e-12
    x = 2 * math.pi * 3.0 * 0.1
    assert abs(qvar.cm_ft(3.0, [0.1]) - (cmath.exp(1j * x) - 1) / (1j * x)) < 1e-12


def test_arcs():
    r = qvar.classify_arc([0.5], 10**4)
    assert r["major"] and r["q"] == 2 and r["theta"] == [(1, 2)]
    assert not qvar.classify_arc([(math.sqrt(5) - 1) / 2], 10**4)["major"]


def test_scans_return_records():
    rec = qvar.verify_arith(limit=60)
    assert rec["passed"] and rec["kind"] == "verify-arith"
    assert len(rec["rows"]) > 0
    rec = qvar.approx_scan(family="prime", N_grid=[256, 1024])
    assert rec["kind"] == "approx-scan"
    assert len(rec["rows"]) == 2


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        qvar.hvar([0, 1], 0.5)
    with pytest.raises(ValueError):
        qvar.verify_arith(bogus=1)
    with pytest.raises(ValueError):
        qvar.poly_kernel_ft(10, 5, [0.1] * 5)
