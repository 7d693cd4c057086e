"""Smoke test for the Python bindings; run with pytest or directly."""

import pytest

import wittgr


def test_witt_arithmetic():
    # W_3(F_2) = Z/8
    a = wittgr.WittVector.from_int(2, 3, 3)
    b = wittgr.WittVector.from_int(2, 3, 7)
    assert a + b == wittgr.WittVector.from_int(2, 3, 10)
    assert a * b == wittgr.WittVector.from_int(2, 3, 21)
    assert wittgr.WittVector.from_int(2, 3, 2).coords == [0, 1, 0]
    assert (-a).coords == wittgr.WittVector.from_int(2, 3, 5).coords
    assert a.inverse() * a == wittgr.WittVector.from_int(2, 3, 1)
    assert wittgr.verify_famous_identity(3, 3)
    with pytest.raises(ArithmeticError):
        wittgr.verify_famous_identity(2, 2)


def test_counts():
    assert wittgr.count_cell([1, 0], 5) == 6
    assert wittgr.count_cell([2, 0], 3, leq=True) == 13
    assert wittgr.count_cell([2, 0], 3, kind="equal") == 12
    assert wittgr.count_chain([[1, 0, 0]] * 2, 2) == 49
    assert wittgr.count_fiber([[1, 0], [1, 0]], [1, 1], 3) == 4
    assert wittgr.count_mv([1, 1], [2, 0], 2) == 1
    assert wittgr.cell_polynomial([1, 0]) == [1, 1]
    with pytest.raises(ValueError):
        wittgr.count_cell([1, 0], 6)


def test_kl_and_satake():
    t = wittgr.KlTable("B2")
    assert t.polynomial("e", "0,1,0,1") == [1]
    assert wittgr.lv_polynomial("affine-a1", "e", "0,1,0") == [1]
    report = wittgr.verify_minus_q("affine-a1", 6)
    assert report["failures"] == 0 and report["pairs"] > 0
    lk = dict((tuple(k), v) for k, v in wittgr.lusztig_kato([2, 0]))
    assert lk[(1, 1)] == [0, -1]
    assert wittgr.kostka_foulkes([2, 1, 0], [1, 1, 1]) == [0, 1, 1]
    assert wittgr.weight_multiplicity([1, 0, -1], [0, 0, 0]) == 2
    assert wittgr.kl_kostka_report([2, 1, 0])["reversed_mismatches"] == 0


def test_adlv_and_gl2():
    assert wittgr.newton_point("superbasic:1", 2) == ["1/2", "1/2"]
    assert wittgr.defect("superbasic:1", 2) == 1
    rep = wittgr.dimension_report("superbasic", [1, 0], r_max=3)
    assert rep["pass"] and rep["formula_dim"] == 0
    assert wittgr.b3_suite(3, trials=20)["pass"]
    assert wittgr.quotient_check(2)["torsor"] == 10752


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
