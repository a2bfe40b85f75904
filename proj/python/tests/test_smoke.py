import pytest

import giz


def test_surface_basics():
    S = giz.Surface("x - 1", "u - 1")
    assert S.smooth
    assert S.contains("y*u - x^2 + x")
    assert not S.contains("x")
    assert len(S.catalog_ids()) == 8


def test_non_smooth_diagnostic():
    S = giz.Surface("x*(x-1)^2", "u*(u-1)^2")
    assert not S.smooth
    assert "non-simple roots" in S.diagnostic
    with pytest.raises(giz.InvalidInput, match="non-simple roots"):
        giz.move("x*(x-1)^2", "u*(u-1)^2", "1,0,1,0", "0,1,0,1")


def test_bad_input_is_value_error():
    with pytest.raises(ValueError):
        giz.Surface("x + y", "u")


def test_verify_report():
    rep = giz.verify(suites=["iso", "charts"], seed=1)
    assert rep["schema"] == "report-v1"
    assert rep["pass"]
    assert sorted(rep["suites"]) == ["charts", "iso"]
    assert giz.verify(suites=["iso"], seed=1) == giz.verify(suites=["iso"], seed=1)


def test_identity_and_theta():
    assert giz.identity("x - 1", "u - 1", "D1", k=2)["verdict"] == "exact"
    t = giz.theta("x", "u - 1")
    assert t["pullback_exact"] and t["inverse_exact"] and t["v1_formula"]


def test_move_and_flow():
    r = giz.move("x - 1", "u - 1", (1, 0, 1, 0), (0, 1, 0, 1))
    assert r["word"]["schema"] == "word-v1"
    end = [complex(s.replace("i", "j")) for s in r["endpoint"]]
    assert max(abs(a - b) for a, b in zip(end, (0, 1, 0, 1))) < 1e-6
    f = giz.flow("x - 1", "u - 1", "phi.y2_dx", 1, "0,1,0,1")
    assert f["endpoint"] == ["1", "1", "0", "0"]


def test_certificate():
    c = giz.certificate("x", "u - 1", range=0)
    assert c["schema"] == "cert-v1" and c["pass"]
