import json
import logging

from fractions import Fraction

import pytest

from thetapow.cache import CacheEntry, SeriesCache
from thetapow.cli import _frac_dec, _rad, main
from thetapow.coeffs import CoeffKey, gamma_series


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_coeff_csv(capsys, tmp_path):
    code, out, _ = run(capsys, "coeff", "--k", "3", "--n", "0", "--order", "5", "--format", "csv", "--cache-dir", str(tmp_path))
    assert code == 0
    assert out.splitlines() == ["m,coeff", "0,1", "1,6", "2,0", "3,6", "4,6", "5,0"]


def test_coeff_reduction_noted(capsys, tmp_path):
    code, out, _ = run(capsys, "coeff", "--k", "2", "--n", "5", "--order", "12", "--format", "json", "--cache-dir", str(tmp_path))
    assert code == 0
    payload = json.loads(out)
    assert payload["schema_version"] == 1
    assert payload["meta"]["reduced"] == "gamma_{2,5} = q^4 gamma_{2,1}"
    coeffs = [int(r["coeff"]) for r in payload["rows"]]
    assert coeffs == list(gamma_series(CoeffKey(2, 5), 12).coeffs)


def test_coeff_value_encloses_computed_number(capsys, tmp_path):
    code, out, _ = run(capsys, "coeff", "--k", "3", "--n", "0", "--q", "-0.163034", "--format", "json", "--precision", "30")
    assert code == 0
    row = json.loads(out)["rows"][0]
    v, r = Fraction(row["value"]), Fraction(row["radius"])
    assert v < 0 and r < Fraction(1, 10**30)
    assert abs(v - Fraction("-2.96599709077284e-6")) < Fraction(1, 10**19)


def test_json_is_deterministic(capsys, tmp_path):
    argv = ("classify", "--k", "3:5", "--format", "json")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b
    argv = ("coeff", "--k", "4", "--n", "1", "--order", "9", "--format", "json", "--cache-dir", str(tmp_path))
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)  # second run reads the cache
    assert a == b


def test_classify_k4(capsys):
    code, out, _ = run(capsys, "classify", "--k", "4", "--format", "csv")
    assert code == 0
    rows = [l.split(",") for l in out.splitlines()[1:]]
    assert [r[2] for r in rows] == ["minus_infinity", "tends_to_zero", "plus_infinity", "tends_to_zero"]


def test_classify_text_lists_sets(capsys):
    _, out, _ = run(capsys, "classify", "--k", "3")
    assert "X_3 = {0, 3}, Y_3 = 3Z" in out


def test_classify_complementary_flag(capsys):
    _, out, _ = run(capsys, "classify", "--k", "10", "--n", "0", "--format", "json")
    assert json.loads(out)["rows"][0]["complementary_flag"] is True


def test_zeros_hexagonal(capsys):
    code, out, _ = run(capsys, "zeros", "--k", "3", "--n", "0", "--format", "json", "--precision", "30", "--grid", "64")
    assert code == 0
    payload = json.loads(out)
    assert payload["meta"]["verdict"] == "minus_infinity"
    (row,) = payload["rows"]
    assert Fraction(-163034, 10**6) < Fraction(row["lo"]) < Fraction(row["hi"]) < Fraction(-163033, 10**6)
    assert Fraction(row["lo"]) <= Fraction(row["lo_exact"]) and Fraction(row["hi_exact"]) <= Fraction(row["hi"])


def test_zeros_small_k_verdict(capsys):
    code, out, _ = run(capsys, "zeros", "--k", "2", "--n", "0", "--format", "json", "--precision", "20", "--grid", "32")
    assert code == 0
    payload = json.loads(out)
    assert payload["rows"] == []
    assert payload["meta"]["verdict"] == "non-vanishing route (triple product)"


def test_zeros_contradiction_exit_code(capsys):
    code, _, _ = run(capsys, "zeros", "--k", "3", "--n", "0", "--window", "-0.1:-0.01", "--grid", "16", "--precision", "20")
    assert code == 4


@pytest.mark.parametrize(
    "argv",
    [
        ("coeff", "--k", "0", "--n", "0"),
        ("classify", "--k", "2"),
        ("classify", "--k", "x:y"),
        ("zeros", "--k", "3", "--n", "0", "--window", "bad"),
        ("coeff", "--k", "3", "--n", "0", "--precision", "5"),
    ],
)
def test_argument_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_verify_exit_code(capsys):
    code, out, _ = run(capsys, "verify", "poisson", "--format", "csv", "--precision", "30")
    assert code == 0
    assert out.splitlines()[0] == "check,passed,residual,radius,detail"
    assert all(",true," in l for l in out.splitlines()[1:])


def test_lattice_and_asymptote(capsys):
    code, out, _ = run(capsys, "lattice", "--k", "2", "--M", "0,1", "--format", "csv")
    assert code == 0
    assert [l.split(",")[:2] for l in out.splitlines()[1:]] == [["0", "1"], ["1", "7"]]
    code, out, _ = run(capsys, "asymptote", "--k", "3", "--n", "0", "--t", "0.05", "--format", "json", "--precision", "30")
    assert code == 0
    row = json.loads(out)["rows"][0]
    assert abs(float(row["ratio"]) + 2**0.5) < 1e-3


def test_printed_radius_covers_rounding():
    assert Fraction(_rad(0, 1, 5)) >= Fraction(1, 2 * 10**4)
    assert _frac_dec(Fraction(-1, 3), 5, "floor") == "-0.33334"
    assert _frac_dec(Fraction(-1, 3), 5, "ceil") == "-0.33333"


def test_cache_round_trip(tmp_path):
    cache = SeriesCache(tmp_path)
    s, hit = cache.series(CoeffKey(4, 1), 30)
    assert not hit
    s2, hit = cache.series(CoeffKey(4, 1), 20)
    assert hit and s2 == s.truncate(20)
    entry = cache.load(4, 1)
    assert CacheEntry.loads(entry.dumps()) == entry
    # reduced keys share the file
    s3, hit = cache.series(CoeffKey(4, 5), 25)
    assert hit and s3 == gamma_series(CoeffKey(4, 5), 25)


def test_cache_keeps_larger_order(tmp_path):
    cache = SeriesCache(tmp_path)
    cache.series(CoeffKey(3, 1), 40)
    cache.store(CacheEntry(3, 1, gamma_series(CoeffKey(3, 1), 10).coeffs))
    assert cache.load(3, 1).order == 40


def test_corrupt_cache_is_recomputed(tmp_path, caplog):
    cache = SeriesCache(tmp_path)
    s, _ = cache.series(CoeffKey(3, 0), 15)
    p = cache.path(3, 0)
    lines = p.read_text().split("\n")
    lines[5] = "999"
    p.write_text("\n".join(lines))
    with caplog.at_level(logging.WARNING):
        s2, hit = cache.series(CoeffKey(3, 0), 15)
    assert not hit and s2 == s
    assert "checksum" in caplog.text
    assert cache.load(3, 0) is not None


def test_cache_version_mismatch(tmp_path, caplog):
    cache = SeriesCache(tmp_path)
    cache.series(CoeffKey(3, 2), 10)
    p = cache.path(3, 2)
    p.write_text(p.read_text().replace("version 1", "version 0"))
    with caplog.at_level(logging.WARNING):
        assert cache.load(3, 2) is None
    assert "version" in caplog.text
    _, hit = cache.series(CoeffKey(3, 2), 10)
    assert not hit
