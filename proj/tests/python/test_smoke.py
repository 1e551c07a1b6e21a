import math

import pytest

import mixeig


def test_unit_interval_bounds_bracket_the_eigenvalue():
    pr = mixeig.Problem(p=2.0)
    assert pr.k_p == pytest.approx(4.0)
    report = mixeig.compute_bounds(pr)
    assert report.sigma_p == pytest.approx(0.25, rel=1e-8)
    assert report.basic_lower == pytest.approx(1.0, rel=1e-8)
    assert report.basic_upper == pytest.approx(4.0, rel=1e-8)
    lam = mixeig.solve_eigenvalue(pr).eigenvalue
    assert lam == pytest.approx(math.pi ** 2 / 4, rel=1e-8)
    assert report.lower_best <= lam <= report.upper_best
    assert "sigma" in repr(report)


def test_exact_values():
    e = mixeig.exact_values(3.0)
    assert e.lambda_root ** 3 == pytest.approx(mixeig.exact_lambda(3.0))
    assert mixeig.exact_bar_delta1(2.0) == pytest.approx(0.375)
    with pytest.raises(ValueError):
        mixeig.exact_lambda(1.0)


def test_eigenfunction_arrays():
    s = mixeig.solve_eigenvalue(mixeig.Problem(p=3.0, case="dn"))
    assert len(s.x) == len(s.g) == len(s.w)
    assert s.g[0] == 0.0
    lo, hi = s.bracket
    assert lo <= s.eigenvalue <= hi


def test_iterations_converge():
    pr = mixeig.Problem(p=2.0)
    low = mixeig.iterate_lower(pr, n_max=20)
    assert 1.0 / low.delta_n == pytest.approx(math.pi ** 2 / 4, rel=1e-4)
    deltas = [d for _, d in low.history]
    assert all(b <= a * (1 + 1e-12) for a, b in zip(deltas, deltas[1:]))
    up = mixeig.iterate_upper(pr, n_max=2, grid_m=12)
    assert [o.n for o in up.delta_prime] == [1, 2]
    assert 1.0 / up.bar_delta[1].value >= math.pi ** 2 / 4 * (1 - 1e-6)


def test_weights_and_half_line():
    pr = mixeig.Problem(u="exp:-1", v="exp:1", D="inf")
    assert math.isinf(pr.D)
    assert pr.u(1.0) == pytest.approx(math.exp(-1.0))
    ok, lines = mixeig.certify(pr, n_max=6)
    assert ok, lines
    flat = mixeig.Problem(D=float("inf"))
    assert math.isinf(mixeig.sigma_p(flat))
    assert mixeig.basic_bounds(flat) == (0.0, 0.0)
    with pytest.raises(mixeig.IterationError):
        mixeig.iterate_lower(flat, 3)


def test_sweep_and_csv():
    rows = mixeig.sweep(mixeig.Problem(), "1.5:2.5:0.5", threads=1)
    assert [r.p for r in rows] == pytest.approx([1.5, 2.0, 2.5])
    for r in rows:
        assert r.ordered()
        assert r.lambda_root == pytest.approx(r.exact_lambda_root, rel=1e-6)
    csv = mixeig.to_csv(rows)
    assert csv.startswith("p,sigma_root,")
    assert csv.count("\n") == 4


def test_invalid_input():
    with pytest.raises(ValueError):
        mixeig.Problem(p=0.5)
    with pytest.raises(ValueError):
        mixeig.Problem(case="nn")
    with pytest.raises(mixeig.ConfigError):
        mixeig.sweep(mixeig.Problem(), "2:1:0.5")
