"""Smoke test for the legendre_parity_py extension module.

Build and install first:  maturin develop -m crates/python/Cargo.toml
"""

import legendre_parity_py as lp


def main() -> None:
    assert lp.legendre(3, 7) == -1
    assert lp.legendre(0, 7) == 0
    assert lp.legendre(1, 2**61 - 1) == 1
    assert lp.legendre_table(5) == [0, 1, -1, -1, 1]
    assert lp.mulmod(6, 5, 7) == 2
    assert lp.powmod(3, 3, 7) == 6
    assert not lp.is_prime(561) and lp.is_prime(2**127 - 1)
    assert lp.next_prime_above(10000) == 10007
    assert lp.choose_prime_for_n(4) == 4099

    r = lp.exact_character_sum(7, [1, 2])
    assert (r.sum, r.degree, r.holds, r.zero_shift_count) == (-1, 2, True, 2)

    e = lp.exact_odd_probability(7, [1, 2])
    assert e.probability == (4, 7) and e.t_value == (-1, 7)
    assert e.within_parity_band()

    assert lp.filter_by_character(7, [1, 2], 1) == [2]

    est = lp.estimate_odd_probability(10007, list(range(20)), 20000, seed=1)
    exact = lp.exact_odd_probability(10007, list(range(20))).p_hat
    assert abs(est.p_hat - exact) <= 4 * est.std_err, (est, exact)
    assert lp.estimate_odd_probability(10007, [], 100).p_hat == 0.0

    assert lp.amplified_parity([0, 1, 0]) and not lp.amplified_parity([0, 0, 0])
    iso = lp.vv_isolation_rate(8, list(range(0, 256, 2)), 20000, seed=3)
    assert iso.p_hat >= 1 / 64, iso
    amp = lp.vv_amplified_rate(3, [1, 2, 4, 7], 3, 2000)
    assert 0.0 < amp.p_hat < 1.0

    f = lp.CnfFormula.parse_dimacs("p cnf 2 2\n1 2 0\n-1 0\n")
    assert f.num_vars == 2 and f.clauses == [[1, 2], [-1]]
    assert f.solutions() == [2]
    assert lp.encode_assignment([False, True, True]) == 6
    p, count, est = f.experiment(5000, seed=0)
    assert (p, count) == (67, 1)

    unsat = lp.CnfFormula(1, [[1], [-1]])
    assert unsat.experiment(1000)[2].p_hat == 0.0

    for bad in (lambda: lp.legendre(1, 9), lambda: lp.CnfFormula.parse_dimacs("p cnf 1 1\n2 0\n")):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")
    try:
        lp.choose_prime_for_n(50)
    except OverflowError:
        pass
    else:
        raise AssertionError("expected OverflowError")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
