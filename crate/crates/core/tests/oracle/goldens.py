"""High-precision reference values for the regression goldens in tests/goldens.rs.

Independent of the Rust implementation: the boundary system is solved with
mpmath at 60 digits directly in the (a1, a2, b1, b2) unknowns, with no
rescaling, and the continuum transmission is evaluated from the textbook
formula.

    python3 goldens.py
"""
import mpmath as mp

mp.mp.dps = 60
HBAR = mp.mpf("0.6582119569")
ME = mp.mpf("510998.95") / mp.mpf("299.792458") ** 2


def dispersion(E, V0, L, N, m=ME):
    mu = mp.mpf(L) / N
    eps = 1 - m * E * mu**2 / HBAR**2
    lam = 1 + m * (V0 - E) * mu**2 / HBAR**2
    return mu, eps, lam, mp.acos(eps), mp.acosh(lam)


def solve(E, V0, L, N, m=ME):
    mu, eps, lam, th, ph = dispersion(E, V0, L, N, m)
    ei, e = mp.expj(th), mp.exp(ph)
    A = mp.matrix([
        [1, 1, -1, -1],
        [0, 0, e**N, e**-N],
        [1 - 1 / ei, 1 - ei, -(e - 1), -(1 / e - 1)],
        [0, 0, (e - 1) * e ** (N - 1), (1 / e - 1) * e ** -(N - 1)],
    ])
    rhs = mp.matrix([0, ei**N, 0, (ei - 1) * ei**N])
    a1, a2, b1, b2 = mp.lu_solve(A, rhs)
    return a1, a2, b1, b2


def time_incident(E, V0, L, N, m=ME):
    mu, eps, lam, th, ph = dispersion(E, V0, L, N, m)
    a1, a2, b1, b2 = solve(E, V0, L, N, m)
    b1, b2 = b1 / a1, b2 / a1
    pre = 2 * m * N * mu**2 / HBAR / (2 * mp.sqrt(lam**2 - 1))
    geom = (mp.exp(2 * ph) - mp.exp(-2 * N * ph)) / (mp.exp(2 * ph) - 1)
    return abs(1j * pre * (mp.conj(b2) * b1 * (1 + N) + abs(b2) ** 2 * geom))


def continuum(E, V0, L, m=ME):
    k = mp.sqrt(2 * m * (V0 - E)) / HBAR
    return 1 / (1 + V0**2 * mp.sinh(k * L) ** 2 / (4 * E * (V0 - E)))


def oracle(E, V0, L, N, sigma_end, m=ME):
    mu, eps, lam, th, ph = dispersion(E, V0, L, N, m)

    def s(k):
        if k in (0, N):
            return sigma_end(eps, lam)
        return lam if 1 <= k <= N - 1 else eps

    psi = {N: mp.expj(N * th), N + 1: mp.expj((N + 1) * th)}
    for j in range(N - 1, -3, -1):
        psi[j] = 2 * s(j + 1) * psi[j + 1] - psi[j + 2]
    M = mp.matrix([[mp.expj(-2 * th), mp.expj(2 * th)], [mp.expj(-th), mp.expj(th)]])
    a1, a2 = mp.lu_solve(M, mp.matrix([psi[-2], psi[-1]]))
    return 1 / abs(a1) ** 2


if __name__ == "__main__":
    E, V0, L = mp.mpf("5.5"), mp.mpf("9.7"), 1
    print("cutoff_1nm", mp.nstr(2 * HBAR**2 / ME, 17))
    for N in (10, 20):
        mu, eps, lam, th, ph = dispersion(E, V0, L, N)
        print(f"N={N} eps", mp.nstr(eps, 17), "lam", mp.nstr(lam, 17),
              "theta", mp.nstr(th, 17), "phi", mp.nstr(ph, 17))
    for N in (1, 10, 20, 100, 2000):
        if N == 1:
            continue
        a1, a2, b1, b2 = solve(E, V0, L, N)
        print(f"N={N} T", mp.nstr(1 / abs(a1) ** 2, 17), "time_fs", mp.nstr(time_incident(E, V0, L, N), 17))
    print("T_cont", mp.nstr(continuum(E, V0, L), 17))
    for N in (100, 2000):
        print(f"N={N} oracle exclusive", mp.nstr(oracle(E, V0, L, N, lambda e, l: e), 17),
              "midpoint", mp.nstr(oracle(E, V0, L, N, lambda e, l: (e + l) / 2), 17))
    # minimal barrier, low energy so that N=1 is admissible
    a1, a2, b1, b2 = solve(mp.mpf("0.1"), mp.mpf("2"), L, 1)
    print("N=1 E=0.1 V0=2 T", mp.nstr(1 / abs(a1) ** 2, 17))
