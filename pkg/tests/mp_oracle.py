"""
Independent high-precision reference values computed with mpmath.

Nothing here imports qbessel.  Running this file prints the literal table
stored in ``frozen_values.py``::

    python3 tests/mp_oracle.py > tests/frozen_values.py
"""
import mpmath as mp

# base precision; j_alpha_at raises it further to cover the series cancellation
DPS = 450


def poch_inf(a, q):
    a, q = mp.mpf(a), mp.mpf(q)
    return mp.qp(a, q)


def poch(a, q, m):
    a, q = mp.mpf(a), mp.mpf(q)
    out = mp.mpf(1)
    for i in range(m):
        out *= 1 - a * q ** i
    return out


def _digits_needed(k, q):
    # at x = q**k, k < 0, terms peak near q**(-k*k) while the sum is near q**(k*k)
    m = max(0, -k)
    return int(2 * m * m * float(mp.log10(1 / mp.mpf(q)))) + 60


def j_alpha_at(k, q, alpha):
    """``j_alpha(q**k; q**2)`` with the argument built at the raised working precision."""
    with mp.workdps(max(mp.mp.dps, _digits_needed(k, q))):
        return +_j_alpha(mp.mpf(q) ** k, q, alpha)


def j_alpha(x, q, alpha):
    """Normalized q-Bessel series at an arbitrary argument (no precision boost)."""
    return _j_alpha(x, q, alpha)


def _j_alpha(x, q, alpha):
    x, q, alpha = mp.mpf(x), mp.mpf(q), mp.mpf(alpha)
    q2 = q * q
    terms = []
    k = 0
    while True:
        t = ((-1) ** k * q ** (k * (k + 1)) * x ** (2 * k)
             / (poch(q2, q2, k) * poch(q ** (2 * alpha + 2), q2, k)))
        terms.append(t)
        if k > 5 and abs(t) < mp.mpf(10) ** (-mp.mp.dps + 20) and abs(t) < abs(terms[-2]):
            break
        k += 1
    return mp.fsum(reversed(terms))


def c_q_alpha(q, alpha):
    q = mp.mpf(q)
    return poch_inf(q ** (2 * alpha + 2), q * q) / ((1 - q) * poch_inf(q * q, q * q))


def c_q_v(q, alpha, n):
    """Normalizing constant that makes the generalized kernel family orthonormal."""
    q = mp.mpf(q)
    return q ** (n * (alpha + n + 1)) * c_q_alpha(q, alpha + n)


def kernel(s, q, alpha, n):
    """``x**(2n) j_{alpha+n}(q**n x)`` at ``x = q**s``."""
    q = mp.mpf(q)
    return q ** (2 * n * s) * j_alpha_at(s + n, q, alpha + n)


J_POINTS = [
    (0.5, 0.0, 0), (0.5, 0.0, -3), (0.5, 0.5, 2), (0.5, 0.5, -4), (0.5, 1.5, -6), (0.5, 3.5, -10),
    (0.8, 0.0, -20), (0.8, 1.5, -34), (0.8, 0.5, -40), (0.8, 2.5, 5),
]
KERNEL_POINTS = [(0.5, 0.5, 1, 1), (0.5, 1.5, 2, -2), (0.8, 1.5, 1, -12), (0.8, 0.5, 0, -30)]
C_POINTS = [(0.5, 0.0, 0), (0.5, 1.0, 0), (0.5, 0.5, 1), (0.5, 1.5, 2), (0.8, 1.5, 1), (0.8, 0.0, 0)]
POCH_POINTS = [(0.5, 0.5), (0.25, 0.8), (-0.3, 0.6)]


def main():
    mp.mp.dps = DPS
    print('"""Reference values generated by tests/mp_oracle.py (mpmath, %d digits)."""' % DPS)
    print()
    print("# (q, alpha, k) -> j_alpha(q**k; q**2)")
    print("J_ALPHA = {")
    for q, a, k in J_POINTS:
        print(f"    ({q!r}, {a!r}, {k}): {mp.nstr(j_alpha_at(k, q, a), 20)},")
    print("}")
    print()
    print("# (q, alpha, n, s) -> generalized kernel at x = q**s")
    print("KERNEL = {")
    for q, a, n, s in KERNEL_POINTS:
        print(f"    ({q!r}, {a!r}, {n}, {s}): {mp.nstr(kernel(s, q, a, n), 20)},")
    print("}")
    print()
    print("# (q, alpha, n) -> normalizing constant")
    print("C_V = {")
    for q, a, n in C_POINTS:
        print(f"    ({q!r}, {a!r}, {n}): {mp.nstr(c_q_v(q, a, n), 20)},")
    print("}")
    print()
    print("# (a, q) -> (a; q)_inf")
    print("POCH_INF = {")
    for a, q in POCH_POINTS:
        print(f"    ({a!r}, {q!r}): {mp.nstr(poch_inf(a, q), 20)},")
    print("}")
    print()
    print("# q -> 1 / (q; q**2)_inf**2")
    print("KERNEL_BOUND = {")
    for q in (0.5, 0.8):
        print(f"    {q!r}: {mp.nstr(1 / poch_inf(q, mp.mpf(q) ** 2) ** 2, 20)},")
    print("}")


if __name__ == "__main__":
    main()
