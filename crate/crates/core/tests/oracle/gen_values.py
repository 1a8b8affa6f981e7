"""Reference values for the analytic tests, computed at 50 digits with mpmath.

The numbers printed here are frozen into tests/analytic_oracle.rs. The
covariances are obtained by direct differentiation / subtraction of the
Dirichlet moment integral, not by the closed forms the crate implements.
"""
from mpmath import mp, mpf, gamma, loggamma, psi, diff, log, euler, pi, sqrt, quad, exp, inf

mp.dps = 50


def moment(q1, q2, n):
    # E[P(x)^q1 P(y)^q2], x != y, Haar on U(n)
    return gamma(n) * gamma(q1 + 1) * gamma(q2 + 1) / gamma(q1 + q2 + n)


def cov(q1, q2, n):
    return moment(q1, q2, n) - moment(q1, 0, n) * moment(q2, 0, n)


def plogp_cov(n):
    # d^2/da db of E[P^a P^b] at a=b=1 minus (d/dq E[P^q] at 1)^2
    joint = diff(lambda a, b: moment(a, b, n), (1, 1), (1, 1))
    single = diff(lambda q: moment(q, 0, n), 1)
    return joint - single ** 2


def gi_cov(i, n):
    i = mpf(i)
    return (cov(i + 1, i + 1, n) - 2 * cov(i + 1, 1, n) + cov(1, 1, n)) / i ** 2


def e3(n):
    L = log(n)
    g = euler
    return (-L ** 2 - 2 * g * L + 4 * L - g ** 2 + 4 * g - 4) / mpf(n) ** 3


out = []
out.append(("loggamma(0.5)", loggamma(mpf("0.5"))))
out.append(("loggamma(3.7)", loggamma(mpf("3.7"))))
out.append(("loggamma(0.01)", loggamma(mpf("0.01"))))
out.append(("loggamma(150.25)", loggamma(mpf("150.25"))))
out.append(("loggamma(1e5+0.5)", loggamma(mpf("100000.5"))))
out.append(("digamma(0.3)", psi(0, mpf("0.3"))))
out.append(("digamma(7.25)", psi(0, mpf("7.25"))))
out.append(("digamma(1025)", psi(0, mpf(1025))))
out.append(("trigamma(0.3)", psi(1, mpf("0.3"))))
out.append(("trigamma(7.25)", psi(1, mpf("7.25"))))
out.append(("trigamma(1026)", psi(1, mpf(1026))))
out.append(("cov(2,2,2)", cov(2, 2, 2)))
out.append(("cov(0.5,1.5,8)", cov(mpf("0.5"), mpf("1.5"), 8)))
out.append(("cov(3,1,256)", cov(3, 1, 256)))
out.append(("cov(0.01,0.02,256)", cov(mpf("0.01"), mpf("0.02"), 256)))
out.append(("moment(2.5,0.5,16)", moment(mpf("2.5"), mpf("0.5"), 16)))
for n in (4, 8, 16, 64, 1024):
    out.append((f"plogp_cov({n})", plogp_cov(n)))
for n in (8, 16, 64):
    for i in ("1e-2", "1e-3", "1e-4"):
        out.append((f"gi_cov({i},{n})", gi_cov(mpf(i), n)))
out.append(("e3(1024)", e3(1024)))
# exact Beta(1, N-1) expectations
for n in (4, 1024):
    out.append((f"E[-ln p] N={n}", quad(lambda p: -log(p) * (n - 1) * (1 - p) ** (n - 2), [0, mpf(1) / n, 1])))
    out.append((f"E[p ln p] N={n}", quad(lambda p: p * log(p) * (n - 1) * (1 - p) ** (n - 2), [0, mpf(1) / n, 1])))
    m = quad(lambda p: p * log(p) * (n - 1) * (1 - p) ** (n - 2), [0, mpf(1) / n, 1])
    v = quad(lambda p: (p * log(p)) ** 2 * (n - 1) * (1 - p) ** (n - 2), [0, mpf(1) / n, 1]) - m ** 2
    out.append((f"sigma[p ln p] N={n}", sqrt(v)))
    m = quad(lambda p: -log(p) * (n - 1) * (1 - p) ** (n - 2), [0, mpf(1) / n, 1])
    v = quad(lambda p: log(p) ** 2 * (n - 1) * (1 - p) ** (n - 2), [0, mpf(1) / n, 1]) - m ** 2
    out.append((f"sigma[-ln p] N={n}", sqrt(v)))
# Porter-Thomas expectations on [0, inf)
n = 1024
m = quad(lambda p: p * log(p) * n * exp(-n * p), [0, mpf(1) / n, inf])
v = quad(lambda p: (p * log(p)) ** 2 * n * exp(-n * p), [0, mpf(1) / n, inf]) - m ** 2
out.append(("PT E[p ln p] N=1024", m))
out.append(("PT sigma[p ln p] N=1024", sqrt(v)))
for name, val in out:
    print(f"{name:28s} {mp.nstr(val, 20)}")
