"""Regenerates oracles.json with mpmath at 60 significant digits.

    python3 generate.py > oracles.json
"""
import json
import mpmath as mp

mp.mp.dps = 60


def ml(beta, gamma, z, terms=2000):
    beta, gamma, z = mp.mpf(beta), mp.mpf(gamma), mp.mpf(z)
    s = mp.mpf(0)
    for n in range(terms):
        t = z**n / mp.gamma(n * beta + gamma)
        s += t
        if n > 10 and abs(t) < mp.mpf(10) ** (-70):
            break
    return s


def b(alpha, j):
    return mp.mpf(j) ** (1 + mp.mpf(alpha)) / mp.gamma(2 + mp.mpf(alpha))


def w(alpha, i):
    return b(alpha, i + 1) - 2 * b(alpha, i) + b(alpha, i - 1)


def recurrence(alpha, mu, tau, y0, source, k_max):
    y = [mp.mpf(y0)]
    for k in range(k_max):
        hist = sum(w(alpha, k + 1 - j) * y[j] for j in range(1, k + 1))
        y.append((y[k] + source - mu * hist) / (1 + mu * b(alpha, 1)))
    return y


def f(x):
    return float(x)


out = {}
out["gamma"] = [[x, f(mp.gamma(x))] for x in [0.5, 1.0, 2.5, 0.1, 7.3, 33.7, 150.2]]
out["mittag_leffler"] = [
    [be, ga, z, f(ml(be, ga, z))]
    for (be, ga, z) in [(1.5, 1.0, -1.0), (1.5, 2.0, -1.0), (1.4, 1.0, -float(mp.pi**2)),
                        (1.8, 1.0, -10.0), (1.2, 1.0, -30.0), (0.7, 1.0, -4.0), (1.5, 2.0, -8.0)]
]

# first load entry of x^-0.49 against the hat at x = h, M = 8
p, h = mp.mpf("-0.49"), mp.mpf(1) / 8
load1 = mp.quad(lambda x: x**p * x / h, [0, h]) + mp.quad(lambda x: x**p * (2 - x / h), [h, 2 * h])
out["power_load_first"] = {"p": -0.49, "m": 8, "value": f(load1)}

out["scalar_hom"] = {"alpha": 0.5, "mu": 1.0, "xi0": 1.0,
                     "y": [f(v) for v in recurrence(0.5, 1, 1, 1, 0, 3)]}
out["scalar_forced"] = {"alpha": 0.3, "mu": 1.0, "tau": 0.1,
                        "y": [f(v) for v in recurrence(0.3, 1, mp.mpf("0.1"), 0, mp.mpf("0.1"), 4)]}

# H_50 = sum_{j=1}^{50} w_{51-j} U_j with U_j = sin(j), alpha = 0.5
out["history_sum"] = {"alpha": 0.5, "k": 50,
                      "value": f(sum(w(0.5, 51 - j) * mp.sin(j) for j in range(1, 51)))}

out["fourier_power"] = {"p": -0.49, "coeffs": [
    f(mp.sqrt(2) * mp.quad(lambda x: x ** mp.mpf("-0.49") * mp.sin(n * mp.pi * x), mp.linspace(0, 1, n + 1)))
    for n in range(1, 6)]}

print(json.dumps(out, indent=1))
