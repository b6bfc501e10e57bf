"""Independent reference values for the frozen acceptance fixtures.

Plain Python and numpy, sharing no code with the crate. Prints one JSON
object; the constants in tests/acceptance.rs were copied from its output.

    python3 tests/oracles/freeze.py
"""

import json
import math

import numpy as np

MERTENS = 0.2614972128


def omega_table(n):
    """omega(k) for 0 <= k <= n via smallest prime factors."""
    spf = np.zeros(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if spf[p] == 0:
            spf[p::p][spf[p::p] == 0] = p
    om = np.zeros(n + 1, dtype=np.int64)
    for k in range(2, n + 1):
        p = spf[k]
        m = k
        while m % p == 0:
            m //= p
        om[k] = om[m] + 1
    return om


def phi(x):
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def ek_stats(om, n):
    hist = np.bincount(om[2 : n + 1], minlength=32)
    count = int(hist.sum())
    s1 = int(sum(k * int(c) for k, c in enumerate(hist)))
    s2 = int(sum(k * k * int(c) for k, c in enumerate(hist)))
    mean = s1 / count
    var = (s2 * count - s1 * s1) / (count * count)
    ll = math.log(math.log(n))
    cdf = 0.0
    ks = 0.0
    for k, c in enumerate(hist):
        t = (k - ll) / math.sqrt(ll)
        left = cdf
        cdf += int(c) / count
        ks = max(ks, abs(left - phi(t)), abs(cdf - phi(t)))
    return {
        "count": count,
        "sum_omega": s1,
        "mean": mean,
        "variance": var,
        "loglog": ll,
        "ks": ks,
        "hist": [int(c) for c in hist[:12]],
    }


def tv_against(om, n):
    hist = np.bincount(om[2 : n + 1], minlength=32).astype(float)
    emp = hist / hist.sum()
    lam = math.log(math.log(n)) + MERTENS
    kmax = 200
    pois = [math.exp(-lam + k * math.log(lam) - math.lgamma(k + 1)) for k in range(kmax)]
    q = lam / (1 + lam)
    geom = [(1 - q) * q**k for k in range(kmax)]
    e = list(emp) + [0.0] * (kmax - len(emp))
    return {
        "lambda": lam,
        "tv_poisson": 0.5 * sum(abs(a - b) for a, b in zip(e, pois)),
        "tv_geometric": 0.5 * sum(abs(a - b) for a, b in zip(e, geom)),
    }


def gamma_len(m):
    return 2 * (m.bit_length() - 1) + 1


def delta_len(m):
    b = m.bit_length() - 1
    return gamma_len(b + 1) + b


def read_gamma(bits, i):
    z = 0
    while i < len(bits) and bits[i] == "0":
        z += 1
        i += 1
    if i + z + 1 > len(bits):
        return None, i
    return int(bits[i : i + z + 1], 2), i + z + 1


def read_delta(bits, i):
    length, i = read_gamma(bits, i)
    if length is None or i + length - 1 > len(bits):
        return None, i
    return int("1" + bits[i : i + length - 1], 2), i + length - 1


def decode(machine, bits):
    """('ok', output) | ('dangling',) | ('bad',) for a whole program."""
    read = read_delta if machine == "U2" else read_gamma
    if not bits:
        return ("dangling",)
    literal = (bits[0] == "1") if machine == "U2" else (bits[0] == "0")
    i = 1
    if literal:
        v, i = read(bits, i)
        if v is None or i + v - 1 > len(bits):
            return ("dangling",)
        out = bits[i : i + v - 1]
        i += v - 1
    else:
        k, i = read(bits, i)
        if k is None:
            return ("dangling",)
        v, i = read(bits, i)
        if v is None:
            return ("dangling",)
        if v == 1:
            return ("bad",)
        if i + v - 1 > len(bits):
            return ("dangling",)
        out = bits[i : i + v - 1] * k
        i += v - 1
    return ("ok", out) if i == len(bits) else ("bad",)


def k_closed(machine, x):
    code = delta_len if machine == "U2" else gamma_len
    n = len(x)
    best = 1 + code(n + 1) + n
    for d in range(1, n + 1):
        if n % d == 0 and x[:d] * (n // d) == x:
            best = min(best, 1 + code(n // d) + code(d + 1) + d)
    return best


def invariance(n_max):
    gaps = []
    for n in range(n_max + 1):
        worst = 0
        for v in range(2**n):
            x = format(v, "b").zfill(n) if n else ""
            worst = max(worst, abs(k_closed("U1", x) - k_closed("U2", x)))
        gaps.append(worst)
    return gaps


def enumerate_programs(machine, cutoff):
    """(program length, output) for every program of at most cutoff bits."""
    found = []
    stack = [""]
    while stack:
        p = stack.pop()
        r = decode(machine, p)
        if r[0] == "ok":
            found.append((len(p), r[1]))
        elif r[0] == "dangling" and len(p) < cutoff:
            stack += [p + "0", p + "1"]
    return found


def levin_values():
    from fractions import Fraction

    from scipy.stats import spearmanr

    out = {}
    for machine in ("U1", "U2"):
        progs = enumerate_programs(machine, 22)
        out[machine + "_kraft"] = [
            str(sum(Fraction(1, 2**l) for l, _ in progs if l <= c)) for c in range(23)
        ]
    progs = enumerate_programs("U1", 22)
    mass = {}
    for l, x in progs:
        mass[x] = mass.get(x, 0) + 2 ** (22 - l)
    xs = [format(v, "b").zfill(n) if n else "" for n in range(11) for v in range(2**n)]
    rho = spearmanr(
        [k_closed("U1", x) for x in xs],
        [-math.log2(mass[x] / 2**22) if x in mass else math.inf for x in xs],
    ).statistic
    out["coding_theorem_spearman_u1_10_22"] = float(rho)
    # U0: any extension of a U1 program runs that program
    out["u0_empty_partial_sums"] = []
    for cutoff in range(2, 9):
        total = Fraction(0)
        for l, x in enumerate_programs("U1", cutoff):
            if x == "":
                total += Fraction(cutoff - l + 1, 2**l)
        out["u0_empty_partial_sums"].append(str(total))
    return out


def learn(om, primes, n, task, lr=1.0, epochs=1000, ablate=False):
    ks = np.arange(2, n + 1)
    width = n.bit_length()
    x = ((ks[:, None] >> np.arange(width)) & 1).astype(float)
    if ablate:
        x[:, 0] = 0.0
    if task == "prime":
        y = primes[2 : n + 1]
    else:
        y = om[2 : n + 1] > math.log(math.log(n))
    y = y.astype(float)
    cut = int(math.floor(n * 0.8)) - 2
    xt, yt, xs, ys = x[:cut], y[:cut], x[cut:], y[cut:]
    w = np.zeros(width)
    b = 0.0
    for _ in range(epochs):
        z = xt @ w + b
        r = 1.0 / (1.0 + np.exp(-z)) - yt
        w -= lr * (xt.T @ r) / len(yt)
        b -= lr * r.mean()

    def metrics(xm, ym):
        p = 1.0 / (1.0 + np.exp(-(xm @ w + b)))
        return _metrics(p, ym)

    rate = yt.mean()
    base = _metrics(np.full(len(ys), rate), ys)
    base["accuracy"] = base["baseline_accuracy"]
    return {
        "train": metrics(xt, yt),
        "test": metrics(xs, ys),
        "baseline": base,
        "train_rate": rate,
    }


def _metrics(p, y):
    q = np.clip(p, 1e-15, 1 - 1e-15)
    pred = p >= 0.5
    yb = y > 0.5
    tp = int(np.sum(pred & yb))
    tn = int(np.sum(~pred & ~yb))
    fp = int(np.sum(pred & ~yb))
    fn = int(np.sum(~pred & yb))
    den = math.sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn))
    rate = yb.mean()
    return {
        "accuracy": (tp + tn) / len(y),
        "log_loss_bits": float(-np.mean(np.where(yb, np.log2(q), np.log2(1 - q)))),
        "mcc": (tp * tn - fp * fn) / den if den > 0 else 0.0,
        "baseline_accuracy": max(rate, 1 - rate),
        "mean_predicted_rate": float(p.mean()),
    }


def main():
    n = 10**6
    om = omega_table(n)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    out = {
        "pi_1e6": int(sieve.sum()),
        "sum_floor_1e5": sum(10**5 // p for p in range(2, 10**5 + 1) if sieve[p]),
        "ek_1e4": ek_stats(om, 10**4),
        "ek_1e6": ek_stats(om, 10**6),
        "maxent_1e6": tv_against(om, n),
        "invariance_gap_by_length_12": invariance(12),
        "levin": levin_values(),
    }
    prime = learn(om, sieve, n, "prime")
    prime_ablated = learn(om, sieve, n, "prime", ablate=True)
    out["learn_prime"] = prime
    out["learn_prime_ablated_test"] = prime_ablated["test"]
    out["learn_ek"] = learn(om, sieve, n, "ek")
    print(json.dumps(out, indent=1))


if __name__ == "__main__":
    main()
