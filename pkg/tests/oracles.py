"""Independent reference computations used by the tests.

Everything here works on plain Python lists and bit arithmetic so it shares
no code path with the numpy kernels under test.
"""
import math

import mpmath


def bit(i, k):
    return (i >> k) & 1


def dense_apply(amps, targets, controls, u):
    """Apply matrix ``u`` (nested lists) by explicit summation over basis states."""
    dim = len(u)
    out = [0j] * len(amps)
    for i, a in enumerate(amps):
        if a == 0:
            continue
        if not all(bit(i, c) for c in controls):
            out[i] += a
            continue
        col = sum(bit(i, t) << j for j, t in enumerate(targets))
        base = i
        for t in targets:
            base &= ~(1 << t)
        for row in range(dim):
            j = base | sum(bit(row, b) << t for b, t in enumerate(targets))
            out[j] += u[row][col] * a
    return out


def marginal(amps, register, value):
    total = 0.0
    for i, a in enumerate(amps):
        if all(bit(i, q) == bit(value, j) for j, q in enumerate(register)):
            total += abs(a) ** 2
    return total


def overlap_success_brute(amps, n, tau, omega):
    """Sum |amp|^2 over outcomes whose low n bits are tau and high bits in omega."""
    omega = set(omega)
    total = 0.0
    for i, a in enumerate(amps):
        if i % (1 << n) == tau and (i >> n) in omega:
            total += abs(a) ** 2
    return total


def grover_success_mp(N, t):
    theta = mpmath.asin(1 / mpmath.sqrt(N))
    return float(mpmath.sin((2 * t + 1) * theta) ** 2)


def argmax_success(N, t_max):
    best_t, best = 0, -1.0
    for t in range(t_max + 1):
        p = grover_success_mp(N, t)
        if p > best + 1e-12:
            best_t, best = t, p
    return best_t


def identification_brute(states_amps, n, measured):
    """(1/N) * sum over outcomes of max_d P(outcome | d), by explicit dictionaries."""
    N = 1 << n
    tables = []
    for amps in states_amps:
        table = {}
        for i, a in enumerate(amps):
            key = tuple(bit(i, q) for q in measured)
            table[key] = table.get(key, 0.0) + abs(a) ** 2
        tables.append(table)
    keys = set().union(*tables)
    return sum(max(t.get(k, 0.0) for t in tables) for k in keys) / N


def query_estimate_mp(n, m, p):
    return mpmath.asin(mpmath.sqrt(mpmath.mpf(2) ** -p)) * mpmath.sqrt(mpmath.mpf(2) ** (n + m))


def post_copy_amplitudes(n, d, M):
    """Amplitudes of the copied state written down from basis-state labels."""
    N = 1 << n
    q = n + 1 + M * n
    amps = [0j] * (1 << q)
    for i in range(N):
        if i != d:
            amps[i] = 1 / math.sqrt(N)
    index = d | (1 << n)
    for j in range(M):
        index |= d << (n + 1 + j * n)
    amps[index] = 1 / math.sqrt(N)
    return amps
