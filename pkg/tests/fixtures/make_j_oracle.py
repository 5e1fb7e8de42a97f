"""Regenerate j_oracle.json: q-expansion of j = E4^3 / Delta by brute force.

Independent of the package: E4 from divisor sums, Delta as q * prod (1 - q^n)^24
multiplied out term by term, then power-series division.  Run from this
directory with ``python make_j_oracle.py``.
"""
import json

TERMS = 10  # coefficients of q^-1 .. q^8
M = TERMS + 1


def mul(a, b):
    out = [0] * M
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b[: M - i]):
                out[i + j] += x * y
    return out


e4 = [1] + [240 * sum(d ** 3 for d in range(1, n + 1) if n % d == 0) for n in range(1, M)]
e4_cubed = mul(mul(e4, e4), e4)

# Delta / q = prod_{n >= 1} (1 - q^n)^24
eta24 = [1] + [0] * (M - 1)
for n in range(1, M):
    factor = [0] * M
    factor[0], factor[n] = 1, -1
    for _ in range(24):
        eta24 = mul(eta24, factor)

# j * q = E4^3 / (Delta / q); eta24[0] == 1 so the division is exact over Z
quot = []
rem = list(e4_cubed)
for k in range(TERMS):
    c = rem[k]
    quot.append(c)
    for i in range(k, M):
        if i - k < M:
            rem[i] -= c * eta24[i - k]

with open("j_oracle.json", "w") as fh:
    json.dump({"val": -1, "coeffs": quot, "method": "E4^3/Delta, brute force"}, fh, indent=1)
print(quot)
