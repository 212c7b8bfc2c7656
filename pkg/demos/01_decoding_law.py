"""How many symbols does a random binary code need before it decodes?

Walks the exact success law, the induced pmf of the decode point, and the
number-theoretic constants its moments converge to.
"""

from harqsdo import (
    decodable_count_moments,
    decodable_count_pmf,
    decode_success_prob,
    dst_constant,
    erdos_borwein_constant,
    overhead_moment,
)

k, n = 4, 12

print(f"success probability vs received symbols r (k={k}, n={n})")
for r in range(k - 1, n + 1):
    bar = "#" * int(40 * decode_success_prob(k, n, r))
    print(f"  r={r:2d}  P_s={decode_success_prob(k, n, r):8.5f}  {bar}")

print(f"\npmf of the decode point (sums to "
      f"{sum(decodable_count_pmf(k, n, r) for r in range(k, n + 1)):.12f})")
for r in range(k, k + 6):
    print(f"  needs {r:2d} symbols with prob {decodable_count_pmf(k, n, r):.6f}")

c0 = erdos_borwein_constant()
c1 = dst_constant()
print(f"\nErdos-Borwein constant c0 = {c0:.10f}")
print(f"digital search tree constant c1 = {c1:.10f}")
print(f"overhead moments: {overhead_moment(0):.6f}, {overhead_moment(1):.10f}, "
      f"{overhead_moment(2):.10f}")

print("\nmean decode point converges to k + c0 as n grows:")
for extra in (2, 4, 8, 16, 32, 64):
    mm = decodable_count_moments(k, k + extra)
    print(f"  n=k+{extra:<3d} mean={mm.mean:.10f}  gap={mm.mean - k - c0:+.2e}  "
          f"variance={mm.variance:.10f} (limit {c0 + c1:.10f})")
