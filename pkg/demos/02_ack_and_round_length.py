"""From channel erasures to ACK times and the cost of a schedule.

Shows the ACK probability curve over the lossy channel, the full round-length
law with its failure atom at n, and how a sub-block schedule's expected
symbol count and throughput come out of it.
"""

import numpy as np

from harqsdo import (
    CodeParams,
    Schedule,
    ack_prob,
    asymptotic_round_moments,
    expected_round_symbols,
    round_length_law,
    round_length_moments,
    throughput,
)

params = CodeParams(k=8, n=24, epsilon=0.5)

print(f"ACK-by-time-t curve for k={params.k}, n={params.n}, eps={params.epsilon}")
for t in range(params.k, params.n + 1, 2):
    a = ack_prob(params, t)
    print(f"  t={t:2d}  P_ack={a:7.4f}  {'#' * int(40 * a)}")

law = round_length_law(params)
atom = float(law.pmf[-1])
print(f"\nround-length law: mass below n = {1 - atom:.4f}, atom at n = {atom:.4f}")
mm = round_length_moments(params)
print(f"finite-n moments: mean={mm.mean:.4f}, variance={mm.variance:.4f}")
asym = asymptotic_round_moments(params.k, params.epsilon)
print(f"large-n limits : mean={asym.mean:.4f}, variance={asym.variance:.4f}")

print("\nschedules over the same code, from one shot to symbol-by-symbol:")
for schedule in (
    Schedule((24,)),
    Schedule((16, 24)),
    Schedule((16, 20, 24)),
    Schedule(tuple(range(params.k, 25))),
):
    cost = expected_round_symbols(params, schedule)
    rate = throughput(params, schedule)
    label = f"m={schedule.m}"
    print(f"  {label:5s} boundaries={schedule.boundaries[:4]}"
          f"{'...' if schedule.m > 4 else ''}  E[symbols]={cost:7.3f}  T={rate:.4f}")
print("\nmore feedback opportunities -> fewer wasted symbols -> higher throughput")
