"""The quantum membrane cycle, audited by two observers.

A wily colleague mixes two gases tatiana considers indistinguishable and
extracts ln 2 of work.  Tatiana separates, rotates, and repartitions until
everything looks exactly like the start: for her the cycle closed while
absorbing about 0.277 of net heat, an apparent second-law violation.  At
full resolution the cycle never closed, and actually closing it flips the
balance to -0.416.
"""

from qgas import run_demo

print("=== from the coarse observer's side ===")
result = run_demo("peres-tatiana")
for event in result.ledger.events:
    print(f"  step {event.step_index}: {event.kind:<10}"
          f" Q={event.heat_absorbed_by_gas:+.6f}  {event.description}")
print()
for verdict in result.verdicts:
    print(f"  {verdict.observer}: cycle_closed={verdict.cycle_closed},"
          f" Q/T={verdict.q_over_t:+.7f}, {verdict.classification}")

print()
print("tatiana's books say a closed cycle absorbed net heat, which the")
print("Clausius inequality forbids.  The full-resolution audit of the same")
print("ledger shows why: her 'closed' cycle is open.")

print()
print("=== closing the cycle for real ===")
result = run_demo("peres-willard")
closing = [e for e in result.ledger.events if e.step_index >= 8]
for event in closing:
    print(f"  step {event.step_index}: {event.kind:<10}"
          f" Q={event.heat_absorbed_by_gas:+.6f}  {event.description}")
print()
for verdict in result.verdicts:
    print(f"  {verdict.observer}: cycle_closed={verdict.cycle_closed},"
          f" Q/T={verdict.q_over_t:+.7f}, {verdict.classification}")

print()
print("sorting the species back out costs ln 2 again, so the completed")
print("cycle nets Q/T = -0.416 <= 0: the second law holds, strictly, and")
print("the only irreversible step was the coarse separation.")
