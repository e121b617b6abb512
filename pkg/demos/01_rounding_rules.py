"""Walk through the five rounding rules on half-integer inputs.

Half-integers are where the rules disagree; everywhere else the two
nearest-integer rules coincide and the directed rules just bracket the
value. Run with: python3 demos/01_rounding_rules.py
"""

from nnround import ALL_RULES, round_value

HALF_INTEGERS = [11.5, 12.5, -11.5, -12.5]

header = f"{'input':>8} | " + " | ".join(f"{r.display_name:>5}" for r in ALL_RULES)
print(header)
print("-" * len(header))
for x in HALF_INTEGERS:
    cells = " | ".join(f"{round_value(x, r):>5}" for r in ALL_RULES)
    print(f"{x:>8} | {cells}")

print()
print("On non-halves, 'round' and 'even' agree with ordinary nearest-integer:")
for x in [2.3, 2.7, -2.3, -2.7]:
    values = {r.display_name: round_value(x, r) for r in ALL_RULES}
    print(f"  {x:>5} -> {values}")
