"""Output width stops growing with input length.

For a fixed k the decomposer's width depends on the factorization depth,
and that depth saturates; longer words therefore cost time, not colors.
"""
import time

from cwforge.decomposer import decompose, width_bound
from cwforge.generators import GenSpec, gen_word

K = 2
print(f"k={K}; construction bound for any depth >= 2: {width_bound(K, 2)}")
print(f"{'length':>7} {'width':>6} {'depth':>6} {'seconds':>8}")
for n in (20, 100, 500, 2000, 5000):
    t0 = time.perf_counter()
    r = decompose(gen_word(GenSpec(K, n, seed=n)))
    print(f"{n:7d} {r.width:6d} {r.forest_depth:6d} {time.perf_counter() - t0:8.2f}")

r = decompose(gen_word(GenSpec(K, 1000, seed=1)), mode="colors")
print("\ncolor-only node outputs instead of cell codes, per-level widths:", r.per_level_widths)
