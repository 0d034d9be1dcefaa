"""Recovering block order from the graph of a power.

A random small derivation is raised to an idempotent power tau, and the
product of n renamed copies of tau is formed.  The lab decides for every
pair of vertices whether the first sits in an earlier-or-equal copy,
looking only at adjacency, cells and copy index mod 7, then checks each
decision against the true copy labels.
"""
from cwforge.orderlab import claims_suite, interpret_block_order_in_component, power_context

ctx = power_context(k=2, n=12, seed=68, max_base=4, max_vertices=8)
print(f"{len(ctx.verts)} vertices in {ctx.n} copies; essential cells {len(ctx.L)}, "
      f"social cells {len(ctx.M)}, flip components {len(ctx.h_components)}, clusters {len(ctx.clusters)}")
for line in claims_suite(ctx).lines():
    print(" ", line)

F = max(ctx.h_components, key=len)
rel = interpret_block_order_in_component(F, ctx)
b = ctx.product.block_of
print(f"\nlargest flip component has {len(F)} vertices; recovered order of its first few:")
for u in rel.ids[:6]:
    later = sorted({b[v] for v in rel.ids if rel.holds(u, v)})
    print(f"  vertex {u} (copy {b[u]}) precedes-or-equals vertices in copies {later}")
