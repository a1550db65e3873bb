"""The four graph utility families and their access oracles.

One toy graph, four readings of "how useful is node i to node j":
shrinking with distance, shrinking with distance rank, plain
reachability, and the largest edge lifetime that keeps j reachable.
Reverse sorted access streams items for one element by non-increasing
utility; the pruned forward search lists where an item still gains.
"""

from infmax import (
    AggregationSpec,
    Alpha,
    DigestTable,
    GraphInstanceSet,
    UtilityFamily,
    add_seed,
    forward_search,
    pairwise_utility,
    rev_sorted_stream,
)

#      0 --2.0--> 1 --1.0--> 2
#      0 --0.5--> 2          3 --3.0--> 1
edges = [(0, 1, 2.0), (1, 2, 1.0), (0, 2, 0.5), (3, 1, 3.0)]
inst = GraphInstanceSet(4, [edges])

families = {
    "distance (alpha = 1/x)": UtilityFamily("distance", Alpha.inverse()),
    "reverse rank (1/rank) ": UtilityFamily("reverse_rank", Alpha.inverse()),
    "reachability          ": UtilityFamily("reachability"),
    "survival threshold    ": UtilityFamily("survival"),
}

print("pairwise utility of item i (rows) to element j (columns):")
for name, fam in families.items():
    print(f"\n{name}")
    header = "      " + "".join(f"  j={j}" for j in range(4))
    print(header)
    for i in range(4):
        row = "".join(f" {pairwise_utility(inst, fam, i, j):>4.2f}" for j in range(4))
        print(f"  i={i}{row}")

fam = families["distance (alpha = 1/x)"]
print("\nreverse sorted access for element 2 (items by non-increasing utility):")
stream = rev_sorted_stream(inst, fam, 2)
while (t := stream.pop()) is not None:
    print(f"  item {t[0]} with utility {t[1]:.3f}")

print("\nforward search from node 0 before and after seeding node 1:")
digests = DigestTable(inst.n_elements, AggregationSpec.maximum())
print("  before:", list(forward_search(inst, fam, 0, digests)))
gain = add_seed(inst, fam, 1, digests)
print(f"  seeding node 1 gains {gain:.3f}")
stream = forward_search(inst, fam, 0, digests)
print("  after :", list(stream), f"({stream.visited} nodes settled, rest pruned)")
