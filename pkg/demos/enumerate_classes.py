"""Walk the cycle-class enumeration that powers the exact oracles.

Lists every dominant class at l = 4 with its Dyck word and bipartite
index, then reconciles the two histograms the test suite pins down:
first-vertex multiplicities and the Narayana split.
"""
from rmtlab.combinat import catalan, narayana_count
from rmtlab.cycles import (
    bipartite_class_counts,
    dominant_classes,
    first_vertex_multiplicity_histogram,
    mark_edges,
    to_dyck_path,
)

L = 4

print(f"Dominant classes at l = {L} (expected count C_{L} = {catalan(L)})")
for index, walk in enumerate(dominant_classes(L)):
    dyck = "".join("+" if s == 1 else "-" for s in to_dyck_path(mark_edges(walk)))
    split = len(set(walk[::2])) - 1
    word = "-".join(str(v) for v in walk)
    print(f"  {index:2d}  {word:<18} dyck {dyck}  bipartite index {split}")
print()

hist = first_vertex_multiplicity_histogram(L)
print(f"First-vertex multiplicity histogram: {hist}")
print(f"  slot 1 equals C_{L - 1} = {catalan(L - 1)}")
print()

counts = bipartite_class_counts(L)
narayana = {i: narayana_count(L, i) for i in range(L)}
print(f"Bipartite split histogram:  {counts}")
print(f"Narayana row for p = {L}:   {narayana}")
