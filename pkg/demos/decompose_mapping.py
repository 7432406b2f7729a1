"""
Decomposing a mapping
=====================

A mapping of {1, ..., n} into itself is a directed graph in which every
vertex has out-degree one.  Each connected component is a cycle with a
rooted tree hanging off every cyclic vertex.
"""

from mapstat import decompose, extremal_stats, validate_mapping

# 1 -> 2 -> 3 -> 1 is a 3-cycle; 4 and 5 feed into 1; 6 is a fixed point
T = validate_mapping([2, 3, 1, 1, 1, 6])
d = decompose(T, members=True)

for k, comp in enumerate(d.components):
    print(f"component {k}: cycle {comp.cycle}, size {comp.size}")
    for tree in comp.trees:
        print(f"    tree rooted at {tree.root}: {tree.members}")

# ranked sizes; ties among equal sizes go to the smaller label
st = extremal_stats(d)
print("component sizes:", st.component_sizes_desc)
print("tree sizes:     ", st.tree_sizes_desc)
print("mu =", st.mu, " tau_1 =", st.tau(1), " largest tree inside the largest component:", st.in_largest(1))
