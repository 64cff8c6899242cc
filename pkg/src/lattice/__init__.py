# Lattice paths
