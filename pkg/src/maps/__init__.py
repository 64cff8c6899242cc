# Explicit slit maps
