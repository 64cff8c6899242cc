# Zipper oracle
