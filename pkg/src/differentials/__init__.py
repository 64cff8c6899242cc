# Factorized quadratic differentials
