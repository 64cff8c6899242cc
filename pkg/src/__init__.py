# Loewner driving functions of quadratic-differential trajectory slits
