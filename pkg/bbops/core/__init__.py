# Numerical core of bbops
