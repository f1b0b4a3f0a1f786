"""Reference values generated by tests/mp_oracle.py (mpmath, 450 digits)."""

# (q, alpha, k) -> j_alpha(q**k; q**2)
J_ALPHA = {
    (0.5, 0.0, 0): 0.58665286961127967697,
    (0.5, 0.0, -3): -0.00035089124953259594578,
    (0.5, 0.5, 2): 0.97629278037588493169,
    (0.5, 0.5, -4): 7.0916886435458765195e-8,
    (0.5, 1.5, -6): 9.0466313092176350056e-19,
    (0.5, 3.5, -10): 6.5423308248070028492e-55,
    (0.8, 0.0, -20): 2.0699606522783383821e-40,
    (0.8, 1.5, -34): 1.7217379505857703952e-125,
    (0.8, 0.5, -40): 8.840207494719739931e-163,
    (0.8, 2.5, 5): 0.77839224178818889983,
}

# (q, alpha, n, s) -> generalized kernel at x = q**s
KERNEL = {
    (0.5, 0.5, 1, 1): 0.24464621129994806827,
    (0.5, 1.5, 2, -2): 176.11230306343136074,
    (0.8, 1.5, 1, -12): -2.9333668724512004528e-16,
    (0.8, 0.5, 0, -30): 5.2682905589901874714e-93,
}

# (q, alpha, n) -> normalizing constant
C_V = {
    (0.5, 0.0, 0): 2.0,
    (0.5, 1.0, 0): 2.6666666666666666667,
    (0.5, 0.5, 1): 0.49226730451743584539,
    (0.5, 1.5, 2): 0.0056584900044615017081,
    (0.8, 1.5, 1): 12.790207509117503991,
    (0.8, 0.0, 0): 5.0000000000000011102,
}

# (a, q) -> (a; q)_inf
POCH_INF = {
    (0.5, 0.5): 0.28878809508660242128,
    (0.25, 0.8): 0.25937197707677381501,
    (-0.3, 0.6): 1.9922519862590985319,
}

# q -> 1 / (q; q**2)_inf**2
KERNEL_BOUND = {
    0.5: 5.6845575997959937173,
    0.8: 810.04413585103364637,
}
