"""Index tables shared by both kernel backends."""

# bicubic basis, in the order used for 16-coefficient polynomials: (x power, y power)
BASIS_2D: tuple[tuple[int, int], ...] = (
    (0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1),
    (1, 2), (0, 3), (3, 1), (2, 2), (1, 3), (3, 2), (2, 3), (3, 3),
)  # fmt: skip

# HORNER_2D[b] = positions of x^3 y^b, x^2 y^b, x y^b, y^b in the bicubic basis
HORNER_2D = tuple(tuple(BASIS_2D.index((a, b)) for a in (3, 2, 1, 0)) for b in range(4))
