"""Worked data sets: the hexagonal genus-2 curve and the Trott quartic.

Numeric matrices are copied at the printed precision (about 10 digits)."""
import math

import numpy as np

PI = math.pi

# y^2 = x^6 - 1 with the differentials 2 dx/f_y, 2x dx/f_y
GENUS2_CURVE = {"f": "y^2 - x^6 + 1", "basis": ["2", "2*x"]}

GENUS2_B = 2 * PI / math.sqrt(3) * np.array([[-2.0, 1.0], [1.0, -2.0]])

GENUS2_PA = np.array([[1.2143253j, 1.0516366 + 0.6071627j],
                      [-1.2143253, -0.6071627 - 1.0516366j]])

# adapted (U, V, W) at the point (2, sqrt 63), as printed
GENUS2_POINT = {
    "U": [0.133702 + 0.111777j, -0.059901 - 0.119802j],
    "V": [-0.151861 - 0.140376j, 0.091278 + 0.122654j],
    "W": [0.131964 + 0.13077j, -0.094538 - 0.09780j],
}
GENUS2_CD = (0.02546003 + 0.15991389j, 0.00437723 + 0.00078777j)

TROTT_F = "144*(x^4+y^4) - 225*(x^2+y^2) + 350*x^2*y^2 + 81"
TROTT_CURVE = {"f": TROTT_F, "basis": ["x", "y", "1"]}

TROTT_B = -2 * PI * np.array([
    [1.57412534343470, -0.671587878369476, -0.230949586695748],
    [-0.671587878369476, 1.57412534206005, -0.671587878369476],
    [-0.230949586695747, -0.671587878369476, 1.57412534343470]])

TROTT_PA = 1j * np.array([[0.01384015942, 0.02768031884, 0.01384015942],
                          [0.01384015941, 0.0, -0.01384015941],
                          [0.02348847438, 0.0, 0.02348847438]])

# exact point on the Trott threefold in the (x, y, 1) basis; c, d to be fitted
TROTT_RAW_POINT = {
    "U": [0, -1 / 126, -1 / 126],
    "V": [-1 / 126, 0, 0],
    "W": [0, -1550 / 55566, -1325 / 37044],
}


def adapted_trott_point():
    """(U, V, W) of the raw Trott point under 2 pi i Pa^{-1}."""
    M = 2j * PI * np.linalg.inv(TROTT_PA)
    return tuple(M @ np.array(TROTT_RAW_POINT[k], dtype=complex) for k in "UVW")

