"""Built-in named tables used by the CLI, docs, and tests."""

import math

from .errors import PolygonError
from .polygon import build_polygon


def square():
    """Unit square in the plane; side 1 is the bottom, side 3 the top."""
    return build_polygon(0, [(0, 0), (1, 0), (1, 1), (0, 1)])


def hyperbolic_pentagon():
    """Regular right-angled pentagon centered at the origin.

    The circumradius R of the regular pentagon with all interior angles
    pi/2 satisfies cosh R = cot(pi/5).
    """
    R = math.acosh(1.0 / math.tan(math.pi / 5))
    verts = [(math.sinh(R) * math.cos(2 * math.pi * j / 5),
              math.sinh(R) * math.sin(2 * math.pi * j / 5),
              math.cosh(R)) for j in range(5)]
    return build_polygon(-1, verts, model="hyperboloid")


def sphere_triangle(theta):
    """Spherical triangle with a pole vertex of angle theta.

    Vertices (0,0,1), (1,0,0), (cos theta, sin theta, 0): two meridian
    sides of length pi/2 meeting the equator side (length theta) at right
    angles.  For theta an irrational multiple of pi the table has no
    periodic billiard orbits.
    """
    if not 0.0 < theta < math.pi:
        raise PolygonError(f"triangle opening angle must be in (0, pi), got {theta}")
    return build_polygon(1, [(0, 0, 1), (1, 0, 0),
                             (math.cos(theta), math.sin(theta), 0)])


def named_table(name, theta=None):
    if name == "square":
        return square()
    if name == "hyperbolic-pentagon":
        return hyperbolic_pentagon()
    if name == "sphere-triangle":
        if theta is None:
            raise PolygonError("sphere-triangle requires --theta")
        return sphere_triangle(theta)
    raise PolygonError(f"unknown table {name!r}; "
                       "choose square, hyperbolic-pentagon, or sphere-triangle")
