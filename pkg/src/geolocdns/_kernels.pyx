# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan kernel.  Mirrors ``_pyscan`` operation for operation."""
from libc.math cimport sin, cos, sqrt

cdef double DEG = 3.141592653589793 / 180.0


cdef inline void _xy(double lat, double lon, double h, double a, double e2,
                     double *x, double *y) noexcept nogil:
    cdef double phi = lat * DEG
    cdef double lam = lon * DEG
    cdef double s = sin(phi)
    cdef double r = (a / sqrt(1.0 - e2 * s * s) + h) * cos(phi)
    x[0] = r * cos(lam)
    y[0] = r * sin(lam)


def plane_xy(double lat, double lon, double h, double a, double e):
    cdef double x, y
    _xy(lat, lon, h, a, e * e, &x, &y)
    return x, y


cdef Py_ssize_t _scan(double lat, double lon, double h,
                      const double[::1] lats, const double[::1] lons,
                      const double[::1] heights, const double[::1] radii,
                      double a, double e2) noexcept nogil:
    cdef Py_ssize_t i, n = lats.shape[0]
    cdef double ux, uy, cx, cy, dx, dy
    _xy(lat, lon, h, a, e2, &ux, &uy)
    for i in range(n):
        _xy(lats[i], lons[i], heights[i], a, e2, &cx, &cy)
        dx = ux - cx
        dy = uy - cy
        if sqrt(dx * dx + dy * dy) <= radii[i]:
            return i
    return -1


def scan_first(double lat, double lon, double h,
               const double[::1] lats, const double[::1] lons,
               const double[::1] heights, const double[::1] radii,
               double a, double e):
    cdef Py_ssize_t n = lats.shape[0]
    if lons.shape[0] != n or heights.shape[0] != n or radii.shape[0] != n:
        raise ValueError("column lengths differ")
    return _scan(lat, lon, h, lats, lons, heights, radii, a, e * e)
