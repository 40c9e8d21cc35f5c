"""Pure Python scan kernel, used when the compiled extension is unavailable.

Must stay numerically identical to ``_kernels.pyx``: same operation order,
same libm calls, no fused multiply-add.
"""
import math

DEG = math.pi / 180.0


def plane_xy(lat, lon, h, a, e):
    e2 = e * e
    phi = lat * DEG
    lam = lon * DEG
    s = math.sin(phi)
    r = (a / math.sqrt(1.0 - e2 * s * s) + h) * math.cos(phi)
    return r * math.cos(lam), r * math.sin(lam)


def scan_first(lat, lon, h, lats, lons, heights, radii, a, e):
    sin = math.sin
    cos = math.cos
    sqrt = math.sqrt
    e2 = e * e
    phi = lat * DEG
    lam = lon * DEG
    s = sin(phi)
    r = (a / sqrt(1.0 - e2 * s * s) + h) * cos(phi)
    ux = r * cos(lam)
    uy = r * sin(lam)
    i = 0
    for clat, clon, ch, rad in zip(lats, lons, heights, radii):
        phi = clat * DEG
        lam = clon * DEG
        s = sin(phi)
        r = (a / sqrt(1.0 - e2 * s * s) + ch) * cos(phi)
        dx = ux - r * cos(lam)
        dy = uy - r * sin(lam)
        if sqrt(dx * dx + dy * dy) <= rad:
            return i
        i += 1
    return -1
