"""Great-circle distances and a local kilometre projection."""

import numpy as np

EARTH_RADIUS_KM = 6371.0088


def haversine_km(lat1, lon1, lat2, lon2):
    """Haversine distance in km; accepts scalars or broadcastable arrays of degrees."""
    lat1 = np.radians(np.asarray(lat1, dtype=float))
    lon1 = np.radians(np.asarray(lon1, dtype=float))
    lat2 = np.radians(np.asarray(lat2, dtype=float))
    lon2 = np.radians(np.asarray(lon2, dtype=float))
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    a = np.sin(dlat / 2.0) ** 2 + np.cos(lat1) * np.cos(lat2) * np.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.clip(a, 0.0, 1.0)))


def pairwise_haversine_km(lats, lons):
    """All-pairs distance matrix (n x n) for coordinate arrays in degrees."""
    lats = np.asarray(lats, dtype=float)
    lons = np.asarray(lons, dtype=float)
    return haversine_km(lats[:, None], lons[:, None], lats[None, :], lons[None, :])


def project_km(lats, lons):
    """Project degrees to a local equirectangular (x, y) plane in km.

    Accurate only over city-scale extents; used for bandwidth estimation,
    not for distances (those stay haversine).
    """
    lats = np.asarray(lats, dtype=float)
    lons = np.asarray(lons, dtype=float)
    lat0 = np.radians(lats.mean()) if lats.size else 0.0
    x = EARTH_RADIUS_KM * np.radians(lons) * np.cos(lat0)
    y = EARTH_RADIUS_KM * np.radians(lats)
    return x, y
