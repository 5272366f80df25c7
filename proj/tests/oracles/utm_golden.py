#!/usr/bin/env python3
"""Generates tests/data/utm_golden.csv from PROJ (via pyproj).

Independent reference for the forward/inverse Transverse Mercator
implementation. Rerun only if the point set changes:

    python3 tests/oracles/utm_golden.py > tests/data/utm_golden.csv
"""
import random

from pyproj import Transformer

rng = random.Random(20021)
rows = [(-122.4194, 37.7749, 10), (-123.0, 0.0001, 10)]
for zone in range(3, 21):
    cm = zone * 6 - 183
    count = 6 if zone in (10, 13, 17) else 3
    for _ in range(count):
        rows.append((cm + rng.uniform(-3.0, 2.999), rng.uniform(20.0, 60.0), zone))
    # Outside the zone proper but within 4 degrees of its central meridian.
    rows.append((cm + rng.choice([-1, 1]) * rng.uniform(3.0, 4.0), rng.uniform(20.0, 60.0), zone))

print("lon,lat,zone,easting,northing")
for lon, lat, zone in rows:
    t = Transformer.from_crs("EPSG:4269", f"EPSG:{26900 + zone}", always_xy=True)
    e, n = t.transform(lon, lat)
    print(f"{lon:.10f},{lat:.10f},{zone},{e:.6f},{n:.6f}")
