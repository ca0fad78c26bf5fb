"""Generate the synthetic export fixture that accompanies the 99-country reference data.

The ECI, CO2 and footprint columns come from ``countries_2014.csv``. Bilateral
trade values are not published with it, so a country x product export matrix
is simulated: each country's capability is its published ECI plus noise,
each product has a complexity level, and countries in the same region share
product affinities. The export value of a product grows with capability
minus product complexity, so the RCA pattern lines up with the ECI ordering.

Run from the repository root::

    python scripts/make_fixture.py
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

DATA = Path(__file__).resolve().parents[1] / "src" / "ecobench" / "data"
OUT = DATA / "fixture"

SEED = 20140
NOISE = 0.9
REGION_WEIGHT = 1.0
# products per SITC section 0-8; sections 0-4 primary, 5-8 manufactured
SECTION_SIZES = (80, 70, 80, 60, 52, 100, 110, 130, 92)

EU, LA, AF, ME, AS, AN, CA = "europe", "latam", "africa", "mena", "asia", "anglo", "eurasia"
REGION = dict(
    ALB=EU, DZA=ME, ARG=LA, AUS=AN, AUT=EU, AZE=CA, BLR=CA, BEL=EU, BOL=LA, BIH=EU, BWA=AF,
    BRA=LA, BGR=EU, KHM=AS, CMR=AF, CAN=AN, CHL=LA, CHN=AS, COL=LA, COD=AF, CRI=LA, HRV=EU,
    CZE=EU, DNK=EU, DOM=LA, ECU=LA, EGY=ME, SLV=LA, EST=EU, ETH=AF, FIN=EU, FRA=EU, GEO=CA,
    DEU=EU, GHA=AF, GRC=EU, GTM=LA, GNB=AF, HND=LA, HUN=EU, IND=AS, IDN=AS, IRL=EU, ISR=ME,
    ITA=EU, JAM=LA, JPN=AS, JOR=ME, KAZ=CA, KEN=AF, KWT=ME, LVA=EU, LBN=ME, LTU=EU, MDG=AF,
    MYS=AS, MEX=LA, MNG=CA, MAR=ME, MOZ=AF, NLD=EU, NZL=AN, NIC=LA, NGA=AF, NOR=EU, OMN=ME,
    PAK=AS, PAN=LA, PRY=LA, PER=LA, PHL=AS, POL=EU, PRT=EU, ROU=EU, RUS=CA, SAU=ME, SEN=AF,
    SRB=EU, SGP=AS, SVK=EU, SVN=EU, ZAF=AF, ESP=EU, LKA=AS, SDN=AF, SWE=EU, CHE=EU, THA=AS,
    TGO=AF, TUN=ME, TUR=ME, UKR=CA, ARE=ME, GBR=EU, USA=AN, URY=LA, VNM=AS, ZMB=AF, ZWE=AF,
)


def read_countries():
    with open(DATA / "countries_2014.csv", newline="") as fh:
        return list(csv.DictReader(fh))


def simulate(codes, eci, seed=SEED, noise=NOISE, region_weight=REGION_WEIGHT):
    rng = np.random.default_rng(seed)
    products, q = [], []
    for s, n in enumerate(SECTION_SIZES):
        for i in range(n):
            products.append(f"{s}{i:03d}")
            q.append(rng.normal(-0.6 if s < 5 else 0.4, 0.9))
    q = np.array(q)
    regions = sorted(set(REGION.values()))
    affinity = rng.normal(0, 1, (len(regions), len(products)))
    ridx = np.array([regions.index(REGION[c]) for c in codes])
    size = rng.normal(0, 1, len(codes))
    capability = eci + rng.normal(0, 0.3, len(codes))
    idio = rng.normal(0, 1, (len(codes), len(products)))
    z = 1.6 * (capability[:, None] - q[None, :]) + region_weight * affinity[ridx] + noise * idio
    present = z > rng.normal(0.3, 0.5, z.shape)
    # every product has at least one exporter
    present[np.argmax(z, axis=0), np.arange(len(products))] = True
    value = np.exp(10 + size[:, None] + 0.8 * z + rng.normal(0, 1.0, z.shape))
    return products, np.where(present, np.round(value), 0.0)


def write(name, header, rows):
    with open(OUT / name, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rows = read_countries()
    codes = [r["country"] for r in rows]
    eci = np.array([float(r["eci"]) for r in rows])
    products, x = simulate(codes, eci)
    write("exports.csv", ("country", "product", "value"),
          [(c, p, int(x[i, j])) for i, c in enumerate(codes)
           for j, p in enumerate(products) if x[i, j] > 0])
    write("environment.csv", ("country", "co2_pc", "ef_pc"),
          [(r["country"], r["co2_pc"], r["ef_pc"]) for r in rows])
    write("eci_2014.csv", ("country", "eci"), [(r["country"], r["eci"]) for r in rows])
    write("product_classes.csv", ("product", "class"),
          [(p, "non-primary" if p[0] in "5678" else "primary") for p in products])


if __name__ == "__main__":
    main()
