"""Generate data/fyp_synthetic.csv: a synthetic, NON-AUTHORITATIVE dataset
shaped like the Five-Year-Plan application (50 yearly DMUs, three shared
inputs, Industry and Agriculture value added).

Trends are log-linear between the minimum and maximum magnitudes of the
published descriptive statistics, with multiplicative noise. The numbers are
not the real series and must not be read as such.
"""

import csv
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parent.parent / "data"
SEED = 20190401

# (column, first-year level, last-year level, noise sigma)
SERIES = [
    ("Population", 7.354e8, 1.37122e9, 0.01),
    ("GDP per capita", 91.47, 8069.2, 0.08),
    ("GFC", 7.82e9, 1.546e12, 0.10),
    ("Industry VA", 2.20e10, 4.529e12, 0.12),
    ("Agriculture VA", 2.85e10, 9.773e11, 0.12),
]


def main() -> None:
    rng = np.random.default_rng(SEED)
    years = np.arange(1966, 2016)
    u = (years - years[0]) / (years[-1] - years[0])
    cols = {}
    for name, lo, hi, sigma in SERIES:
        trend = np.exp(np.log(lo) + u * (np.log(hi) - np.log(lo)))
        cols[name] = trend * np.exp(rng.normal(0.0, sigma, years.size))
    with open(OUT / "fyp_synthetic.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["Year"] + [s[0] for s in SERIES])
        for j, year in enumerate(years):
            w.writerow([int(year)] + [f"{cols[s[0]][j]:.6g}" for s in SERIES])


if __name__ == "__main__":
    main()
