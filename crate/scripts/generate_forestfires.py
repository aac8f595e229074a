"""Writes data/forestfires.csv: 517 synthetic rows in the layout of the UCI
forest-fires table (Cortez and Morais, 2007).

The real file could not be fetched when this repository was built. Marginals
follow the published summary of the original: month and weekday counts match
it exactly, fire-weather indices follow a seasonal pattern, and about half of
the burned areas are zero with a heavy right tail.
"""

import csv
from pathlib import Path

import numpy as np

MONTHS = {"jan": 2, "feb": 20, "mar": 54, "apr": 9, "may": 2, "jun": 17,
          "jul": 32, "aug": 184, "sep": 172, "oct": 15, "nov": 1, "dec": 9}
DAYS = {"mon": 74, "tue": 64, "wed": 54, "thu": 61, "fri": 85, "sat": 84, "sun": 95}
# rough seasonal level per month: 0 = winter, 1 = late summer
SEASON = {"jan": 0.0, "feb": 0.05, "mar": 0.15, "apr": 0.25, "may": 0.35, "jun": 0.55,
          "jul": 0.8, "aug": 1.0, "sep": 0.95, "oct": 0.6, "nov": 0.2, "dec": 0.05}


def main(path: Path, seed: int = 2007) -> None:
    rng = np.random.default_rng(seed)
    n = sum(MONTHS.values())
    months = np.array([m for m, c in MONTHS.items() for _ in range(c)])
    days = np.array([d for d, c in DAYS.items() for _ in range(c)])
    rng.shuffle(months)
    rng.shuffle(days)
    s = np.array([SEASON[m] for m in months])

    x = rng.integers(1, 10, n)
    y = np.clip(rng.integers(2, 7, n) + rng.integers(-1, 2, n), 2, 9)
    ffmc = np.clip(84 + 8 * s + rng.normal(0, 3.5, n), 18.7, 96.2)
    dmc = np.clip(10 + 120 * s + rng.normal(0, 40, n), 1.1, 291.3)
    dc = np.clip(60 + 620 * s + rng.normal(0, 110, n), 7.9, 860.6)
    isi = np.clip(np.exp(np.log(1 + 8 * s) + 0.35 * rng.normal(0, 1, n)) + 0.5 * (ffmc - 84) / 4, 0.0, 56.1)
    temp = np.clip(5 + 17 * s + rng.normal(0, 4.5, n), 2.2, 33.3)
    rh = np.clip(70 - 1.4 * (temp - 5) + rng.normal(0, 12, n), 15, 100).round()
    wind = np.clip(rng.gamma(4.0, 1.0, n), 0.4, 9.4)
    rain = np.where(rng.random(n) < 0.015, rng.exponential(1.0, n), 0.0)
    rain[np.argmax(rain)] = 6.4

    logit = -0.2 + 0.04 * (temp - 19) - 0.01 * (rh - 44) + 0.05 * (wind - 4)
    burned = rng.random(n) < 1 / (1 + np.exp(-logit))
    size = np.exp(rng.normal(1.6 + 0.03 * (temp - 19) + 0.04 * (dmc - 110) / 10, 1.4, n))
    area = np.where(burned, size, 0.0)
    area = np.minimum(area, 1090.84)
    area[np.argmax(area)] = 1090.84

    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["X", "Y", "month", "day", "FFMC", "DMC", "DC", "ISI", "temp", "RH", "wind", "rain", "area"])
        for i in range(n):
            w.writerow([x[i], y[i], months[i], days[i], f"{ffmc[i]:.1f}", f"{dmc[i]:.1f}", f"{dc[i]:.1f}",
                        f"{isi[i]:.1f}", f"{temp[i]:.1f}", int(rh[i]), f"{wind[i]:.1f}", f"{rain[i]:.1f}",
                        f"{area[i]:.2f}"])


if __name__ == "__main__":
    main(Path(__file__).resolve().parent.parent / "data" / "forestfires.csv")
