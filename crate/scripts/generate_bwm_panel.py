"""Writes example decision-maker files under data/bwm/.

Twenty decision-makers rate the four acceptance dimensions and, within each
dimension, its attributes. Who picks which criterion as best and worst
follows the tallies of the published panel; the comparison values are
drawn near-consistently on the 1-9 scale.
"""

import random
from pathlib import Path

DIMENSIONS = [("PE", "Performance expectancy", 8, 1), ("EE", "Effort expectancy", 2, 9),
              ("SI", "Social influence", 7, 0), ("EC", "Enabling conditions", 3, 10)]
ATTRIBUTES = {
    "PE": [("PE1", "Predictive nature", 10, 1), ("PE2", "Events analytics", 7, 6),
           ("PE3", "Better forecast", 3, 13)],
    "EE": [("EE1", "Ease of automation", 4, 10), ("EE2", "Ease of learning", 7, 5),
           ("EE3", "Ease of adoption", 9, 5)],
    "SI": [("SI1", "Political pressure", 3, 14), ("SI2", "Technological giants' push", 11, 1),
           ("SI3", "Social pressure", 6, 5)],
    "EC": [("EC1", "Availability of computing power", 6, 1), ("EC2", "Interoperability", 2, 1),
           ("EC3", "Big data availability", 12, 0), ("EC4", "Mass market potential", 0, 18)],
}


def pairings(rng, crits):
    best = [c[0] for c in crits for _ in range(c[2])]
    worst = [c[0] for c in crits for _ in range(c[3])]
    while True:
        rng.shuffle(worst)
        if all(b != w for b, w in zip(best, worst)):
            return list(zip(best, worst))


def document(rng, dm, crits, best, worst):
    codes = [c[0] for c in crits]
    a_bw = rng.randint(4, 9)
    bo, ow = [], []
    for code in codes:
        if code == best:
            bo.append(1)
            ow.append(a_bw)
        elif code == worst:
            bo.append(a_bw)
            ow.append(1)
        else:
            b = rng.randint(2, a_bw - 1)
            bo.append(b)
            ow.append(min(a_bw, max(1, round(a_bw / b) + rng.choice([-1, 0, 0, 1]))))
    quote = lambda xs: ", ".join(f'"{x}"' for x in xs)
    return (f'decision_maker = "{dm}"\n'
            f"criteria = [{quote(codes)}]\n"
            f"labels = [{quote(c[1] for c in crits)}]\n"
            f'best = "{best}"\n'
            f'worst = "{worst}"\n'
            f"best_to_others = [{', '.join(map(str, bo))}]\n"
            f"others_to_worst = [{', '.join(map(str, ow))}]\n")


def write_panel(rng, root, crits):
    root.mkdir(parents=True, exist_ok=True)
    for k, (best, worst) in enumerate(pairings(rng, crits), start=1):
        dm = f"DM{k:02d}"
        (root / f"{dm.lower()}.toml").write_text(document(rng, dm, crits, best, worst))


def main(base: Path, seed: int = 15) -> None:
    rng = random.Random(seed)
    write_panel(rng, base / "dimensions", DIMENSIONS)
    for code, attrs in ATTRIBUTES.items():
        write_panel(rng, base / "attributes" / code, attrs)


if __name__ == "__main__":
    main(Path(__file__).resolve().parent.parent / "data" / "bwm")
