#!/usr/bin/env python3
"""Synthetic daily load-style curves in the CSV layout read by `fjscb`.

One curve per day on 48 half-hour grid points. The response of day i is
a functional autoregression on the three previous days plus AR(1) noise,
so the sample suits `fjscb fit --lags 3`.
"""
import argparse
import numpy as np

trapezoid = getattr(np, "trapezoid", None) or np.trapz


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--days", type=int, default=365)
    ap.add_argument("--points", type=int, default=48)
    ap.add_argument("--seed", type=int, default=20240101)
    ap.add_argument("--prefix", default="sample")
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    t = np.linspace(0.0, 1.0, args.points)
    hours = 24.0 * t
    base = 30.0 + 6.0 * np.sin(2 * np.pi * (t - 0.3)) + 4.0 * np.exp(-((hours - 20.0) / 2.5) ** 2)

    k = 6
    load = np.vstack([np.sin(2 * np.pi * (j // 2 + 1) * t) if j % 2 else np.cos(2 * np.pi * (j // 2 + 1) * t)
                      for j in range(k)])
    scale = 1.0 / np.arange(1, k + 1)
    scores = np.zeros((args.days, k))
    shock = rng.normal(size=(args.days, k)) * scale
    for i in range(args.days):
        scores[i] = shock[i] + (0.6 * scores[i - 1] if i else 0.0)
    weekly = 2.0 * (np.arange(args.days) % 7 >= 5)
    curves = base + scores @ load - weekly[:, None]

    betas = [0.6 * np.cos(np.pi * t), 0.3 * np.sin(np.pi * t), -0.2 * t]
    noise = np.zeros(args.days)
    for i in range(1, args.days):
        noise[i] = 0.2 * noise[i - 1] + 0.5 * rng.standard_t(8)
    centered = curves - curves.mean(axis=0)
    y = np.full(args.days, 100.0) + noise
    for i in range(3, args.days):
        for lag, b in enumerate(betas, start=1):
            y[i] += trapezoid(b * centered[i - lag], t)

    ids = [f"d{i:04d}" for i in range(args.days)]
    header = "id," + ",".join(f"{h:.2f}" for h in hours)
    with open(f"{args.prefix}_curves.csv", "w") as f:
        f.write(header + "\n")
        for name, row in zip(ids, curves):
            f.write(name + "," + ",".join(f"{v:.6f}" for v in row) + "\n")
    with open(f"{args.prefix}_responses.csv", "w") as f:
        f.write("id,y\n")
        for name, v in zip(ids, y):
            f.write(f"{name},{v:.6f}\n")


if __name__ == "__main__":
    main()
