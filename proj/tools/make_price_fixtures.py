#!/usr/bin/env python3
"""Writes the synthetic price CSVs under tests/data.

Prices follow a correlated geometric random walk; the second day of the
minute fixture has higher volatility so the hourly series has a regime change.
"""
import pathlib

import numpy as np

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data"
START = np.datetime64("2024-03-01T00:00:00")


def walk(rng, steps, vol, corr, start=(100.0, 50.0)):
    cov = np.array([[1.0, corr], [corr, 1.0]]) * vol**2
    shocks = rng.multivariate_normal(np.zeros(2), cov, size=steps - 1)
    logs = np.vstack([np.log(start), np.log(start) + np.cumsum(shocks, axis=0)])
    return np.exp(logs)


def write(path, stamps, close, extra=True):
    with open(path, "w", newline="\n") as f:
        f.write("timestamp,open,close,volume\n" if extra else "timestamp,close\n")
        for t, c in zip(stamps, close):
            stamp = str(t) + "Z"
            f.write(f"{stamp},{c:.6f},{c:.6f},1\n" if extra else f"{stamp},{c:.6f}\n")


def main():
    rng = np.random.default_rng(20240301)
    OUT.mkdir(parents=True, exist_ok=True)

    hours = START + np.arange(48) * np.timedelta64(1, "h")
    prices = walk(rng, 48, 0.01, 0.5)
    write(OUT / "hourly_a.csv", hours, prices[:, 0])
    write(OUT / "hourly_b.csv", hours, prices[:, 1], extra=False)

    minutes = START + np.arange(2880) * np.timedelta64(1, "m")
    calm = walk(rng, 1440, 0.0005, 0.3)
    wild = walk(rng, 1441, 0.0015, 0.8, start=tuple(calm[-1]))[1:]
    prices = np.vstack([calm, wild])
    write(OUT / "btc_minute.csv", minutes, prices[:, 0])
    write(OUT / "eth_minute.csv", minutes, prices[:, 1])


if __name__ == "__main__":
    main()
