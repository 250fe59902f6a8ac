"""Sweep band widths and report phi deviation and the normalized fourth-moment gap."""
import argparse
from dataclasses import dataclass

import numpy as np

from scl_moments.tree_integrals import scl_verdict
from scl_moments.weights import band, periodic_band


@dataclass
class Config:
    rho_min: float = 0.05
    rho_max: float = 0.95
    steps: int = 10
    grid: int = 1024
    tol: float = 1e-3


def run(cfg: Config) -> None:
    print("family,rho,phi0,max_deviation,mu4_gap,scl")
    for rho in np.linspace(cfg.rho_min, cfg.rho_max, cfg.steps):
        for name, make in (("band", band), ("periodic", periodic_band)):
            v = scl_verdict(make(float(rho)), cfg.tol, cfg.grid)
            r = v.phi_report
            print(f"{name},{rho:.3f},{r.phi0:.6f},{r.max_deviation:.6f},{v.moment_gap:.6f},{v.verdict}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--steps", type=int, default=Config.steps)
    p.add_argument("--grid", type=int, default=Config.grid)
    a = p.parse_args()
    run(Config(steps=a.steps, grid=a.grid))
