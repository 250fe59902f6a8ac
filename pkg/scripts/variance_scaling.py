"""Log-log decay of Var(Y_N^(k)) for the full and slowly growing band ensembles."""
import argparse
from dataclasses import dataclass, field

from scl_moments.ensembles import parse_ensemble
from scl_moments.spectra import variance_decay


@dataclass
class Config:
    ns: list[int] = field(default_factory=lambda: [64, 128, 256, 512])
    slow_ns: list[int] = field(default_factory=lambda: [128, 256, 512, 1024])
    beta: float = 0.7
    k: int = 4
    trials: int = 64
    seed: int = 7
    threads: int = 1


def run(cfg: Config) -> None:
    families = {
        "wigner": (cfg.ns, lambda n: parse_ensemble("wigner", n=n, seed=cfg.seed)),
        f"slow:{cfg.beta}": (cfg.slow_ns,
                             lambda n: parse_ensemble(f"slow:{cfg.beta}", n=n, seed=cfg.seed)),
    }
    for name, (ns, family) in families.items():
        res = variance_decay(family, ns, cfg.k, cfg.trials, cfg.threads)
        print(f"# {name}: slope {res.slope:.3f} against log {res.axis}")
        for n, x, v in zip(ns, res.xs, res.variances):
            print(f"{name},{n},{x:g},{v:.6g}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--trials", type=int, default=Config.trials)
    p.add_argument("--threads", type=int, default=Config.threads)
    a = p.parse_args()
    run(Config(trials=a.trials, threads=a.threads))
