from __future__ import annotations

import os
from dataclasses import dataclass, replace

SEED_ENV = "FLOWTREE_SEED"


@dataclass(frozen=True)
class RunConfig:
    """Reproducibility and retry knobs for the perturbed flow.

    ``bound`` is the integer B; perturbation coordinates have magnitude at
    most 1/B.  On a degenerate run the seed is advanced up to
    ``seed_retries`` times, then B is multiplied by 100, at most
    ``escalations`` times.
    """

    seed: int = 1
    bound: int = 10**6
    seed_retries: int = 8
    escalations: int = 3
    verify: bool = True
    output: str = "json"

    def __post_init__(self):
        if self.bound <= 0 or self.seed_retries < 0 or self.escalations < 0:
            raise ValueError("perturbation bound and retry budgets must be positive")
        if self.output not in ("json", "dot", "plot-data"):
            raise ValueError(f"unknown output format {self.output!r}")

    @classmethod
    def from_env(cls, environ=None, **overrides) -> "RunConfig":
        """Defaults, then FLOWTREE_SEED, then explicit overrides (None = unset)."""
        environ = os.environ if environ is None else environ
        cfg = cls()
        if environ.get(SEED_ENV, "").strip():
            cfg = replace(cfg, seed=int(environ[SEED_ENV]))
        return replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
