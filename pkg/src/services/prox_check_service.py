"""
Oracle check of the closed-form TL1 scalar prox against brute-force minimization
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List

import numpy as np
from scipy.optimize import minimize_scalar

from ..regularizers import ProxParams, tl1_prox_objective, tl1_scalar_prox

logger = logging.getLogger(__name__)

X_RANGE = (-10.0, 10.0)
MU_RANGE = (1e-3, 10.0)
A_RANGE = (0.1, 3000.0)
GRID_STEP = 1e-4
TOLERANCE = 1e-9


@dataclass(frozen=True)
class ProxCheckCase:
    x: float
    mu: float
    a: float
    prox: float
    prox_value: float
    oracle: float
    oracle_value: float

    @property
    def gap(self) -> float:
        return self.prox_value - self.oracle_value

    @property
    def passed(self) -> bool:
        return self.gap <= TOLERANCE * max(1.0, abs(self.oracle_value))

    def as_row(self) -> Dict[str, Any]:
        return {**asdict(self), "gap": self.gap, "passed": self.passed}


@dataclass
class ProxCheckReport:
    samples: int
    seed: int
    cases: List[ProxCheckCase] = field(default_factory=list)

    @property
    def violations(self) -> List[ProxCheckCase]:
        return [case for case in self.cases if not case.passed]

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def worst_gap(self) -> float:
        return max((case.gap for case in self.cases), default=0.0)

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "samples": self.samples,
            "seed": self.seed,
            "passed": self.passed,
            "worst_gap": self.worst_gap,
            "violations": [case.as_row() for case in self.violations],
        }


class ProxCheckService:
    def __init__(self, samples: int = 1000, seed: int = 0, grid_step: float = GRID_STEP):
        if samples < 1:
            raise ValueError(f"samples must be positive, got {samples}")
        self.samples = samples
        self.seed = seed
        self.grid_step = grid_step

    def to_json_dict(self) -> Dict[str, Any]:
        """Effective settings of the suite"""
        return {
            "samples": self.samples,
            "seed": self.seed,
            "grid_step": self.grid_step,
            "tolerance": TOLERANCE,
            "x_range": list(X_RANGE),
            "mu_range": list(MU_RANGE),
            "a_range": list(A_RANGE),
        }

    def draw_cases(self) -> np.ndarray:
        """(x, mu, a) rows; mu and a are log-uniform over their ranges"""
        rng = np.random.default_rng(self.seed)
        x = rng.uniform(*X_RANGE, size=self.samples)
        mu = np.exp(rng.uniform(np.log(MU_RANGE[0]), np.log(MU_RANGE[1]), size=self.samples))
        a = np.exp(rng.uniform(np.log(A_RANGE[0]), np.log(A_RANGE[1]), size=self.samples))
        return np.column_stack([x, mu, a])

    def oracle(self, x: float, params: ProxParams) -> float:
        """Best grid point between 0 and x, polished by a bounded scalar search around it"""
        magnitude = abs(x)
        points = int(np.ceil(magnitude / self.grid_step)) + 1
        grid = np.sign(x) * np.linspace(0.0, magnitude, points)
        values = tl1_prox_objective(grid, x, params)
        best = int(np.argmin(values))
        z_best, value_best = float(grid[best]), float(values[best])

        low = float(grid[max(best - 1, 0)])
        high = float(grid[min(best + 1, points - 1)])
        if low != high:
            bounds = (min(low, high), max(low, high))
            refined = minimize_scalar(
                lambda z: float(tl1_prox_objective(z, x, params)), bounds=bounds,
                method="bounded", options={"xatol": 1e-12},
            )
            if refined.fun < value_best:
                z_best, value_best = float(refined.x), float(refined.fun)
        return z_best

    def check_case(self, x: float, mu: float, a: float) -> ProxCheckCase:
        params = ProxParams(mu=mu, a=a)
        prox = tl1_scalar_prox(x, params)
        oracle = self.oracle(x, params)
        return ProxCheckCase(
            x=x, mu=mu, a=a,
            prox=prox, prox_value=float(tl1_prox_objective(prox, x, params)),
            oracle=oracle, oracle_value=float(tl1_prox_objective(oracle, x, params)),
        )

    def run(self) -> ProxCheckReport:
        report = ProxCheckReport(samples=self.samples, seed=self.seed)
        for x, mu, a in self.draw_cases():
            case = self.check_case(float(x), float(mu), float(a))
            if not case.passed:
                logger.warning(
                    "Prox violation at x=%.6g, mu=%.6g, a=%.6g: gap %.3g", x, mu, a, case.gap
                )
            report.cases.append(case)
        logger.info(
            "Prox check: %d cases, %d violations, worst gap %.3g",
            self.samples, len(report.violations), report.worst_gap,
        )
        return report
