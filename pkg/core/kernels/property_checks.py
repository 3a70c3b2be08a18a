# core/kernels/property_checks.py
"""Invariant suite for the arc kernel, shared by `check-kernel` and the tests.

Each check returns a PropertyResult; a check never raises on a failing property,
only on misuse (for example a space without the dimensions the check needs).
"""

from dataclasses import asdict, dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from config.logging_config import get_module_logger
from core.kernels.arc_kernel import (
    ArcKernel,
    ArcParams,
    Embedding,
    arc_distance,
    arc_kernel,
    embed,
)
from core.kernels.base_covariance import BaseCovariance, base_kappa
from core.space.parameter_space import (
    Dimension,
    ParameterSpace,
    Point,
    make_point,
    sample_points,
    with_depth,
)

# Create a logger for this module
logger = get_module_logger("property_checks")

EXACT_TOL = 1e-12
TRIANGLE_TOL = 1e-10
PSD_TOL = 1e-8


@dataclass
class PropertyResult:
    """Outcome of one property check."""
    name: str
    passed: bool
    detail: str
    worst: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _random_params(
    n_dims: int,
    rng: np.random.Generator,
    embedding: Embedding,
    base: BaseCovariance = BaseCovariance.MATERN52,
) -> ArcParams:
    alpha = float(np.exp(rng.normal())) if base == BaseCovariance.RATIONAL_QUADRATIC else None
    return ArcParams(
        omega=np.exp(rng.normal(size=n_dims)),
        rho=rng.uniform(size=n_dims),
        amplitude=float(np.exp(rng.normal())),
        base=base,
        alpha=alpha,
        embedding=embedding,
    )


def _resample_irrelevant(
    space: ParameterSpace, points: Sequence[Point], rng: np.random.Generator
) -> List[Point]:
    """Copies of `points` whose irrelevant coordinates are replaced with arbitrary values."""
    resampled = []
    for p in points:
        junk = rng.normal(scale=10.0, size=space.n_dims)
        values = np.where(p.mask, p.values, junk)
        resampled.append(Point(depth=p.depth, values=values, mask=p.mask))
    return resampled


def _case_space() -> ParameterSpace:
    # One dimension x on [0, 1]; irrelevant at depth 0, relevant at depth 1
    return ParameterSpace(max_depth=1, dims=(Dimension("x", 0.0, 1.0, layer=1),))


class KernelPropertySuite:
    """Randomized and hand-picked checks of the kernel's metric and covariance properties."""

    def __init__(
        self,
        space: ParameterSpace,
        seed: int = 0,
        n_param_draws: int = 10,
        n_points: int = 100,
        n_gram_draws: int = 50,
        gram_size: int = 30,
        embeddings: Sequence[Embedding] = (Embedding.ARC, Embedding.BOX),
        params: Optional[ArcParams] = None,
    ):
        self.space = space
        # Configured hyperparameters, checked alongside the random draws
        self.params = params
        self.seed = seed
        self.n_param_draws = n_param_draws
        self.n_points = n_points
        self.n_gram_draws = n_gram_draws
        self.gram_size = gram_size
        self.embeddings = [Embedding(e) for e in embeddings]

    def checks(self) -> Dict[str, Callable[[np.random.Generator], PropertyResult]]:
        return {
            "embedding_distance_agreement": self.check_embedding_agreement,
            "irrelevant_in_both_invariance": self.check_both_irrelevant_invariance,
            "irrelevant_side_invariance": self.check_one_side_invariance,
            "pseudo_metric_axioms": self.check_pseudo_metric,
            "irrelevant_collapse": self.check_irrelevant_collapse,
            "monotone_in_gap": self.check_monotonicity,
            "gram_psd": self.check_gram_psd,
            "case_table": self.check_case_table,
        }

    def run(self, only: Optional[Sequence[str]] = None) -> List[PropertyResult]:
        """Run every check (or the named subset) with independent, seed-derived streams."""
        results = []
        seeds = np.random.SeedSequence(self.seed)
        for (name, check), child in zip(self.checks().items(), seeds.spawn(len(self.checks()))):
            if only is not None and name not in only:
                continue
            result = check(np.random.default_rng(child))
            level = "debug" if result.passed else "warning"
            getattr(logger, level)(f"{name}: {'PASS' if result.passed else 'FAIL'} ({result.detail})")
            results.append(result)
        return results

    def _point_sets(self, rng: np.random.Generator, count: int = 2) -> List[List[Point]]:
        return [sample_points(self.space, self.n_points, rng) for _ in range(count)]

    def _param_draws(
        self, rng: np.random.Generator, embedding: Embedding, count: int, base: BaseCovariance = BaseCovariance.MATERN52
    ) -> List[ArcParams]:
        draws = [_random_params(self.space.n_dims, rng, embedding, base) for _ in range(count)]
        if self.params is not None and self.params.embedding == embedding and self.params.base == base:
            draws.append(self.params)
        return draws

    def check_embedding_agreement(self, rng: np.random.Generator) -> PropertyResult:
        """Closed-form distance equals the Euclidean distance of the embeddings."""
        worst = 0.0
        pairs = 0
        for embedding in self.embeddings:
            for params in self._param_draws(rng, embedding, self.n_param_draws):
                kernel = ArcKernel(self.space, params)
                a, b = self._point_sets(rng)
                closed = kernel.distance(kernel.geometry(a, b))
                ea = np.vstack([embed(self.space, params, p) for p in a])
                eb = np.vstack([embed(self.space, params, q) for q in b])
                worst = max(worst, float(np.max(np.abs(closed - cdist(ea, eb)))))
                pairs += closed.size
        return PropertyResult(
            "embedding_distance_agreement",
            worst <= EXACT_TOL,
            f"max |closed - embedded| = {worst:.3e} over {pairs} pairs",
            worst,
        )

    def _invariance(self, rng: np.random.Generator, select: str) -> PropertyResult:
        name = (
            "irrelevant_in_both_invariance" if select == "both" else "irrelevant_side_invariance"
        )
        checked = 0
        violations = 0
        for embedding in self.embeddings:
            for _ in range(self.n_param_draws):
                kernel = ArcKernel(self.space, _random_params(self.space.n_dims, rng, embedding))
                a, b = self._point_sets(rng)
                a2 = _resample_irrelevant(self.space, a, rng)
                b2 = _resample_irrelevant(self.space, b, rng)
                geometry = kernel.geometry(a, b)
                cells = geometry.mismatch if select == "side" else (
                    ~geometry.both_relevant & ~geometry.mismatch
                )
                cells = np.any(cells, axis=0)
                original = kernel.covariance(geometry)
                perturbed = kernel.cross(a2, b2)
                checked += int(np.sum(cells))
                violations += int(np.sum(original[cells] != perturbed[cells]))
        return PropertyResult(
            name,
            violations == 0,
            f"{violations} of {checked} affected pairs changed",
            float(violations),
        )

    def check_both_irrelevant_invariance(self, rng: np.random.Generator) -> PropertyResult:
        """Values of a dimension irrelevant in both points never change the kernel."""
        return self._invariance(rng, "both")

    def check_one_side_invariance(self, rng: np.random.Generator) -> PropertyResult:
        """When relevance differs, the irrelevant side's value never changes the kernel."""
        return self._invariance(rng, "side")

    def check_pseudo_metric(self, rng: np.random.Generator) -> PropertyResult:
        failures: List[str] = []
        worst = 0.0
        for embedding in self.embeddings:
            for _ in range(self.n_param_draws):
                kernel = ArcKernel(self.space, _random_params(self.space.n_dims, rng, embedding))
                a, b, c = self._point_sets(rng, 3)
                d_ab = kernel.distance(kernel.geometry(a, b))
                d_ba = kernel.distance(kernel.geometry(b, a))
                d_bc = kernel.distance(kernel.geometry(b, c))
                d_ac = kernel.distance(kernel.geometry(a, c))
                d_aa = kernel.distance(kernel.geometry(a, a))

                if not np.array_equal(d_ab, d_ba.T):
                    failures.append("symmetry")
                if np.any(d_ab < 0):
                    failures.append("nonnegativity")
                if np.any(np.diag(d_aa) != 0.0):
                    failures.append("identity")
                # d(a_i, c_k) <= min_j d(a_i, b_j) + d(b_j, c_k)
                via = np.min(d_ab[:, :, None] + d_bc[None, :, :], axis=1)
                excess = float(np.max(d_ac - via))
                worst = max(worst, excess)
                if excess > TRIANGLE_TOL:
                    failures.append("triangle")
        failures = sorted(set(failures))
        detail = "all axioms hold" if not failures else f"violated: {', '.join(failures)}"
        return PropertyResult("pseudo_metric_axioms", not failures, detail, worst)

    def check_irrelevant_collapse(self, rng: np.random.Generator) -> PropertyResult:
        """Every irrelevant dimension embeds at the same origin pair."""
        worst = 0.0
        for embedding in self.embeddings:
            params = _random_params(self.space.n_dims, rng, embedding)
            for p in sample_points(self.space, self.n_points, rng):
                pairs = embed(self.space, params, p).reshape(-1, 2)
                if np.any(~p.mask):
                    worst = max(worst, float(np.max(np.abs(pairs[~p.mask]))))
                norms = np.linalg.norm(pairs[p.mask], axis=1)
                if embedding == Embedding.ARC and norms.size:
                    worst = max(worst, float(np.max(np.abs(norms - params.omega[p.mask]))))
        return PropertyResult(
            "irrelevant_collapse",
            worst <= EXACT_TOL,
            f"max deviation from the expected pair = {worst:.3e}",
            worst,
        )

    def check_monotonicity(self, rng: np.random.Generator) -> PropertyResult:
        """Per-dimension distance grows strictly with the gap when both points are relevant."""
        gaps = np.linspace(0.0, 1.0, 201)
        anchor = with_depth(self.space, self.space.max_depth, self.space.lower)
        bad_dims: List[str] = []
        for embedding in self.embeddings:
            params = ArcParams(
                omega=np.exp(rng.normal(size=self.space.n_dims)),
                rho=rng.uniform(0.05, 1.0, size=self.space.n_dims),
                embedding=embedding,
            )
            kernel = ArcKernel(self.space, params)
            for i, dim in enumerate(self.space.dims):
                moved = []
                for g in gaps:
                    values = np.array(self.space.lower)
                    values[i] = min(dim.lower + g * dim.width, dim.upper)
                    moved.append(with_depth(self.space, self.space.max_depth, values))
                d = kernel.distance(kernel.geometry([anchor], moved))[0]
                if not np.all(np.diff(d) > 0):
                    bad_dims.append(f"{dim.name}/{embedding.value}")
        detail = "strictly increasing on every dimension" if not bad_dims else (
            f"not increasing on {bad_dims[:5]}"
        )
        return PropertyResult("monotone_in_gap", not bad_dims, detail, float(len(bad_dims)))

    def check_gram_psd(self, rng: np.random.Generator) -> PropertyResult:
        worst_ratio = -np.inf
        failures = 0
        total = 0
        for base in BaseCovariance:
            draws = [
                _random_params(self.space.n_dims, rng, self.embeddings[i % len(self.embeddings)], base)
                for i in range(self.n_gram_draws)
            ]
            if self.params is not None and self.params.base == base:
                draws.append(self.params)
            for params in draws:
                total += 1
                points = sample_points(self.space, self.gram_size, rng)
                G = ArcKernel(self.space, params).gram(points)
                min_eig = float(np.linalg.eigvalsh(G)[0])
                floor = -PSD_TOL * self.gram_size * params.amplitude
                worst_ratio = max(worst_ratio, -min_eig / (self.gram_size * params.amplitude))
                if min_eig < floor or not np.array_equal(G, G.T):
                    failures += 1
        return PropertyResult(
            "gram_psd",
            failures == 0,
            f"{failures} of {total} Gram matrices failed; worst -λmin/(nσ²) = {worst_ratio:.3e}",
            float(worst_ratio),
        )

    def check_case_table(self, rng: np.random.Generator) -> PropertyResult:
        """Hand-picked values of the three distance cases, the embedding and the base covariances."""
        space = _case_space()
        off = with_depth(space, 0, [0.3])
        off_other = with_depth(space, 0, [0.9])

        def at(x: float) -> Point:
            return make_point(space, [1.0, x])

        def params(omega: float, rho: float) -> ArcParams:
            return ArcParams(omega=[omega], rho=[rho])

        cases = [
            ("both irrelevant", arc_distance(space, params(1.3, 0.7), off, off_other), 0.0),
            ("relevance differs", arc_distance(space, params(0.7, 0.4), off, at(0.2)), 0.7),
            ("both relevant, rho=1", arc_distance(space, params(1.0, 1.0), at(0.0), at(1.0)), 2.0),
            ("rho=1/3 crossover", arc_distance(space, params(1.0, 1.0 / 3.0), at(0.0), at(1.0)), 1.0),
            (
                "embed omega=1 rho=1",
                float(np.max(np.abs(embed(space, params(1.0, 1.0), at(0.5)) - [1.0, 0.0]))),
                0.0,
            ),
            (
                "embed omega=2 rho=1/2",
                float(np.max(np.abs(embed(space, params(2.0, 0.5), at(0.5)) - np.sqrt(2.0)))),
                0.0,
            ),
            (
                "switched Matern52",
                arc_kernel(space, params(1.0, 0.5), off, at(0.8)),
                base_kappa(BaseCovariance.MATERN52, 1.0, 1.0),
            ),
            ("expquad at 1", base_kappa(BaseCovariance.EXP_QUADRATIC, 1.0, 1.0), float(np.exp(-0.5))),
            ("rq at 1", base_kappa(BaseCovariance.RATIONAL_QUADRATIC, 1.0, 1.0, 1.0), 2.0 / 3.0),
        ]
        errors = {label: abs(got - want) for label, got, want in cases}
        failed = [label for label, err in errors.items() if not err <= EXACT_TOL]
        worst = max(errors.values())
        detail = f"{len(cases)} cases, max error {worst:.3e}" if not failed else (
            f"failed: {', '.join(failed)}"
        )
        return PropertyResult("case_table", not failed, detail, worst)


def all_passed(results: Sequence[PropertyResult]) -> bool:
    return all(r.passed for r in results)
