import logging
import time
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

from src.application.data.use_cases import CreateSplitUseCase, LoadSplitUseCase, ensure_split
from src.application.shared.dtos import PPRResultDTO
from src.application.shared.exceptions import ConflictError, NotFoundError, ValidationError, domain_errors
from src.domain.model.entities import BipartiteGraph
from src.domain.model.services import build_graph
from src.domain.ppr.entities import PPRCache
from src.domain.ppr.events import PPRComputedEvent
from src.domain.ppr.repositories import PPRCacheRepository
from src.domain.ppr.services import PPRSamplerProvider, compute_ppr_block, quantize, truncate
from src.domain.ppr.value_objects import PPRConfig
from src.domain.shared.events import DomainEventPublisher
from src.domain.training.repositories import RunRepository
from src.domain.training.value_objects import RunConfig

logger = logging.getLogger(__name__)


class PrecomputePPRUseCase:
    """
    Use case for the offline PPR pass over every training user.
    """

    def __init__(
        self,
        cache_repository: PPRCacheRepository,
        event_publisher: Optional[DomainEventPublisher] = None,
        create_split_use_case: Optional[CreateSplitUseCase] = None,
        load_split_use_case: Optional[LoadSplitUseCase] = None,
    ):
        self._cache_repository = cache_repository
        self._event_publisher = event_publisher
        self._create_split = create_split_use_case
        self._load_split = load_split_use_case

    def build(
        self,
        graph: BipartiteGraph,
        users: Sequence[int],
        config: PPRConfig,
        top_t: Optional[int] = 1000,
        scale: float = 1.0,
        block_size: int = 64,
        n_jobs: int = 1,
    ) -> PPRCache:
        """
        Truncated, float32-rounded PPR vectors of `users`, computed block by block.
        """
        users = np.asarray(users, dtype=np.int64)
        blocks = [users[start : start + block_size] for start in range(0, users.size, block_size)]
        with domain_errors():
            if n_jobs == 1:
                results = [compute_ppr_block(graph, block, config) for block in blocks]
            else:
                results = Parallel(n_jobs=n_jobs, prefer="threads")(
                    delayed(compute_ppr_block)(graph, block, config) for block in blocks
                )
            vectors = {vector.user: quantize(truncate(vector, top_t)) for block in results for vector in block}
        return PPRCache(
            config=config,
            num_users=graph.num_users,
            num_items=graph.num_items,
            graph_fingerprint=graph.fingerprint,
            top_t=top_t,
            scale=scale,
            vectors=vectors,
        )

    def execute(
        self,
        graph: BipartiteGraph,
        users: Sequence[int],
        config: PPRConfig,
        path: Path,
        top_t: Optional[int] = 1000,
        scale: float = 1.0,
        block_size: int = 64,
        n_jobs: int = 1,
    ) -> PPRResultDTO:
        started = time.perf_counter()
        cache = self.build(graph, users, config, top_t, scale, block_size, n_jobs)
        path = self._cache_repository.save(cache, path)
        seconds = time.perf_counter() - started
        not_converged = sum(1 for vector in cache.vectors.values() if not vector.converged)

        if self._event_publisher:
            self._event_publisher.publish(
                PPRComputedEvent(
                    aggregate_id=str(path),
                    num_users=len(cache.vectors),
                    not_converged=not_converged,
                    top_t=top_t,
                    scale=scale,
                )
            )
        return PPRResultDTO(
            path=str(path),
            num_users=len(cache.vectors),
            not_converged=not_converged,
            top_t=top_t,
            scale=scale,
            seconds=seconds,
        )

    def execute_for_run(
        self, config: RunConfig, runs: RunRepository, block_size: int = 64, n_jobs: Optional[int] = None
    ) -> PPRResultDTO:
        """
        PPR cache of every training user of the run, written to the configured cache path
        or <run dir>/ppr_cache.bin. The split is created first when the run has none.
        """
        if self._create_split is None or self._load_split is None:
            raise ValidationError("Run-level PPR precomputation needs the split use cases")
        split = ensure_split(config, runs, self._create_split, self._load_split)
        with domain_errors():
            graph = build_graph(split.train)
        sampling = config.sampling
        path = Path(sampling.cache_path) if sampling.cache_path else runs.ppr_cache_path()
        return self.execute(
            graph,
            split.train.active_users(),
            config.ppr,
            path,
            top_t=sampling.top_t,
            scale=sampling.scale,
            block_size=block_size,
            n_jobs=n_jobs or config.training.n_jobs,
        )


class LoadPPRCacheUseCase:
    """
    Use case for reading a PPR cache and turning it into samplers for a given graph.
    """

    def __init__(self, cache_repository: PPRCacheRepository):
        self._cache_repository = cache_repository

    def execute(self, path: Path, graph: BipartiteGraph, users: Sequence[int]) -> PPRCache:
        """
        Raises:
            NotFoundError: If there is no cache at `path`
            ConflictError: If the cache was computed on another graph
            ValidationError: If the file is corrupt or misses some of `users`
        """
        path = Path(path)
        if not self._cache_repository.exists(path):
            raise NotFoundError(f"No PPR cache at {path}; run the ppr command first", extra={"path": str(path)})
        with domain_errors():
            cache = self._cache_repository.load(path)

        if cache.graph_fingerprint != graph.fingerprint:
            raise ConflictError(
                f"PPR cache {path} was computed on a different training graph",
                extra={"cache": cache.graph_fingerprint, "graph": graph.fingerprint},
            )
        missing = [int(u) for u in users if int(u) not in cache.vectors]
        if missing:
            raise ValidationError(
                f"PPR cache {path} misses {len(missing)} training user(s)", extra={"users": missing[:20]}
            )
        logger.info(f"Loaded PPR cache for {len(cache.vectors)} users from {path}")
        return cache

    def sampler(self, path: Path, graph: BipartiteGraph, users: Sequence[int], scale: Optional[float] = None):
        return PPRSamplerProvider(self.execute(path, graph, users), scale=scale)
