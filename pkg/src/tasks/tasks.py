"""
Background runs of the long recsys commands.

Tasks receive the validated configuration as a plain dict and validate it again.
"""

import logging
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, Optional

from celery import shared_task
from django.conf import settings

from src.infrastructure.dependency_injection.container import get_container
from src.recsys.serializers import parse_run_config

logger = logging.getLogger(__name__)


@shared_task(name="recsys.precompute_ppr", time_limit=settings.RECSYS_PPR_TASK_TIME_LIMIT)
def precompute_ppr_task(
    config: Dict[str, Any], out_dir: str, block_size: Optional[int] = None, n_jobs: Optional[int] = None
) -> Dict[str, Any]:
    container = get_container()
    run_config = parse_run_config(config)
    result = container.precompute_ppr_use_case.execute_for_run(
        run_config,
        container.run_repository(Path(out_dir)),
        block_size=block_size or settings.RECSYS_PPR_BLOCK_SIZE,
        n_jobs=n_jobs,
    )
    logger.info(f"PPR cache for {result.num_users} users written to {result.path}")
    return asdict(result)


@shared_task(name="recsys.train")
def train_run_task(config: Dict[str, Any], out_dir: str) -> Dict[str, Any]:
    container = get_container()
    result = container.train_model_use_case.execute(
        parse_run_config(config), container.run_repository(Path(out_dir))
    )
    return asdict(result)
