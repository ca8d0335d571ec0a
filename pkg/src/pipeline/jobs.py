"""
Per-trial job tracking and a thread pool to run them.
"""

import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Callable, Dict, Iterable, List, Optional, TypeVar

from tqdm import tqdm

from src.utils.errors import error_marker
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

T = TypeVar("T")


class JobStatus(Enum):
    """Job status enumeration."""
    QUEUED = "queued"
    PROCESSING = "processing"
    COMPLETED = "completed"
    FAILED = "failed"


@dataclass
class TrialJob:
    """One unit of per-trial work."""
    job_id: str
    status: JobStatus = JobStatus.QUEUED
    created_at: datetime = field(default_factory=datetime.now)
    started_at: Optional[datetime] = None
    completed_at: Optional[datetime] = None
    result: Any = None
    error: Optional[Exception] = None

    @property
    def error_message(self) -> Optional[str]:
        return error_marker(self.error) if self.error is not None else None


class TrialJobQueue:
    """
    In-memory registry of trial jobs.

    Jobs run on a thread pool; results are always read back in job-id order
    so the worker count never changes what callers see.
    """

    def __init__(self, workers: Optional[int] = None, show_progress: bool = False):
        self.jobs: Dict[str, TrialJob] = {}
        self.lock = threading.Lock()
        self.workers = workers or min(8, os.cpu_count() or 1)
        self.show_progress = show_progress

    def create_job(self, job_id: str) -> TrialJob:
        """Create a new job."""
        with self.lock:
            if job_id in self.jobs:
                raise ValueError(f"duplicate job id {job_id!r}")
            job = TrialJob(job_id=job_id)
            self.jobs[job_id] = job
            return job

    def get_job(self, job_id: str) -> Optional[TrialJob]:
        """Get job by ID."""
        return self.jobs.get(job_id)

    def update_job(
        self,
        job_id: str,
        status: JobStatus,
        result: Any = None,
        error: Optional[Exception] = None
    ) -> Optional[TrialJob]:
        """Update job status and outcome."""
        with self.lock:
            job = self.jobs.get(job_id)
            if not job:
                return None

            job.status = status
            if status == JobStatus.PROCESSING and not job.started_at:
                job.started_at = datetime.now()
            if status in (JobStatus.COMPLETED, JobStatus.FAILED):
                job.completed_at = datetime.now()
            if result is not None:
                job.result = result
            if error is not None:
                job.error = error
            return job

    def get_jobs_by_status(self, status: JobStatus) -> List[TrialJob]:
        """Jobs with the given status, sorted by id."""
        return [self.jobs[job_id] for job_id in sorted(self.jobs) if self.jobs[job_id].status == status]

    def _execute(self, job_id: str, work: Callable[[], T]) -> None:
        self.update_job(job_id, JobStatus.PROCESSING)
        try:
            result = work()
        except Exception as e:
            logger.debug(f"Job {job_id} failed: {e}")
            self.update_job(job_id, JobStatus.FAILED, error=e)
        else:
            self.update_job(job_id, JobStatus.COMPLETED, result=result)

    def run(self, tasks: Dict[str, Callable[[], T]], description: str = "trials") -> Dict[str, TrialJob]:
        """
        Run every task and wait for all of them.

        Args:
            tasks: job id -> zero-argument callable
            description: Progress bar label

        Returns:
            Jobs keyed by id, in sorted id order
        """
        for job_id in tasks:
            self.create_job(job_id)

        ordered = sorted(tasks)
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            futures = [pool.submit(self._execute, job_id, tasks[job_id]) for job_id in ordered]
            for future in tqdm(futures, desc=description, disable=not self.show_progress):
                future.result()

        failed = self.get_jobs_by_status(JobStatus.FAILED)
        if failed:
            logger.warning(f"{len(failed)} of {len(ordered)} {description} failed")
        return {job_id: self.jobs[job_id] for job_id in ordered}


def run_parallel(
    items: Iterable[str],
    work: Callable[[str], T],
    workers: Optional[int] = None,
    show_progress: bool = False,
    description: str = "trials",
) -> Dict[str, TrialJob]:
    """Run ``work(item)`` for each item on a fresh queue."""
    queue = TrialJobQueue(workers=workers, show_progress=show_progress)
    return queue.run({item: (lambda item=item: work(item)) for item in items}, description=description)
