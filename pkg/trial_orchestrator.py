#!/usr/bin/env python3
"""
Trial Orchestrator - seeded, concurrent execution of randomized experiment trials

Each trial receives its own generator spawned from one SeedSequence, so results
depend only on (input_data, trials, seed) and never on worker count or the order
in which trials finish.
"""

import asyncio
import logging
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Callable, Dict, List, Optional

import numpy as np

import mz_settings
from mz_errors import TrialFailedError

# handler(input_data, rng) -> result dict
TrialHandler = Callable[[Dict[str, Any], np.random.Generator], Dict[str, Any]]


@dataclass
class TrialTask:
    """One randomized trial of an experiment"""
    trial_index: int
    experiment: str
    input_data: Dict[str, Any]
    status: str = "pending"  # pending, running, completed, failed
    result: Dict[str, Any] = field(default_factory=dict)
    error: Optional[str] = None
    started_at: Optional[datetime] = None
    completed_at: Optional[datetime] = None


class TrialRunner:
    """Runs registered trial handlers in worker threads under a concurrency limit"""

    def __init__(self, max_workers: Optional[int] = None):
        self.max_workers = max_workers or mz_settings.DEFAULT_WORKERS
        self.trial_handlers: Dict[str, TrialHandler] = {}
        self.logger = logging.getLogger('TrialRunner')

    def register_trial_handler(self, experiment: str, handler: TrialHandler):
        """Register the handler run for every trial of ``experiment``"""
        self.trial_handlers[experiment] = handler

    async def execute_trial(self, task: TrialTask, rng: np.random.Generator,
                            semaphore: Optional[asyncio.Semaphore] = None) -> TrialTask:
        """Execute one trial; failures are recorded on the task, not raised"""
        handler = self.trial_handlers.get(task.experiment)
        if handler is None:
            task.status = "failed"
            task.error = f"No handler for experiment: {task.experiment}"
            return task

        semaphore = semaphore or asyncio.Semaphore(1)
        async with semaphore:
            task.status = "running"
            task.started_at = datetime.now()
            try:
                task.result = await asyncio.to_thread(handler, task.input_data, rng)
                task.status = "completed"
            except Exception as e:
                task.error = str(e)
                task.status = "failed"
                self.logger.error(f"Trial {task.trial_index} of {task.experiment} failed: {e}")
            task.completed_at = datetime.now()
        return task

    async def run_trials(self, experiment: str, input_data: Dict[str, Any], trials: int,
                         seed: int) -> List[TrialTask]:
        """Run ``trials`` independent trials and return them ordered by trial index"""
        self.logger.info(f"Starting {trials} trial(s) of {experiment} (seed {seed})")
        generators = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(trials)]
        semaphore = asyncio.Semaphore(self.max_workers)
        tasks = [TrialTask(trial_index=i, experiment=experiment, input_data=input_data)
                 for i in range(trials)]

        done = await asyncio.gather(*(self.execute_trial(t, g, semaphore)
                                      for t, g in zip(tasks, generators)))
        done = sorted(done, key=lambda t: t.trial_index)

        failed = sum(1 for t in done if t.status == "failed")
        self.logger.info(f"Finished {experiment}: {len(done) - failed} completed, {failed} failed")
        return done

    def run(self, experiment: str, input_data: Dict[str, Any], trials: int,
            seed: int) -> List[Dict[str, Any]]:
        """Synchronous entry point; raises TrialFailedError if any trial failed"""
        done = asyncio.run(self.run_trials(experiment, input_data, trials, seed))
        failures = [{'trial_index': t.trial_index, 'error': t.error}
                    for t in done if t.status == "failed"]
        if failures:
            raise TrialFailedError(experiment, failures)
        return [t.result for t in done]
