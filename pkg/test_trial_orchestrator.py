#!/usr/bin/env python3
"""
Test seeded trial orchestration
"""

import asyncio

import numpy as np
import pytest

from mz_errors import TrialFailedError
from trial_orchestrator import TrialRunner, TrialTask


def _draw(input_data, rng):
    return {'value': float(rng.uniform()) * input_data['scale']}


def _fail_on_odd(input_data, rng):
    value = float(rng.uniform())
    if value > 0.5:
        raise ValueError("draw above one half")
    return {'value': value}


def test_results_independent_of_worker_count():
    """Same seed, different concurrency: identical ordered results"""
    results = []
    for workers in (1, 3, 8):
        runner = TrialRunner(max_workers=workers)
        runner.register_trial_handler('draw', _draw)
        results.append(runner.run('draw', {'scale': 2.0}, 12, seed=42))
    assert results[0] == results[1] == results[2]
    expected = [float(np.random.default_rng(s).uniform()) * 2.0
                for s in np.random.SeedSequence(42).spawn(12)]
    assert [r['value'] for r in results[0]] == expected


def test_different_seeds_differ():
    """Another root seed gives another stream"""
    runner = TrialRunner()
    runner.register_trial_handler('draw', _draw)
    assert runner.run('draw', {'scale': 1.0}, 4, seed=1) != runner.run('draw', {'scale': 1.0}, 4, seed=2)


@pytest.mark.asyncio
async def test_run_trials_records_status_and_order():
    """Tasks come back sorted, completed, with timestamps"""
    runner = TrialRunner(max_workers=2)
    runner.register_trial_handler('draw', _draw)
    tasks = await runner.run_trials('draw', {'scale': 1.0}, 5, seed=0)
    assert [t.trial_index for t in tasks] == list(range(5))
    assert all(t.status == "completed" for t in tasks)
    assert all(t.started_at <= t.completed_at for t in tasks)


@pytest.mark.asyncio
async def test_execute_trial_without_handler_fails_task():
    """Unknown experiment marks the task failed instead of raising"""
    runner = TrialRunner()
    task = TrialTask(trial_index=0, experiment='missing', input_data={})
    done = await runner.execute_trial(task, np.random.default_rng(0), asyncio.Semaphore(1))
    assert done.status == "failed"
    assert "No handler" in done.error


def test_failed_trials_raise_with_indices():
    """Handler exceptions surface as one TrialFailedError listing the trials"""
    runner = TrialRunner()
    runner.register_trial_handler('flaky', _fail_on_odd)
    with pytest.raises(TrialFailedError) as info:
        runner.run('flaky', {}, 20, seed=3)
    assert info.value.experiment == 'flaky'
    assert info.value.failures
    assert all("one half" in f['error'] for f in info.value.failures)
