"""Worker runnables that drive one harmonic swarm each"""
import logging

from PySide6.QtCore import QRunnable, QThreadPool

from .shape import run_harmonic

logger = logging.getLogger(__name__)


class HarmonicSwarmWorker(QRunnable):
    """Runs one harmonic's swarm on a pool thread and keeps the outcome.

    Optional callbacks: 'started' (entry), 'finished' (HarmonicRun), 'error' (exception).
    """

    def __init__(self, entry, env, P, basis, settings, callbacks=None):
        super().__init__()
        # Results are read after the pool finishes
        self.setAutoDelete(False)
        self.entry = entry
        self.env = env
        self.P = P
        self.basis = basis
        self.settings = settings
        self.callbacks = callbacks or {}
        self.result = None
        self.error = None

    def _notify(self, event, payload):
        callback = self.callbacks.get(event)
        if callback:
            callback(payload)

    def run(self):
        try:
            self._notify('started', self.entry)
            self.result = run_harmonic(self.entry, self.env, self.P, self.basis, self.settings)
            self._notify('finished', self.result)
        except Exception as e:
            self.error = e
            self._notify('error', e)


def run_harmonics(plan, env, P, basis, settings, threads=1, callbacks=None):
    """Run every planned harmonic; results come back in plan order whatever ``threads`` is"""
    workers = [HarmonicSwarmWorker(entry, env, P, basis, settings, callbacks) for entry in plan.entries]

    if threads <= 1:
        for worker in workers:
            worker.run()
    else:
        pool = QThreadPool()
        pool.setMaxThreadCount(threads)
        logger.info("Running %d harmonic swarms on %d threads", len(workers), threads)
        for worker in workers:
            pool.start(worker)
        pool.waitForDone()

    for worker in workers:
        if worker.error is not None:
            raise worker.error
    return [worker.result for worker in workers]
