# core/bench/run_events.py
"""In-process run events for the bench: step timings, errors and metrics."""

import functools
import threading
import time
from typing import Any, Callable, Dict, List, Optional

from config.logging_config import get_module_logger

# Create a logger for this module
logger = get_module_logger("run_events")


class EventSubscriber:
    """Base class for event subscribers."""

    def __init__(self, event_types: Optional[List[str]] = None):
        self.event_types = event_types or ["*"]

    def handle_event(self, event: Dict[str, Any]) -> None:
        raise NotImplementedError("Subclasses must implement handle_event")

    def should_handle(self, event_type: str) -> bool:
        return "*" in self.event_types or event_type in self.event_types


class LoggingSubscriber(EventSubscriber):
    """Subscriber that logs events."""

    def handle_event(self, event: Dict[str, Any]) -> None:
        event_type = event.get("event_type", "unknown")
        run_id = event.get("run_id", "unknown")
        step = event.get("step", "unknown")

        if event_type == "step_start":
            logger.debug(f"Run {run_id}: step '{step}' started")
        elif event_type == "step_end":
            logger.info(f"Run {run_id}: step '{step}' completed in {event.get('duration', 0):.2f}s")
        elif event_type == "error":
            logger.error(f"Run {run_id}: error in step '{step}': {event.get('error', 'unknown error')}")
        elif event_type == "metric":
            logger.debug(
                f"Run {run_id}: metric '{event.get('metric_name')}' = {event.get('metric_value')} "
                f"in step '{step}'"
            )


class MetricsCollector(EventSubscriber):
    """Subscriber that collects metric values and step durations per run."""

    def __init__(self, event_types: Optional[List[str]] = None):
        super().__init__(event_types or ["metric", "step_end"])
        self.metrics: Dict[str, Dict[str, Dict[str, List[float]]]] = {}
        self.lock = threading.Lock()

    def handle_event(self, event: Dict[str, Any]) -> None:
        run_id = event.get("run_id", "unknown")
        step = event.get("step", "unknown")

        with self.lock:
            run = self.metrics.setdefault(run_id, {"steps": {}, "metrics": {}})
            if event.get("event_type") == "metric":
                run["metrics"].setdefault(event.get("metric_name", "unknown"), []).append(
                    float(event.get("metric_value", 0.0))
                )
            elif event.get("event_type") == "step_end":
                run["steps"].setdefault(step, []).append(float(event.get("duration", 0.0)))

    def get_metric_values(self, run_id: str, metric_name: str) -> List[float]:
        with self.lock:
            return list(self.metrics.get(run_id, {}).get("metrics", {}).get(metric_name, []))

    def get_step_durations(self, run_id: str) -> Dict[str, List[float]]:
        with self.lock:
            steps = self.metrics.get(run_id, {}).get("steps", {})
            return {step: list(durations) for step, durations in steps.items()}


class RunEventManager:
    """Dispatches run events to subscribers. One instance per process."""

    _instance = None
    _lock = threading.Lock()

    def __new__(cls):
        with cls._lock:
            if cls._instance is None:
                cls._instance = super(RunEventManager, cls).__new__(cls)
                cls._instance._initialized = False
        return cls._instance

    def __init__(self):
        if self._initialized:
            return
        self.subscribers: List[EventSubscriber] = []
        self.metrics_collector = MetricsCollector()
        self.lock = threading.Lock()
        self.register_subscriber(LoggingSubscriber())
        self.register_subscriber(self.metrics_collector)
        self._initialized = True
        logger.debug("Initialized run event manager")

    @classmethod
    def reset(cls) -> None:
        """Drop the process-wide instance (subscribers and collected metrics)."""
        with cls._lock:
            cls._instance = None

    def register_subscriber(self, subscriber: EventSubscriber) -> None:
        with self.lock:
            self.subscribers.append(subscriber)

    def publish_event(self, event: Dict[str, Any]) -> None:
        """Publish an event to every interested subscriber; subscriber errors are logged, not raised."""
        event.setdefault("timestamp", time.time())
        event_type = event.get("event_type", "unknown")
        for subscriber in self.subscribers:
            if subscriber.should_handle(event_type):
                try:
                    subscriber.handle_event(event)
                except Exception as e:
                    logger.error(f"Error in subscriber {subscriber.__class__.__name__}: {str(e)}")


class RunContext:
    """Context for one experiment run (e.g. "regress/arc_gp/fold3")."""

    def __init__(self, run_id: str, parent_id: Optional[str] = None):
        self.run_id = run_id
        self.parent_id = parent_id
        self.event_manager = RunEventManager()
        self.start_time = time.time()
        self.step_times: Dict[str, float] = {}

    def _publish(self, event_type: str, step: str, **fields: Any) -> None:
        self.event_manager.publish_event(
            {"event_type": event_type, "run_id": self.run_id, "parent_id": self.parent_id, "step": step, **fields}
        )

    def record_step_start(self, step: str) -> None:
        self.step_times[step] = time.time()
        self._publish("step_start", step)

    def record_step_end(self, step: str) -> None:
        duration = time.time() - self.step_times.get(step, self.start_time)
        self._publish("step_end", step, duration=duration)

    def record_error(self, step: str, error: Exception) -> None:
        self._publish("error", step, error=str(error), error_type=type(error).__name__)

    def record_metric(self, step: str, metric_name: str, value: float) -> None:
        self._publish("metric", step, metric_name=metric_name, metric_value=value)

    def metric_values(self, metric_name: str) -> List[float]:
        return self.event_manager.metrics_collector.get_metric_values(self.run_id, metric_name)


class step_timing:
    """Decorator recording start, end and errors of a step on a RunContext.

    The context is taken from the decorator, the `context` keyword, or the first
    positional argument, in that order; without one the function runs untimed.
    """

    def __init__(self, step_name: str, context: Optional[RunContext] = None):
        self.step_name = step_name
        self.context = context

    def __call__(self, func: Callable) -> Callable:
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            context = self.context
            if context is None and isinstance(kwargs.get("context"), RunContext):
                context = kwargs["context"]
            elif context is None and args and isinstance(args[0], RunContext):
                context = args[0]
            if context is None:
                return func(*args, **kwargs)

            context.record_step_start(self.step_name)
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                context.record_error(self.step_name, e)
                raise
            context.record_step_end(self.step_name)
            return result

        return wrapper
