"""Operational telemetry: counters, latency histograms, in-flight gauge,
rendered in the plain-text exposition format scraped by monitoring
systems (one `name{labels} value` line per sample, histograms as
cumulative `_bucket` lines plus `_sum`/`_count`).
"""

from __future__ import annotations

import math
import threading

# bucket upper bounds in milliseconds, spanning detector round-trips
DEFAULT_BUCKETS_MS = (5.0, 10.0, 25.0, 50.0, 100.0, 250.0, 500.0, 1000.0, 2500.0)


def _format_value(value: float) -> str:
    if value == math.inf:
        return "+Inf"
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def _format_labels(labels: dict[str, str]) -> str:
    if not labels:
        return ""
    inner = ",".join(f'{k}="{v}"' for k, v in sorted(labels.items()))
    return "{" + inner + "}"


def _empty_histogram(n_buckets: int) -> dict:
    return {"buckets": [0] * (n_buckets + 1), "sum": 0.0, "count": 0}


class TelemetryRegistry:
    """Thread-safe registry with stable rendering order.

    Known endpoints are registered up front so a fresh server exposes
    explicit zero counters.
    """

    def __init__(self, buckets_ms=DEFAULT_BUCKETS_MS):
        self.buckets_ms = tuple(buckets_ms)
        self._lock = threading.Lock()
        self._totals: dict[str, int] = {}                      # endpoint -> count
        self._by_status: dict[tuple[str, str], int] = {}       # (endpoint, class) -> count
        self._histograms: dict[str, dict] = {}
        self._in_flight = 0

    def register_endpoint(self, endpoint: str) -> None:
        with self._lock:
            self._totals.setdefault(endpoint, 0)
            self._histograms.setdefault(endpoint, _empty_histogram(len(self.buckets_ms)))

    def observe_request(self, endpoint: str, status: int, duration_ms: float) -> None:
        status_class = f"{status // 100}xx"
        with self._lock:
            self._totals[endpoint] = self._totals.get(endpoint, 0) + 1
            key = (endpoint, status_class)
            self._by_status[key] = self._by_status.get(key, 0) + 1
            hist = self._histograms.setdefault(
                endpoint, _empty_histogram(len(self.buckets_ms)))
            for i, bound in enumerate(self.buckets_ms):
                if duration_ms <= bound:
                    hist["buckets"][i] += 1
            hist["buckets"][-1] += 1  # +Inf
            hist["sum"] += duration_ms
            hist["count"] += 1

    def request_started(self) -> None:
        with self._lock:
            self._in_flight += 1

    def request_finished(self) -> None:
        with self._lock:
            self._in_flight -= 1

    def request_count(self, endpoint: str) -> int:
        with self._lock:
            return self._totals.get(endpoint, 0)

    def in_flight(self) -> int:
        with self._lock:
            return self._in_flight

    def render(self) -> str:
        """Exposition-format text; deterministic ordering."""
        lines = []
        with self._lock:
            lines.append("# HELP dietwise_requests_total Handled requests per endpoint.")
            lines.append("# TYPE dietwise_requests_total counter")
            for endpoint in sorted(self._totals):
                labels = _format_labels({"endpoint": endpoint})
                lines.append(f"dietwise_requests_total{labels} {self._totals[endpoint]}")

            lines.append("# HELP dietwise_requests_by_status_total Handled requests per endpoint and status class.")
            lines.append("# TYPE dietwise_requests_by_status_total counter")
            for (endpoint, status_class), count in sorted(self._by_status.items()):
                labels = _format_labels({"endpoint": endpoint, "status": status_class})
                lines.append(f"dietwise_requests_by_status_total{labels} {count}")

            lines.append("# HELP dietwise_response_ms Response time per endpoint in milliseconds.")
            lines.append("# TYPE dietwise_response_ms histogram")
            for endpoint in sorted(self._histograms):
                hist = self._histograms[endpoint]
                bounds = [*self.buckets_ms, math.inf]
                for bound, cumulative in zip(bounds, hist["buckets"]):
                    labels = _format_labels({"endpoint": endpoint,
                                             "le": _format_value(bound)})
                    lines.append(f"dietwise_response_ms_bucket{labels} {cumulative}")
                labels = _format_labels({"endpoint": endpoint})
                lines.append(f"dietwise_response_ms_sum{labels} {_format_value(hist['sum'])}")
                lines.append(f"dietwise_response_ms_count{labels} {hist['count']}")

            lines.append("# HELP dietwise_in_flight_requests Requests currently being handled.")
            lines.append("# TYPE dietwise_in_flight_requests gauge")
            lines.append(f"dietwise_in_flight_requests {self._in_flight}")
        return "\n".join(lines) + "\n"
