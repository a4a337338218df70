"""InfluxDB telemetry writer - optional dependency."""
import os
from datetime import datetime, timezone
from typing import Any, Dict, Optional

from utils.logging import get_logger

# Import opcional
try:
    from influxdb_client import InfluxDBClient, Point, WritePrecision
    from influxdb_client.client.write_api import SYNCHRONOUS
    INFLUX_AVAILABLE = True
except ImportError:
    INFLUX_AVAILABLE = False


logger = get_logger('telemetry')


class InfluxWriter:
    """Writes evaluation results to InfluxDB if available."""

    def __init__(self, run_id: Optional[str] = None):
        """Initialize InfluxDB writer."""
        self.enabled = False
        self.run_id = run_id or datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S")

        if not INFLUX_AVAILABLE:
            logger.debug("InfluxDB client not installed")
            return

        influx_url = os.getenv('INFLUXDB_URL')
        if not influx_url:
            logger.debug("INFLUXDB_URL not set - telemetry disabled")
            return

        try:
            self.client = InfluxDBClient(
                url=influx_url,
                token=os.getenv('INFLUXDB_TOKEN', 'default-token'),
                org=os.getenv('INFLUXDB_ORG', 'robust-choice-org')
            )
            self.write_api = self.client.write_api(write_options=SYNCHRONOUS)
            self.bucket = os.getenv('INFLUXDB_BUCKET', 'robust-choice')
            self.enabled = True
            logger.info(f"InfluxDB telemetry enabled → {self.bucket}")
        except Exception as e:
            logger.warning(f"InfluxDB connection failed: {e}")
            self.enabled = False

    def _write(self, measurement: str, point) -> None:
        try:
            self.write_api.write(bucket=self.bucket, record=point.time(datetime.now(timezone.utc), WritePrecision.MS))
        except Exception as e:
            logger.warning(f"Failed to write {measurement}: {e}")

    def write_evaluation(self, problem: str, act: str, value: float, method: str, binding_index: int) -> None:
        """Write one criterion value."""
        if not self.enabled:
            return
        self._write("criterion_value",
            Point("criterion_value")
            .tag("run", self.run_id)
            .tag("problem", problem)
            .tag("act", act)
            .tag("method", method)
            .field("value", float(value))
            .field("binding_model_index", int(binding_index))
        )

    def write_sweep_point(self, problem: str, act: str, lam: float, value: float) -> None:
        """Write one (lambda, value) pair of a sweep; lambda=inf is sent as -1."""
        if not self.enabled:
            return
        self._write("lambda_sweep",
            Point("lambda_sweep")
            .tag("run", self.run_id)
            .tag("problem", problem)
            .tag("act", act)
            .field("lambda", float(lam) if lam != float('inf') else -1.0)
            .field("value", float(value))
        )

    def write_admissibility(self, problem: str, metrics: Dict[str, Any]) -> None:
        """Write the summary of a solve run."""
        if not self.enabled:
            return
        self._write("admissibility",
            Point("admissibility")
            .tag("run", self.run_id)
            .tag("problem", problem)
            .field("value", float(metrics.get('value', 0.0)))
            .field("optimal", int(metrics.get('optimal', 0)))
            .field("weakly_admissible", int(metrics.get('weakly_admissible', 0)))
            .field("admissible", int(metrics.get('admissible', 0)))
        )

    def close(self):
        """Close InfluxDB connection."""
        if self.enabled and hasattr(self, 'client'):
            try:
                self.client.close()
                logger.debug("InfluxDB connection closed")
            except Exception as e:
                logger.warning(f"Error closing InfluxDB: {e}")
