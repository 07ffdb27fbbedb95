"""nvforge: NV-ensemble creation by light-ion implantation and PSB quantum-memory figures of merit."""

__version__ = "0.1.0"
SCHEMA_VERSION = "1"
