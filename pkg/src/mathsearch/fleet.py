"""Machine catalog handling and the budget/core-cap fleet rule.

The number of identical worker machines affordable for a configuration is
    min(floor(budget_per_hour / price_per_hour), floor(core_cap / cores))
Prices are decimals end to end; no float arithmetic touches money.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from decimal import Decimal, ROUND_FLOOR
from pathlib import Path
from typing import Sequence

__all__ = [
    "GROUPS",
    "MachineConfig",
    "BudgetSpec",
    "FleetSpec",
    "enumerate_fleet",
    "enumerate_price_table",
    "load_price_table",
    "PRICE_TABLE_FIELDS",
]

GROUPS = ("general", "compute_optimized", "memory_optimized")

PRICE_TABLE_FIELDS = ["name", "cores", "ram_gib", "disk_gb", "group", "ssd", "price_per_hour"]

_TRUE = {"true", "1", "yes"}
_FALSE = {"false", "0", "no"}


@dataclass(frozen=True)
class MachineConfig:
    name: str
    cores: int
    ram_gib: Decimal
    disk_gb: Decimal
    group: str
    ssd: bool
    price_per_hour: Decimal

    def __post_init__(self):
        if self.cores < 1:
            raise ValueError(f"{self.name}: cores must be >= 1")
        if self.price_per_hour <= 0:
            raise ValueError(f"{self.name}: price_per_hour must be > 0")
        if self.group not in GROUPS:
            raise ValueError(f"{self.name}: unknown group {self.group!r}")


@dataclass(frozen=True)
class BudgetSpec:
    budget_per_hour: Decimal
    core_cap: int = 16

    def __post_init__(self):
        if self.budget_per_hour <= 0:
            raise ValueError("budget_per_hour must be > 0")
        if self.core_cap < 1:
            raise ValueError("core_cap must be >= 1")


@dataclass(frozen=True)
class FleetSpec:
    config: MachineConfig
    machines: int


def enumerate_fleet(config: MachineConfig, budget: BudgetSpec) -> FleetSpec:
    """Apply the fleet rule; machines may come out 0 when the config is
    unaffordable within the budget."""
    by_budget = int(
        (budget.budget_per_hour / config.price_per_hour).to_integral_value(ROUND_FLOOR)
    )
    by_cores = budget.core_cap // config.cores
    return FleetSpec(config=config, machines=min(by_budget, by_cores))


def _parse_bool(raw: str, field: str) -> bool:
    v = raw.strip().lower()
    if v in _TRUE:
        return True
    if v in _FALSE:
        return False
    raise ValueError(f"bad boolean {raw!r} in column {field}")


def load_price_table(path: str | Path) -> list[MachineConfig]:
    """Read a price table CSV with columns name,cores,ram_gib,disk_gb,group,ssd,price_per_hour."""
    configs = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = set(PRICE_TABLE_FIELDS) - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"price table missing columns: {sorted(missing)}")
        for row in reader:
            configs.append(
                MachineConfig(
                    name=row["name"].strip(),
                    cores=int(row["cores"]),
                    ram_gib=Decimal(row["ram_gib"]),
                    disk_gb=Decimal(row["disk_gb"]),
                    group=row["group"].strip(),
                    ssd=_parse_bool(row["ssd"], "ssd"),
                    price_per_hour=Decimal(row["price_per_hour"]),
                )
            )
    return configs


def enumerate_price_table(
    configs: Sequence[MachineConfig], budget: BudgetSpec
) -> list[FleetSpec]:
    """Fleet rule applied to every row, preserving table order."""
    return [enumerate_fleet(c, budget) for c in configs]
