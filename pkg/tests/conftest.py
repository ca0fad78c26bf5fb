from __future__ import annotations

import csv
import sys
from pathlib import Path

import numpy as np
import pytest

import ecobench
from ecobench.dea import DeaInstance, translate_outputs

DATA = Path(ecobench.__file__).resolve().parent / "data"
FIXTURE_CFG = DATA / "fixture" / "fixture.cfg"


def read_rows(name: str) -> list[dict]:
    with open(DATA / name, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="session")
def countries_2014() -> list[dict]:
    return read_rows("countries_2014.csv")


@pytest.fixture(scope="session")
def printed_repr(countries_2014) -> dict[str, float]:
    return {r["country"]: float(r["repr"]) for r in countries_2014}


def instance_from_rows(rows, shift: float = 1.0, scale=(1.0, 1.0)) -> DeaInstance:
    eci = np.array([float(r["eci"]) for r in rows])
    x = np.array([[float(r["co2_pc"]) * scale[0] for r in rows],
                  [float(r["ef_pc"]) * scale[1] for r in rows]])
    y = translate_outputs(eci) + (shift - 1.0)
    return DeaInstance(tuple(r["country"] for r in rows), x, y[None, :])


@pytest.fixture(scope="session")
def instance_2014(countries_2014) -> DeaInstance:
    return instance_from_rows(countries_2014)


@pytest.fixture(scope="session")
def fixture_cfg() -> Path:
    return FIXTURE_CFG


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.LINES:
        terminalreporter.section("acceptance criteria")
        for line in mod.LINES:
            terminalreporter.write_line(line)
