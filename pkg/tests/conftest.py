import pathlib

import pytest

from bimodal import atm as atm_mod

ROOT = pathlib.Path(__file__).resolve().parent.parent
M1_PATH = ROOT / "fixtures" / "m1.atm"


@pytest.fixture(scope="session")
def m1():
    return atm_mod.parse_atm(M1_PATH.read_text())


@pytest.fixture(scope="session")
def m1_path():
    return str(M1_PATH)
