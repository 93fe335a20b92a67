"""Small hand-built systems shipped with the package."""

from importlib import resources

from .io import Instance, parse_cplan, parse_plan, parse_system

NAMES = ("sys_a", "sys_b", "sys_c", "sys_d", "sys_b_null", "sys_b_null_divert", "env2",
         "env2_shirk")


def fixture_text(filename: str) -> str:
    return resources.files("stableplan").joinpath("fixtures", filename).read_text()


def load_fixture(name: str) -> Instance:
    return parse_system(fixture_text(f"{name}.sys"))


def load_plan(name: str):
    return parse_plan(fixture_text(f"{name}.plan"))


def load_cplan(name: str):
    return parse_cplan(fixture_text(f"{name}.cplan"))
