"""Tests for the 'symbol' command and the main group."""

import json
from fractions import Fraction

import pytest
from click.testing import CliRunner

from cli.main import cli


@pytest.fixture
def runner():
    return CliRunner()


def test_tables_up_to_q_max(runner):
    result = runner.invoke(cli, ["symbol", "--q-max", "4"])
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert [t["q"] for t in data["tables"]] == [0, 1, 2, 3, 4]
    assert data["stirling_second"][4] == [0, 1, 7, 6, 1]
    assert data["stirling_first_signed"][4] == [0, -6, 11, -6, 1]


def test_q2_entries(runner):
    data = json.loads(runner.invoke(cli, ["symbol", "--q-max", "2"]).stdout)
    table = data["tables"][2]
    assert [Fraction(c) for c in table["anti_normal"]] == [2, -4, 1]
    assert [Fraction(c) for c in table["h_symbol"]] == [2, -4, 1]
    assert table["laguerre_closed_form"] == "falling_factorial"


def test_default_covers_twelve(runner):
    data = json.loads(runner.invoke(cli, ["symbol"]).stdout)
    assert len(data["tables"]) == 13


def test_csv_one_row_per_q(runner):
    result = runner.invoke(cli, ["symbol", "--q-max", "3", "--format", "csv"])
    assert len(result.stdout.splitlines()) == 5


def test_q_max_capped(runner):
    assert runner.invoke(cli, ["symbol", "--q-max", "13"]).exit_code == 2


def test_version(runner):
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert "0.1.0" in result.stdout


def test_help_lists_commands(runner):
    result = runner.invoke(cli, ["--help"])
    for name in ("partition", "figure2", "converge", "spin", "symbol"):
        assert name in result.stdout
