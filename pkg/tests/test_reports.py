import csv
import io
import json
from pathlib import Path

import pytest

from app.charge.models import ChargeError
from app.charge.services import charge_table, table_from_subgroups
from app.cube_io.services import read_cube
from app.molecule.services import build_molecule, load_subgroup_config
from app.reports.services import (
    CSV_COLUMNS,
    batch_summary,
    charges_csv,
    charges_json,
    compare_segmentations,
    compare_text,
    dumps,
    load_charge_table,
    read_charge_table,
    transfer_json,
)
from app.segmentation.services import segment_power_diagram
from app.transfer.services import partition_from_table, solve


@pytest.fixture()
def dimer_table(dimer_paths):
    hole, atoms = read_cube(dimer_paths["hole"])
    particle, _ = read_cube(dimer_paths["particle"])
    m = build_molecule(atoms, load_subgroup_config(dimer_paths["groups"]))
    return charge_table(hole, particle, segment_power_diagram(hole, m), m), m


def test_charges_json_has_atoms_subgroups_and_percent(dimer_table):
    table, m = dimer_table
    data = charges_json(table, m)
    assert data["unit"] == "raw"
    assert data["totals"]["hole"] == pytest.approx(1.0)
    assert [a["element"] for a in data["atoms"]] == ["H", "H"]
    assert [a["subgroup"] for a in data["atoms"]] == ["LEFT", "RIGHT"]
    left, right = data["subgroups"]
    assert left["members"] == [0]
    assert left["particle_percent"] == pytest.approx(10.0)
    assert right["diff_percent"] == pytest.approx(40.0)
    json.loads(dumps(data))


def test_charges_csv_layout(dimer_table):
    table, m = dimer_table
    rows = list(csv.DictReader(io.StringIO(charges_csv(table, m))))
    assert tuple(rows[0].keys()) == CSV_COLUMNS
    assert [r["kind"] for r in rows] == ["atom", "atom", "subgroup", "subgroup"]
    assert rows[2]["subgroup"] == "LEFT"
    assert float(rows[3]["particle"]) == pytest.approx(0.72)


def test_formats_doc_lists_every_csv_column_and_json_key(dimer_table):
    doc = (Path(__file__).parents[1] / "docs" / "formats.md").read_text(encoding="utf-8")
    for column in CSV_COLUMNS:
        assert f"`{column}`" in doc, column
    table, m = dimer_table
    data = charges_json(table, m)
    keys = set(data) | set(data["atoms"][0]) | set(data["subgroups"][0]) | set(data["totals"])
    for key in sorted(keys):
        assert f'"{key}"' in doc, key


def test_csv_without_percent_when_totals_vanish():
    table = table_from_subgroups(["A", "B"], [0.0, 0.0], [0.5, 0.5], unit="raw")
    data = charges_json(table)
    assert "hole_percent" not in data["subgroups"][0]


def test_dumps_is_stable():
    assert dumps({"b": 1, "a": [1.5]}) == '{\n  "b": 1,\n  "a": [\n    1.5\n  ]\n}\n'


def test_load_charge_table_defaults_to_percent():
    table = load_charge_table(
        '{"subgroups": [{"name": "A", "hole": 60, "particle": 40},'
        ' {"name": "B", "hole": 40, "particle": 60}]}'
    )
    assert table.unit == "percent"
    assert table.names == ("A", "B")
    assert table.n_atoms == 0
    assert table.totals == (100.0, 100.0)


def test_load_charge_table_round_trips_charges_json(dimer_table):
    table, m = dimer_table
    again = load_charge_table(dumps(charges_json(table, m)))
    assert again.unit == "raw"
    assert again.per_subgroup_particle.tolist() == pytest.approx([0.08, 0.72])


@pytest.mark.parametrize(
    "text,match",
    [
        ("{nope", "linha 1"),
        ('{"rows": []}', "subgroups"),
        ('{"subgroups": [{"name": "A", "hole": 1}]}', "incompleto"),
    ],
)
def test_load_charge_table_errors(text, match):
    with pytest.raises(ChargeError, match=match):
        load_charge_table(text)


def test_read_charge_table_prefixes_path(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("[]", encoding="utf-8")
    with pytest.raises(ChargeError, match="bad.json"):
        read_charge_table(path)


def test_transfer_json_structure(charges_dir):
    table = read_charge_table(charges_dir / "cu_phe.json")
    result = solve(partition_from_table(table), "quadratic")[0]
    data = transfer_json(result)
    assert data["method"] == "quadratic"
    assert data["T"]["rows"] == ["Cu"]
    assert data["T"]["columns"] == ["PHE1", "PHE2"]
    assert data["T"]["values"][0] == pytest.approx([28.9, 39.2])
    donor = data["partition"]["donors"][0]
    assert donor == {"index": 0, "name": "Cu", "deficit": pytest.approx(68.1)}
    assert data["full_matrix"]["names"] == ["Cu", "PHE1", "PHE2"]
    assert data["summary"]["charge_transfer"] == pytest.approx(68.1)
    assert data["preference"] == pytest.approx([34.05, 34.05])
    json.loads(dumps(data))


def test_compare_identical_tables():
    table = table_from_subgroups(["A", "B"], [0.6, 0.4], [0.3, 0.7], unit="raw")
    report = compare_segmentations(table, table)
    assert report["exceed_count"] == 0
    assert report["total_count"] == 4
    assert all(row["hole"]["abs_diff"] == 0.0 for row in report["rows"])
    assert compare_text(report).endswith(
        "0 such cases out of 4 differ by more than 2% (marked *)\n"
    )


def test_compare_flags_large_differences():
    power = table_from_subgroups(["A", "B"], [52.3, 47.7], [2.7, 97.3])
    gradient = table_from_subgroups(["A", "B"], [49.8, 50.2], [1.2, 98.8])
    report = compare_segmentations(power, gradient)
    assert report["rows"][0]["hole"]["exceeds"]
    assert not report["rows"][0]["particle"]["exceeds"]
    assert report["exceed_count"] == 2
    text = compare_text(report)
    assert "2.5*" in text
    assert text.splitlines()[-1] == "2 such cases out of 4 differ by more than 2% (marked *)"


def test_compare_requires_same_subgroups():
    a = table_from_subgroups(["A"], [1.0], [1.0])
    b = table_from_subgroups(["B"], [1.0], [1.0])
    with pytest.raises(ChargeError, match="diferentes"):
        compare_segmentations(a, b)


def test_batch_summary_counts():
    items = [{"name": "a", "status": "ok"}, {"name": "b", "status": "failed", "error": "x"}]
    summary = batch_summary(items, {"A": "#000000"})
    assert summary["ok"] == 1
    assert summary["failed"] == 1
    assert summary["colors"] == {"A": "#000000"}
