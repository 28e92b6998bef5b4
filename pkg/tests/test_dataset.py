from __future__ import annotations

import json
import random
import warnings

import numpy as np
import pytest
from PIL import Image

from floorplan.dataset import (
    CorpusError,
    CorpusWarning,
    PlanRecord,
    box_disagreement,
    compute_stats,
    import_upstream,
    load_corpus,
    plan_from_json,
    plan_to_json,
    room_sections,
    save_corpus,
)
from floorplan.geometry import BBox, FloorPlan, Room, RoomType, rect_mask
from floorplan.imaging import label_image, load_label_png, save_label_png
from floorplan.synth import random_plan

R = RoomType
BALCONY_LINE = (
    '{"id": "b1", "split": "test", "boundary": "+ 87 66 18 23", "image": null, '
    '"rooms": [{"type": "Balcony", "x": 87, "y": 66, "h": 18, "w": 23}], '
    '"human_instruction": "A small balcony.", "artificial_instruction": null}\n'
)


def balcony_record() -> PlanRecord:
    mask = rect_mask(70, 50, 110, 90)
    return PlanRecord("b1", mask, (Room(R.BALCONY, BBox(87, 66, 18, 23)),), "A small balcony.", None, "test")


def test_empty_annotation_file(tmp_path):
    p = tmp_path / "ann.jsonl"
    p.write_text("")
    assert load_corpus(p) == []


def test_canonical_file_roundtrips_byte_identically(tmp_path):
    src = tmp_path / "a.jsonl"
    src.write_text(BALCONY_LINE)
    records = load_corpus(src)
    assert records[0].rooms == (Room(R.BALCONY, BBox(87, 66, 18, 23)),)
    out = tmp_path / "b.jsonl"
    save_corpus(records, out, write_images=False)
    assert out.read_bytes() == src.read_bytes()


def test_roundtrip_with_label_maps(tmp_path):
    rng = random.Random(0)
    recs = [balcony_record()]
    for i in range(4):
        fp = random_plan(rng, rng.randint(2, 8), rng.choice(["rect", "L"]))
        recs.append(PlanRecord(f"p{i}", fp.boundary, fp.rooms, None, ["one.", "two."], "train"))
    save_corpus(recs, tmp_path / "a" / "ann.jsonl")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        loaded = load_corpus(tmp_path / "a" / "ann.jsonl")
    save_corpus(loaded, tmp_path / "b" / "ann.jsonl")
    for name in ["ann.jsonl"] + [f"{r.id}.png" for r in recs]:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes(), name
    for a, b in zip(recs, loaded):
        assert a.plan == b.plan and a.artificial_instruction == b.artificial_instruction


def _write_fixture(tmp_path, label_box: tuple[int, int, int, int]):
    """Label map with a balcony at ``label_box`` while the JSON keeps BBox(87, 66, 18, 23)."""
    grid = np.zeros((256, 256), np.uint8)
    grid[40:100, 60:120] = 9
    x0, y0, x1, y1 = label_box
    grid[y0 : y1 + 1, x0 : x1 + 1] = R.BALCONY.label
    save_label_png(grid, tmp_path / "b1.png")
    line = json.loads(BALCONY_LINE)
    line["image"] = "b1.png"
    line["boundary"] = None
    (tmp_path / "ann.jsonl").write_text(json.dumps(line) + "\n")


def test_label_map_disagreement_warns(tmp_path):
    # JSON footprint is (76, 57, 98, 74); move the right edge out by 3 px
    _write_fixture(tmp_path, (76, 57, 101, 74))
    with pytest.warns(CorpusWarning, match="right edge"):
        load_corpus(tmp_path / "ann.jsonl")


def test_label_map_within_tolerance_is_quiet(tmp_path):
    _write_fixture(tmp_path, (74, 59, 100, 72))  # every edge off by exactly 2 px
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        (rec,) = load_corpus(tmp_path / "ann.jsonl")
    assert rec.label_map is not None and rec.boundary.sum() == 60 * 60


def test_inward_edge_warns(tmp_path):
    _write_fixture(tmp_path, (76, 61, 98, 74))  # top edge 4 px lower
    with pytest.warns(CorpusWarning, match="top edge"):
        load_corpus(tmp_path / "ann.jsonl")


def test_occlusion_by_later_type_is_not_disagreement():
    grid = np.zeros((256, 256), np.uint8)
    grid[10:50, 10:50] = R.LIVING_ROOM.label
    grid[10:50, 40:50] = R.KITCHEN.label  # kitchen painted over the living room's east strip
    living = Room(R.LIVING_ROOM, BBox(30, 30, 40, 40))
    assert box_disagreement(grid, living) == []


@pytest.mark.parametrize(
    "mutate, needle",
    [
        (lambda d: d.update(rooms=[]), "rooms"),
        (lambda d: d["rooms"][0].update(type="Garage"), "rooms/0/type"),
        (lambda d: d["rooms"][0].update(h=0), "rooms/0/h"),
        (lambda d: d.update(split="dev"), "split"),
        (lambda d: d.update(extra=1), "record"),
    ],
)
def test_schema_violations_name_the_record(tmp_path, mutate, needle):
    d = json.loads(BALCONY_LINE)
    mutate(d)
    p = tmp_path / "ann.jsonl"
    p.write_text(json.dumps(d) + "\n")
    with pytest.raises(CorpusError, match=needle) as exc:
        load_corpus(p)
    assert "ann.jsonl:1" in str(exc.value)


def test_duplicate_id_and_bad_json(tmp_path):
    p = tmp_path / "ann.jsonl"
    p.write_text(BALCONY_LINE + BALCONY_LINE)
    with pytest.raises(CorpusError, match="duplicate record id 'b1'"):
        load_corpus(p)
    p.write_text("{not json\n")
    with pytest.raises(CorpusError, match="invalid JSON"):
        load_corpus(p)


def test_unknown_label_value_in_map(tmp_path):
    _write_fixture(tmp_path, (76, 57, 98, 74))
    Image.fromarray(np.full((256, 256), 42, np.uint8), mode="L").save(tmp_path / "b1.png")
    with pytest.raises(CorpusError, match="record b1: .*unknown label value 42"):
        load_corpus(tmp_path / "ann.jsonl")


def test_full_span_outline_is_trimmed_with_warning(tmp_path):
    d = json.loads(BALCONY_LINE)
    d["boundary"] = None
    d["image"] = "wide.png"
    grid = np.full((256, 256), 9, np.uint8)
    grid[57:75, 76:99] = R.BALCONY.label  # matches the JSON footprint
    save_label_png(grid, tmp_path / "wide.png")
    (tmp_path / "ann.jsonl").write_text(json.dumps(d) + "\n")
    with pytest.warns(CorpusWarning, match="trimmed"):
        (rec,) = load_corpus(tmp_path / "ann.jsonl")
    assert rec.boundary.sum() == 255 * 255


def test_plan_json_roundtrip():
    rng = random.Random(3)
    fp = random_plan(rng, 5, "L")
    assert plan_from_json(plan_to_json(fp)) == fp
    assert plan_to_json(FloorPlan()) == {"rooms": []}
    with pytest.raises(CorpusError, match="schema"):
        plan_from_json({"rooms": [{"type": "Kitchen"}]})


# -- statistics ---------------------------------------------------------------


def _rec(i, human=None, artificial=None, rooms=((R.KITCHEN, BBox(10, 10, 4, 4)),)):
    return PlanRecord(f"r{i}", rect_mask(0, 0, 50, 50), tuple(Room(t, b) for t, b in rooms), human, artificial)


def test_stats_single_instruction():
    s = compute_stats([_rec(0, human="Big living room.")])
    assert s.human.words_per_instance == 3.0 and s.human.sentences_per_instance == 1.0
    assert s.artificial is None


def test_stats_counts_and_histogram():
    recs = [
        _rec(0, rooms=((R.KITCHEN, BBox(10, 10, 4, 4)), (R.BATHROOM, BBox(20, 20, 4, 4)))),
        _rec(1, rooms=((R.KITCHEN, BBox(10, 10, 4, 4)),)),
    ]
    s = compute_stats(recs)
    assert s.room_counts["Kitchen"] == 2 and s.room_counts["Bathroom"] == 1 and s.room_counts["Storage"] == 0
    assert s.rooms_per_plan == {1: 1, 2: 1}
    assert s.human is None


def test_stats_permutation_invariant():
    rng = random.Random(4)
    recs = [_rec(i, human=" ".join(["word"] * rng.randint(1, 30)) + ". End.", artificial=["a b.", "c d e."]) for i in range(12)]
    a = compute_stats(recs).to_json()
    rng.shuffle(recs)
    assert compute_stats(recs).to_json() == a


def test_room_sections_by_structure_and_first_mention():
    assert room_sections(["The kitchen is big.", "  ", "The bath is small."]) == ["The kitchen is big.", "The bath is small."]
    text = "The kitchen is north. It is big. The bathroom is next to the kitchen. Another sentence. The kitchen is 50 sqft."
    assert room_sections(text) == [
        "The kitchen is north. It is big. The kitchen is 50 sqft.",
        "The bathroom is next to the kitchen. Another sentence.",
    ]
    s = compute_stats([_rec(0, human=text)])
    assert s.human.words_per_room == (12 + 9) / 2
    assert s.human.sentences_per_room == (3 + 2) / 2


# -- upstream import ----------------------------------------------------------


def test_import_upstream_with_rgb_palette(tmp_path):
    img = np.zeros((256, 256, 3), np.uint8)
    img[:] = (255, 255, 255)
    img[20:120, 20:120] = (1, 1, 1)  # interior wall colour
    img[22:60, 22:118] = (200, 0, 0)  # living room
    img[62:118, 22:60] = (0, 200, 0)  # kitchen
    img[62:118, 62:118] = (0, 0, 200)  # bathroom
    src = tmp_path / "raw"
    src.mkdir()
    Image.fromarray(img).save(src / "0001.png")
    palette = {
        "values": {
            "255,255,255": "exterior",
            "1,1,1": "interior",
            "200,0,0": "LivingRoom",
            "0,200,0": "kitchen",
            "0,0,200": "bathroom",
        }
    }
    (tmp_path / "palette.json").write_text(json.dumps(palette))
    (tmp_path / "instr.json").write_text(json.dumps({"0001": {"human": "A home.", "split": "test"}}))
    (rec,) = import_upstream(src, tmp_path / "palette.json", tmp_path / "instr.json")
    assert rec.id == "0001" and rec.split == "test" and rec.human_instruction == "A home."
    assert {(r.type, r.bbox.footprint) for r in rec.rooms} == {
        (R.LIVING_ROOM, (22, 22, 117, 59)),
        (R.KITCHEN, (22, 62, 59, 117)),
        (R.BATHROOM, (62, 62, 117, 117)),
    }
    assert rec.boundary.sum() == 100 * 100
    img[0, 0] = (9, 9, 9)
    Image.fromarray(img).save(src / "0001.png")
    with pytest.raises(CorpusError, match="unknown label value"):
        import_upstream(src, tmp_path / "palette.json")


def test_import_upstream_channel_palette(tmp_path):
    img = np.zeros((256, 256, 4), np.uint8)
    img[..., 1] = 13
    img[30:60, 30:90, 1] = 0
    src = tmp_path / "raw"
    src.mkdir()
    Image.fromarray(img, mode="RGBA").save(src / "a.png")
    (tmp_path / "p.json").write_text(json.dumps({"channel": 1, "values": {"13": "exterior", "0": "MasterRoom"}}))
    (rec,) = import_upstream(src, tmp_path / "p.json")
    assert rec.rooms == (Room(R.MASTER_ROOM, BBox(60, 45, 30, 60)),)


# -- label maps -----------------------------------------------------------------


def test_label_png_roundtrip_and_palette(tmp_path):
    rng = random.Random(5)
    fp = random_plan(rng, 6, "L")
    grid = label_image(fp)
    assert set(np.unique(grid)) <= set(range(10))
    assert ((grid != 0) == fp.boundary).all()
    save_label_png(grid, tmp_path / "x.png")
    with Image.open(tmp_path / "x.png") as im:
        assert im.mode == "P"
        assert im.getpalette()[:3] == [255, 255, 255]
    assert np.array_equal(load_label_png(tmp_path / "x.png"), grid)


def test_label_png_rejects_bad_input(tmp_path):
    from floorplan.imaging import LabelMapError

    with pytest.raises(LabelMapError):
        save_label_png(np.full((256, 256), 12, np.uint8), tmp_path / "x.png")
    Image.fromarray(np.zeros((10, 10), np.uint8), mode="L").save(tmp_path / "small.png")
    with pytest.raises(LabelMapError, match="256x256"):
        load_label_png(tmp_path / "small.png")
    Image.fromarray(np.zeros((256, 256, 3), np.uint8)).save(tmp_path / "rgb.png")
    with pytest.raises(LabelMapError, match="mode"):
        load_label_png(tmp_path / "rgb.png")
