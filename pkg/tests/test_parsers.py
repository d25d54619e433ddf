"""Tests for the text formats."""

import pytest

from ha_quotas.core.errors import InstanceError, ParseError
from ha_quotas.core.instance import Matching
from ha_quotas.generators.roommates import RoommatesInstance
from ha_quotas.generators.x3c import X3CInstance
from ha_quotas.solvers.weighted import WeightedInstance
from ha_quotas.utils.parsers import (
    parse_instance,
    parse_matching,
    parse_roommates,
    parse_weighted_instance,
    parse_x3c,
    serialize_instance,
    serialize_matching,
    serialize_roommates,
    serialize_x3c,
)

EXAMPLE_TEXT = """\
# open-set example
applicants 4
projects 4
project p1 1 1
project p2 3 3
project p3 2 4
project p4 2 2
pref a1: p2 p1 p3
pref a2: p2 p4
pref a3: p3 p2 p4
pref a4: p3
"""


class TestParseInstance:
    def test_example(self, example):
        inst = parse_instance(EXAMPLE_TEXT)
        assert inst.applicants == example.applicants
        assert inst.projects == example.projects
        assert dict(inst.prefs) == dict(example.prefs)

    def test_serialize_round_trip(self, example):
        text = serialize_instance(example, header="example")
        assert text.startswith("# example\n")
        again = parse_instance(text)
        assert again.projects == example.projects
        assert dict(again.prefs) == dict(example.prefs)

    def test_empty_list_and_zero_lower_quota(self):
        inst = parse_instance("applicants 1\nprojects 1\nproject p 0 2\npref a:\n")
        assert inst.prefs["a"] == ()
        assert inst.project("p").lower == 1

    @pytest.mark.parametrize(
        "text, line_no",
        [
            ("applicants 1\nprojects 1\nproject p 1 1\nbogus\n", 4),
            ("applicants 1\napplicants 1\n", 2),
            ("applicants 1\nprojects 1\nproject p 3 2\npref a: p\n", 3),
            ("applicants 1\nprojects 2\nproject p 1 1\nproject p 1 1\n", 4),
            ("applicants 1\nprojects 1\nproject p 1 1\npref a: p p\n", 4),
            ("applicants 2\nprojects 1\nproject p 1 1\npref a: p\n", 1),
            ("applicants 1\nprojects 1\nproject p 1 1\n\npref a: q\n", 5),
            ("applicants 1\nprojects 1\nproject p x 1\n", 3),
        ],
    )
    def test_errors_carry_line_numbers(self, text, line_no):
        with pytest.raises(ParseError) as exc:
            parse_instance(text)
        assert exc.value.line_no == line_no
        assert str(exc.value).startswith(f"line {line_no}:")

    @pytest.mark.parametrize("subject, line_no", [("p1", 4), ("a3", 10), (None, 11)])
    def test_validation_errors_point_at_their_line(self, mocker, subject, line_no):
        mocker.patch(
            "ha_quotas.utils.parsers.validate_instance",
            side_effect=InstanceError("broken", subject),
        )
        with pytest.raises(ParseError) as exc:
            parse_instance(EXAMPLE_TEXT)
        assert exc.value.line_no == line_no

    def test_weights_rejected_in_plain_instances(self):
        with pytest.raises(ParseError):
            parse_instance(EXAMPLE_TEXT + "weight a1 p1 2\n")


class TestParseWeightedInstance:
    def test_weights(self):
        winst = parse_weighted_instance(EXAMPLE_TEXT + "weight a1 p1 2\nweight a4 p3 5\n")
        assert winst.weight("a1", "p1") == 2
        assert winst.weight("a1", "p2") == 0
        assert winst.max_weight == 5

    def test_non_edge(self):
        text = EXAMPLE_TEXT + "weight a4 p1 2\nweight a1 p1 1\n"
        with pytest.raises(ParseError) as exc:
            parse_weighted_instance(text)
        assert exc.value.line_no == 12

    def test_negative(self):
        with pytest.raises(ParseError):
            parse_weighted_instance(EXAMPLE_TEXT + "weight a1 p1 -1\n")

    def test_serialize_keeps_weights(self, example):
        winst = WeightedInstance(example, {("a3", "p4"): 7})
        assert parse_weighted_instance(serialize_instance(winst)).weight("a3", "p4") == 7


class TestMatchings:
    def test_parse(self, example, example_matching):
        text = "match a1 p1\n# a4 stays unmatched\nmatch a2 p4\nmatch a3 p4\n"
        assert parse_matching(text, example) == example_matching

    def test_empty(self):
        assert parse_matching("") == Matching.empty()

    def test_serialize_in_instance_order(self, example, example_matching):
        assert serialize_matching(example_matching, example) == (
            "match a1 p1\nmatch a2 p4\nmatch a3 p4\n"
        )

    def test_unknown_identifier(self, example):
        with pytest.raises(ParseError) as exc:
            parse_matching("match a1 p1\nmatch a9 p1\n", example)
        assert exc.value.line_no == 2

    def test_twice(self):
        with pytest.raises(ParseError):
            parse_matching("match a1 p1\nmatch a1 p2\n")


class TestX3CText:
    def test_round_trip(self):
        x = X3CInstance.of(["1", "2", "3"], [["3", "1", "2"]])
        text = serialize_x3c(x)
        assert "set 1 2 3" in text
        assert parse_x3c(text) == x

    def test_bad_line(self):
        with pytest.raises(ParseError):
            parse_x3c("element 1\nset 1 2\n")


class TestRoommatesText:
    def test_round_trip(self):
        r = RoommatesInstance(("u", "v", "w"), {"u": ("v",), "v": ("w", "u"), "w": ("v",)})
        again = parse_roommates(serialize_roommates(r))
        assert again.vertices == r.vertices
        assert dict(again.prefs) == dict(r.prefs)

    def test_asymmetric(self):
        with pytest.raises(ParseError):
            parse_roommates("vertex u: v\nvertex v:\n")
