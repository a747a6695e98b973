"""Road-network loading tests over the bundled fixture maps."""

import pytest

from scengen.sim import MapError, load_map, parse_map


def test_straight_map(data_path):
    network = load_map(data_path / "maps" / "straight2.map")
    assert len(network.lanes) == 2
    assert len(network.junctions) == 0
    assert len(network.signals) == 0
    assert network.lanes[0].length == 200.0


def test_fourway_map(data_path):
    network = load_map(data_path / "maps" / "fourway_signal.map")
    assert len(network.lanes) == 8
    assert len(network.junctions) == 1
    assert len(network.signals) == 1
    assert network.signals[0].kind == "traffic_light"


def test_t_junction_map(data_path):
    network = load_map(data_path / "maps" / "t_junction.map")
    assert len(network.lanes) == 6
    assert len(network.junctions) == 1
    assert network.signals[0].kind == "stop_sign"


def test_dangling_successor():
    text = "[lane l0]\nwidth = 3.5\npoints = 0,0 10,0\nsuccessors = nowhere\n"
    with pytest.raises(MapError) as excinfo:
        parse_map(text)
    assert excinfo.value.code == "map.dangling_successor"


def test_junction_referencing_missing_lane():
    text = "[lane l0]\nwidth = 3.5\npoints = 0,0 10,0\n\n[junction j0]\nlanes = l0 l9\n"
    with pytest.raises(MapError) as excinfo:
        parse_map(text)
    assert excinfo.value.code == "map.dangling_successor"


@pytest.mark.parametrize(
    "text",
    [
        "[lane l0]\nwidth = 3.5\npoints = 0,0\n",  # too few points
        "[lane l0]\nwidth = 0\npoints = 0,0 10,0\n",  # non-positive width
        "[lane l0]\npoints = 0,0 10,0\n",  # missing width
        "not a section\n",
        "[lane l0]\nwidth = 3.5\npoints = 0,0 10,0\n\n[lane l0]\nwidth = 3.5\npoints = 0,5 10,5\n",
        "[signal s0]\nat = 1,1\nkind = disco_ball\n",
    ],
)
def test_parse_errors(text):
    with pytest.raises(MapError) as excinfo:
        parse_map(text)
    assert excinfo.value.code == "map.parse_error"


def test_lane_geometry_helpers(data_path):
    network = load_map(data_path / "maps" / "straight2.map")
    lane = network.lanes[0]
    assert lane.point_at(50.0) == (50.0, 0.0)
    assert lane.tangent_at(50.0) == (1.0, 0.0)
    s, lat = lane.project(60.0, 1.0)
    assert s == 60.0
    assert lat == 1.0  # left of travel direction is +y here
    s, lat = lane.project(60.0, -2.0)
    assert lat == -2.0


def test_successors_resolve(data_path):
    network = load_map(data_path / "maps" / "fourway_signal.map")
    for lane in network.lanes:
        for successor in lane.successors:
            assert network.lane_by_id(successor)
