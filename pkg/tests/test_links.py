from hypothesis import given
from hypothesis import strategies as st

from nomadsim.links import (
    Blockage,
    EnvironmentState,
    Interval,
    Rain,
    assign_antennas,
    backhaul_up,
    default_rat_catalog,
    link_quality,
    pair_key,
    rat_by_name,
)

RATS = rat_by_name(default_rat_catalog())


def test_mmw_in_range_with_los():
    q = link_quality(RATS["mmw26"], 300.0, los=True)
    assert (q.available, q.capacity_mbps, q.latency_ms) == (True, 1000.0, 1.0)


def test_mmw_blocked():
    q = link_quality(RATS["mmw26"], 300.0, los=False)
    assert not q.available and q.capacity_mbps == 0.0


def test_long_range_reaches_five_km_without_los():
    assert link_quality(RATS["long_range"], 5000.0, los=False).available


def test_rain_only_hits_weather_sensitive_rats():
    assert not link_quality(RATS["mmw26"], 10.0, rain=Rain.HEAVY).available
    assert link_quality(RATS["local_cell"], 10.0, rain=Rain.HEAVY).available


def test_range_edge_is_inclusive():
    assert link_quality(RATS["local_cell"], 1000.0).available
    assert not link_quality(RATS["local_cell"], 1000.0001).available


def test_assign_antennas_examples():
    assert assign_antennas("NM", ["A", "B"], 0).peers("NM") == []
    two = assign_antennas("NM", ["A", "B", "C"], 2)
    assert two.peers("NM") == ["A", "B"]
    three = assign_antennas("NM", ["A"], 3)
    assert three.peers("NM") == ["A"]
    assert sum(p is None for p in three.slots.values()) == 2


@given(st.lists(st.sampled_from("ABCDEFG"), max_size=12), st.integers(0, 6))
def test_assign_antennas_properties(demands, antennas):
    peers = assign_antennas("NM", demands, antennas).peers("NM")
    assert len(peers) <= antennas
    assert len(set(peers)) == len(peers)
    first_seen = list(dict.fromkeys(demands))
    assert peers == first_seen[:antennas]


def test_backhaul_up_examples():
    assert backhaul_up(EnvironmentState(), 123.0)
    env = EnvironmentState(backhaul_outages=(Interval(100.0, 200.0),))
    assert not backhaul_up(env, 150.0)
    assert not backhaul_up(env, 100.0)
    assert backhaul_up(env, 200.0)


@given(st.lists(st.tuples(st.integers(0, 50), st.integers(1, 20)), max_size=5), st.integers(0, 80))
def test_backhaul_up_matches_membership_oracle(spans, t):
    intervals = tuple(Interval(float(s), float(s + d)) for s, d in spans)
    down = any(s <= t < s + d for s, d in spans)
    assert backhaul_up(EnvironmentState(backhaul_outages=intervals), float(t)) is not down


def test_blockage_is_symmetric_and_half_open():
    env = EnvironmentState(blockages=(Blockage("B", "A", 5.0, 10.0),))
    assert not env.los("A", "B", 5.0) and not env.los("B", "A", 9.9)
    assert env.los("A", "B", 10.0) and env.los("A", "C", 7.0)


def test_change_times_and_overrides():
    from nomadsim.links import CapacityWindow

    env = EnvironmentState(
        rain=(Interval(1.0, 2.0),),
        backhaul_capacity=(CapacityWindow("A", 3.0, 4.0, 7.0),),
    )
    assert env.change_times() == [1.0, 2.0, 3.0, 4.0]
    assert env.rain_at(1.5) is Rain.HEAVY and env.rain_at(2.0) is Rain.NONE
    assert env.capacity_override("A", 3.5) == 7.0 and env.capacity_override("A", 4.0) is None


def test_pair_key_orders():
    assert pair_key("b", "a") == ("a", "b") == pair_key("a", "b")
