import pytest

import beaconplan as bp

# Reference channel / walker parameters used across the suite.
TABLE1_CHANNEL = dict(beta=3.0, sigma=1.732, p0=-59.0)
TABLE1_PDR = dict(step_length=0.625, dmax=0.0283, sigma_sn=0.0446)


@pytest.fixture
def channel():
    return bp.ChannelModel(**TABLE1_CHANNEL)


@pytest.fixture
def symmetric_scene(channel):
    """Four beacons 5 m from a central user on a 20x20 plan: the canonical
    isotropic-information configuration."""
    plan = bp.Floorplan(20.0, 20.0)
    user = bp.Point2(10.0, 10.0)
    layout = bp.BeaconLayout(
        plan,
        [
            bp.Beacon("east", bp.Point2(15.0, 10.0)),
            bp.Beacon("west", bp.Point2(5.0, 10.0)),
            bp.Beacon("north", bp.Point2(10.0, 15.0)),
            bp.Beacon("south", bp.Point2(10.0, 5.0)),
        ],
    )
    return channel, layout, user


@pytest.fixture
def pdr_tau1():
    return bp.PdrParams(step_period=1.0, **TABLE1_PDR)
