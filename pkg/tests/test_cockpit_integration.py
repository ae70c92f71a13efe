"""Protocol-level cockpit scenario: an assisted lap driven like the UI.

Mirrors the browser client's message flow exactly (config with the driver
policy disabled, start, rate-limited left/right commands chosen only from
served frames), so the lap demonstrates the human-in-the-loop path without
a browser. Lockstep keeps it fast and reproducible.
"""

import pytest

from bcvsim.experiment import RunConfig
from bcvsim.session import SimSession


def steer_like_a_human(frame: dict) -> str | None:
    """Occasional corrective click from displayed state only: push back when
    drifting left/right of the line and the channel is ready."""
    if frame["cooldown"] > 0 or frame["pending"] > 0:
        return None
    if frame["e"] > 0.35:
        return "left"   # -75 deg: steer toward the line from the left side
    if frame["e"] < -0.35:
        return "right"
    return None


@pytest.mark.slow
def test_assisted_lap_through_the_protocol():
    session = SimSession(RunConfig(max_time=900.0))
    replies = session.handle_message({
        "type": "config",
        "config": {"run": {"mode": "shared-threshold", "driver_policy": "disabled"}},
    })
    assert replies[0]["type"] == "hello"
    assert session.handle_message({"type": "start"})[0]["type"] == "state"

    clicks = 0
    frame = None
    for _ in range(120_000):
        replies = session.handle_message({"type": "tick", "n": 10})
        frame = replies[0]["frame"]
        if frame["done"]:
            break
        direction = steer_like_a_human(frame)
        if direction is not None:
            reply = session.handle_message({"type": "command", "direction": direction})[0]
            assert reply["type"] in ("state", "error")
            if reply["type"] == "state":
                clicks += 1

    assert frame is not None and frame["done"]
    assert frame["outcome"] == "lap"
    metrics = session.sim.result().metrics
    assert metrics.lap_completed and not metrics.off_road
    # the run stayed assisted: commands passed the rate limit, the lap closed
    assert metrics.regulations == clicks
