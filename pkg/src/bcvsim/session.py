"""Interactive stepping server for human-in-the-loop runs.

The protocol core is transport-agnostic: SimSession.handle_message() maps
one client message to one or more reply messages, and every client message
is acknowledged by a state frame or an error. Transports: newline-delimited
JSON over stdin/stdout (headless tests) and a websocket endpoint (browser
cockpit). In lockstep mode the simulation advances only on explicit ticks,
so interactive runs are reproducible; real-time mode paces ticks from wall
clock.

Human commands enter the same delayed, rate-limited, error-injected queue
as the simulated driver, and the session drives the identical Simulation
step used by batch runs, which is what makes recorded schedules replay
exactly.
"""

from __future__ import annotations

import asyncio
import json
import os
import sys
import uuid

from .config import config_from_dict, config_to_dict
from .exports import write_schedule_csv
from .experiment import Frame, RunConfig, Simulation

PROTOCOL_VERSION = 1

#: Cap on steps per tick message, so a bad client cannot stall the server.
MAX_TICK_BATCH = 10_000

DIRECTIONS = ("left", "right", "none")


def _deep_merge(base: dict, patch: dict) -> dict:
    out = dict(base)
    for key, value in patch.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = value
    return out


class SimSession:
    """One interactive simulation: owns the Simulation and its lifecycle."""

    def __init__(self, config: RunConfig | None = None, record_dir: str | None = None):
        self.config = config or RunConfig()
        self.session_id = uuid.uuid4().hex[:12]
        self.record_dir = record_dir
        self.started = False
        self.paused = False
        self.sim = Simulation(self.config)

    # -- message plumbing --------------------------------------------------

    def handle_message(self, message: dict) -> list[dict]:
        """Process one client message; always returns at least one reply.

        Malformed input yields an error reply and leaves the session in a
        consistent, steppable state.
        """
        try:
            if not isinstance(message, dict):
                return [self._error("bad-message", "message must be a JSON object")]
            mtype = message.get("type")
            if mtype == "config":
                return self._on_config(message)
            if mtype == "start":
                return self._on_start()
            if mtype == "pause":
                self.paused = True
                return [self.state_message()]
            if mtype == "reset":
                return self._on_reset()
            if mtype == "command":
                return self._on_command(message)
            if mtype == "tick":
                return self._on_tick(message)
            return [self._error("bad-message", f"unknown message type {mtype!r}")]
        except Exception as err:  # noqa: BLE001 - protocol boundary
            return [self._error("internal", str(err))]

    def _on_config(self, message: dict) -> list[dict]:
        if self.started and not self.sim.done:
            return [self._error("config-locked", "configuration is fixed while a run is live")]
        patch = message.get("config")
        if not isinstance(patch, dict):
            return [self._error("bad-message", "config message needs a 'config' object")]
        merged = _deep_merge(config_to_dict(self.config), patch)
        self.config = config_from_dict(merged)
        self.started = False
        self.paused = False
        self.sim = Simulation(self.config)
        return [self.hello_message(), self.state_message()]

    def _on_start(self) -> list[dict]:
        if self.sim.done:
            return [self._error("session-over", "run finished; reset to start again",
                                metrics=self.sim.result().metrics.as_dict())]
        self.started = True
        self.paused = False
        return [self.state_message()]

    def _on_reset(self) -> list[dict]:
        self._write_record()
        self.sim = Simulation(self.config)
        self.started = False
        self.paused = False
        return [self.hello_message(), self.state_message()]

    def _on_command(self, message: dict) -> list[dict]:
        direction = message.get("direction")
        if direction not in DIRECTIONS:
            return [self._error("unknown-command", f"direction {direction!r} not one of {DIRECTIONS}")]
        if not self.started:
            return [self._error("not-started", "send start before commands")]
        if self.sim.done:
            return [self._error("session-over", "run finished",
                                metrics=self.sim.result().metrics.as_dict())]
        if direction == "none":
            return [self.state_message()]
        accepted = self.sim.push_command(direction)
        if not accepted:
            return [self._error("rate-limited", "command channel is rate-limited")]
        return [self.state_message()]

    def _on_tick(self, message: dict) -> list[dict]:
        if not self.started:
            return [self._error("not-started", "send start before ticks")]
        if self.paused:
            return [self._error("paused", "session is paused; send start to resume")]
        if self.sim.done:
            return [self._error("session-over", "run finished; reset to start again",
                                metrics=self.sim.result().metrics.as_dict())]
        n = message.get("n", 1)
        if not isinstance(n, int) or not 1 <= n <= MAX_TICK_BATCH:
            return [self._error("bad-message", f"tick count must be an int in [1, {MAX_TICK_BATCH}]")]
        for _ in range(n):
            self.sim.step()
            if self.sim.done:
                break
        replies = [self.state_message()]
        if self.sim.done:
            self._write_record()
            replies.append(self.metrics_message())
        return replies

    # -- server->client payloads -------------------------------------------

    def hello_message(self) -> dict:
        track = self.config.track
        return {
            "v": PROTOCOL_VERSION,
            "type": "hello",
            "session": self.session_id,
            "config": config_to_dict(self.config),
            "track": {
                "points": [[x, y] for x, y in track.polyline(2.0)],
                "width": track.width,
                "length": track.length,
            },
        }

    def state_message(self) -> dict:
        sim = self.sim
        if sim.frames:
            frame = self._frame_payload(sim.frames[-1])
        else:
            x, y, heading = self.config.track.centerline_point(0.0)
            frame = self._frame_payload(Frame(
                t=0.0, x=x, y=y, heading=heading, e=0.0, de=0.0,
                u_brain=0.0, u_fuzzy=0.0, u_out=0.0, source="brain", regulations=0,
            ))
        frame["paused"] = self.paused
        frame["running"] = self.started and not sim.done
        frame["done"] = sim.done
        frame["outcome"] = sim.outcome
        frame["pending"] = len(sim.brain.queue)
        # remaining simulated seconds until the channel accepts a new command
        wait = sim.brain.last_issue + self.config.driver.min_interval - sim.state.t
        frame["cooldown"] = max(0.0, wait)
        if sim.frames:
            half = self.config.track.width / 2.0
            on_road = [f.e for f in sim.frames if abs(f.e) <= half] or [0.0]
            frame["max_abs_e"] = max(abs(e) for e in on_road)
            frame["rms_e"] = (sum(e * e for e in on_road) / len(on_road)) ** 0.5
        else:
            frame["max_abs_e"] = 0.0
            frame["rms_e"] = 0.0
        return {"v": PROTOCOL_VERSION, "type": "state", "frame": frame}

    @staticmethod
    def _frame_payload(f: Frame) -> dict:
        return {
            "t": f.t, "x": f.x, "y": f.y, "heading": f.heading,
            "e": f.e, "de": f.de, "u_brain": f.u_brain, "u_fuzzy": f.u_fuzzy,
            "u_out": f.u_out, "source": f.source, "regulations": f.regulations,
        }

    def metrics_message(self) -> dict:
        return {
            "v": PROTOCOL_VERSION,
            "type": "metrics",
            "metrics": self.sim.result().metrics.as_dict(),
        }

    @staticmethod
    def _error(code: str, message: str, **extra) -> dict:
        payload = {"v": PROTOCOL_VERSION, "type": "error", "code": code, "message": message}
        payload.update(extra)
        return payload

    def _write_record(self) -> None:
        if self.record_dir and self.sim.commands:
            os.makedirs(self.record_dir, exist_ok=True)
            path = os.path.join(self.record_dir, f"session_{self.session_id}_commands.csv")
            write_schedule_csv(self.sim.commands, path)


def run_stdio(config: RunConfig | None = None, record_dir: str | None = None,
              stdin=None, stdout=None) -> None:
    """Serve one session over newline-delimited JSON on stdin/stdout."""
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    session = SimSession(config, record_dir=record_dir)
    stdout.write(json.dumps(session.hello_message()) + "\n")
    stdout.flush()
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            message = json.loads(line)
        except json.JSONDecodeError as err:
            replies = [session._error("bad-message", f"invalid JSON: {err}")]
        else:
            replies = session.handle_message(message)
        for reply in replies:
            stdout.write(json.dumps(reply) + "\n")
        stdout.flush()
    session._write_record()


async def _serve_connection(websocket, config: RunConfig, record_dir: str | None):
    session = SimSession(config, record_dir=record_dir)
    realtime_task: asyncio.Task | None = None

    async def realtime_loop():
        # Push one frame per control period, paced by the real-time factor.
        try:
            while session.started and not session.paused and not session.sim.done:
                replies = session.handle_message({"type": "tick", "n": 1})
                for reply in replies:
                    await websocket.send(json.dumps(reply))
                await asyncio.sleep(session.config.dt)
        except asyncio.CancelledError:
            pass

    await websocket.send(json.dumps(session.hello_message()))
    try:
        async for raw in websocket:
            try:
                message = json.loads(raw)
            except json.JSONDecodeError as err:
                await websocket.send(json.dumps(session._error("bad-message", f"invalid JSON: {err}")))
                continue
            realtime = isinstance(message, dict) and message.get("type") == "start" \
                and message.get("realtime", True)
            replies = session.handle_message(message)
            for reply in replies:
                await websocket.send(json.dumps(reply))
            if realtime and session.started and not session.paused:
                if realtime_task is None or realtime_task.done():
                    realtime_task = asyncio.create_task(realtime_loop())
            elif realtime_task is not None and (session.paused or not session.started):
                realtime_task.cancel()
    finally:
        if realtime_task is not None:
            realtime_task.cancel()
        session._write_record()


def serve_websocket(config: RunConfig | None = None, host: str = "127.0.0.1",
                    port: int = 8700, record_dir: str | None = None) -> None:
    """Host interactive sessions on a websocket endpoint (one per connection)."""
    import websockets

    config = config or RunConfig()

    async def main():
        async def handler(ws):
            await _serve_connection(ws, config, record_dir)

        async with websockets.serve(handler, host, port):
            print(f"session server listening on ws://{host}:{port}", flush=True)
            await asyncio.Future()

    try:
        asyncio.run(main())
    except KeyboardInterrupt:
        pass
