"""Realtime bridge between the browser tablet and the simulation.

Wire format: WebSocket text frames carrying JSON, schema version 1.
Inbound:  {"v":1,"type":"pose","seq":n,"t_ms":t,"x":-1..1,"y":-1..1}
          {"v":1,"type":"shape","id":"T1".."T5"}      (before first pose)
          {"v":1,"type":"mode","mode":"teleoperation"}
          {"v":1,"type":"session_end","seq":n,"t_ms":t}
Outbound: {"v":1,"type":"session_start",...}, {"v":1,"type":"shape",...},
          {"v":1,"type":"spot","seq":n,"t_ms":t,"x_mm":..,"y_mm":..},
          {"v":1,"type":"session_end","report":{...}},
          {"v":1,"type":"error","code":..,"message":..}

Three actors share the session: network ingress (the WebSocket receive
loop), the control tick owner (a thread pacing the 4 kHz simulation
against the wall clock), and telemetry egress (an async task draining a
bounded drop-oldest queue). Poses travel through a most-recent-wins
mailbox; the control loop never blocks on a slow client.
"""

from __future__ import annotations

import asyncio
import json
import math
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .control import (
    C_DEFAULT,
    MappingMatrix,
    PoseMailbox,
    TabletPose,
    level_to_amps,
    map_tablet,
)
from .errors import ValidationError
from .harness import TELEOP_FPS, ramp_levels, trim_to_band
from .metrics import Trajectory, compare_to_target, execution_time
from .plant import PlantParams, PlantSim
from .session import SessionWriter
from .shapes import TargetShape, make_shape

PROTOCOL_VERSION = 1
TELEMETRY_RATE_HZ = 60.0
TELEMETRY_QUEUE_MAX = 256
POSE_TIMEOUT_S = 5.0


class TelemetryQueue:
    """Bounded drop-oldest queue between the tick owner and egress."""

    def __init__(self, maxlen: int = TELEMETRY_QUEUE_MAX):
        self._dq: deque = deque(maxlen=maxlen)
        self._dropped = 0
        self._lock = threading.Lock()

    def push(self, item) -> None:
        with self._lock:
            if len(self._dq) == self._dq.maxlen:
                self._dropped += 1
            self._dq.append(item)

    def drain(self) -> list:
        with self._lock:
            items = list(self._dq)
            self._dq.clear()
        return items

    def __len__(self) -> int:
        return len(self._dq)

    @property
    def dropped(self) -> int:
        return self._dropped


@dataclass
class SessionRecord:
    """Everything persisted for one live session."""

    poses: list = field(default_factory=list)     # (recv_t_s, px, py)
    spots: list = field(default_factory=list)     # (t_s, x_mm, y_mm)
    partial: bool = False
    report: Optional[dict] = None


class TeleopEngine:
    """Simulation core of one session, driven in sim time.

    Owns the plant, the pose mailbox, telemetry decimation and the
    capture record. ``advance_to`` steps the 4 kHz loop up to the given
    sim time; a pose posted before a tick affects that tick's command.
    """

    def __init__(self, params: PlantParams, shape: TargetShape,
                 matrix: Optional[MappingMatrix] = None, seed: int = 0,
                 telemetry_rate_hz: float = TELEMETRY_RATE_HZ,
                 capture_fps: float = TELEOP_FPS,
                 timeout_s: float = POSE_TIMEOUT_S):
        self.params = params
        self.shape = shape
        self.matrix = matrix or MappingMatrix.aligned(C_DEFAULT)
        rng = np.random.default_rng(seed) if params.current_noise_a > 0 else None
        self.sim = PlantSim(params, rng)
        self.mailbox = PoseMailbox()
        self.telemetry = TelemetryQueue()
        self.record = SessionRecord()
        self._emit_dt = 1.0 / telemetry_rate_hz
        self._next_emit = self._emit_dt
        self._capture_dt = 1.0 / capture_fps
        self._next_capture = self._capture_dt
        self._timeout_s = timeout_s
        self._last_pose_t: Optional[float] = None
        self._armed = False
        self._ramp: list = []
        self.timed_out = False
        self.ended = False

    # -- ingress side ------------------------------------------------------

    def post_pose(self, pose: TabletPose) -> None:
        self.mailbox.post(pose)
        self.record.poses.append((self.sim.t, pose.p_x, pose.p_y))
        self._last_pose_t = self.sim.t
        if not self._armed:
            cmd = map_tablet(pose, self.matrix)
            self._ramp = list(
                ramp_levels((0, 0), (cmd.level_x, cmd.level_y), 0.1,
                            self.params.dt_s)
            )
            self._armed = True

    # -- tick owner ---------------------------------------------------------

    def advance_to(self, t_sim: float) -> None:
        while self.sim.t < t_sim - 1e-12 and not self.ended:
            self._tick_once()

    def _tick_once(self) -> None:
        if self._last_pose_t is not None and \
                self.sim.t - self._last_pose_t > self._timeout_s:
            self.timed_out = True
            self.record.partial = True
            self.ended = True
            return
        if self._ramp:
            lv = self._ramp.pop(0)
            amps_x = level_to_amps(int(lv[0]))
            amps_y = level_to_amps(int(lv[1]))
        else:
            pose = self.mailbox.latest()
            if pose is None:
                amps_x = amps_y = 0.0
            else:
                cmd = map_tablet(pose, self.matrix)
                amps_x, amps_y = cmd.amps_x, cmd.amps_y
        self.sim.tick(amps_x, amps_y)
        if self.sim.t >= self._next_emit - 1e-12:
            spot = self.sim.spot()
            self.telemetry.push((spot.t_s, spot.x_mm, spot.y_mm))
            self._next_emit += self._emit_dt
        if self.sim.t >= self._next_capture - 1e-12:
            spot = self.sim.spot()
            self.record.spots.append((spot.t_s, spot.x_mm, spot.y_mm))
            self._next_capture += self._capture_dt

    # -- session end --------------------------------------------------------

    def finish(self) -> dict:
        """Score the recorded trace against the shape's centerline."""
        self.ended = True
        spots = self.record.spots
        report: dict = {
            "experiment": "teleop",
            "shape": self.shape.shape_id,
            "partial": self.record.partial,
            "n_poses": len(self.record.poses),
            "n_spots": len(spots),
            "telemetry_dropped": self.telemetry.dropped,
        }
        if len(spots) >= 2:
            traj = Trajectory(
                t_s=np.array([s[0] for s in spots]),
                x_mm=np.array([s[1] for s in spots]),
                y_mm=np.array([s[2] for s in spots]),
            )
            try:
                trimmed = trim_to_band(traj, self.shape)
                rep = compare_to_target(trimmed, self.shape.centerline())
                report["rmse_um"] = rep.rmse_mm * 1000.0
                report["max_um"] = rep.max_error_mm * 1000.0
                report["n_samples"] = rep.n_samples
            except ValidationError:
                report["rmse_um"] = None
                report["max_um"] = None
                report["n_samples"] = 0
            elapsed, moved = execution_time(traj)
            report["execution_time_s"] = elapsed
            report["moved"] = moved
        self.record.report = report
        return report


def frame(type_: str, **payload) -> str:
    msg = {"v": PROTOCOL_VERSION, "type": type_}
    msg.update(payload)
    return json.dumps(msg, sort_keys=True)


def parse_client_frame(text: str, last_seq: Optional[int]) -> dict:
    """Validate one inbound frame; raises ValidationError on any problem."""
    try:
        msg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON: {exc}") from exc
    if not isinstance(msg, dict):
        raise ValidationError("frame must be a JSON object")
    if msg.get("v") != PROTOCOL_VERSION:
        raise ValidationError(f"unsupported schema version {msg.get('v')!r}")
    mtype = msg.get("type")
    if mtype not in ("pose", "shape", "mode", "session_end"):
        raise ValidationError(f"unknown frame type {mtype!r}")
    if mtype in ("pose", "session_end"):
        seq = msg.get("seq")
        if not isinstance(seq, int):
            raise ValidationError("missing integer seq")
        if last_seq is not None and seq <= last_seq:
            raise ValidationError(f"seq {seq} not increasing (last {last_seq})")
    if mtype == "pose":
        for key in ("x", "y"):
            if not isinstance(msg.get(key), (int, float)) or \
                    not math.isfinite(msg[key]):
                raise ValidationError(f"pose {key} must be a finite number")
    if mtype == "shape":
        if msg.get("id") not in ("T1", "T2", "T3", "T4", "T5"):
            raise ValidationError(f"unknown shape id {msg.get('id')!r}")
    return msg


def persist_session(engine: TeleopEngine, directory: str, seed: int) -> None:
    record = engine.record
    writer = SessionWriter(directory, {
        "mode": "teleop",
        "seed": seed,
        "config_hash": engine.params.config_hash(),
        "shape": engine.shape.shape_id,
        "source": "telemetry",
        "partial": record.partial,
    })
    writer.write_meta()
    writer.write_params(engine.params)
    writer.write_csv("poses.csv", ["t_s", "px", "py"],
                     [[t, x, y] for t, x, y in record.poses])
    if record.spots:
        writer.write_spots(Trajectory(
            t_s=np.array([s[0] for s in record.spots]),
            x_mm=np.array([s[1] for s in record.spots]),
            y_mm=np.array([s[2] for s in record.spots]),
        ))
    if record.report is not None:
        writer.write_report(record.report)


def create_app(params: Optional[PlantParams] = None,
               shape: Optional[TargetShape] = None,
               session_dir: Optional[str] = None,
               seed: int = 0,
               realtime: bool = True):
    """FastAPI application exposing the /ws session endpoint."""
    params = params or PlantParams()
    default_shape = shape or make_shape("T1")
    app = FastAPI(title="maglaser teleop bridge")
    state = {"busy": False, "count": 0}

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        if state["busy"]:
            await ws.send_text(frame("error", code="busy",
                                     message="another session is active"))
            await ws.close()
            return
        state["busy"] = True
        state["count"] += 1
        engine = TeleopEngine(params, default_shape, seed=seed)
        out_seq = 0

        def send_seq(type_: str, **payload) -> str:
            nonlocal out_seq
            out_seq += 1
            return frame(type_, seq=out_seq,
                         t_ms=round(engine.sim.t * 1000.0, 3), **payload)

        stop = threading.Event()
        finalized = asyncio.Event()

        def control_loop():
            t0 = time.perf_counter()
            while not stop.is_set() and not engine.ended:
                target = time.perf_counter() - t0 if realtime else \
                    engine.sim.t + 0.002
                engine.advance_to(target)
                time.sleep(0.001)

        thread = threading.Thread(target=control_loop, daemon=True)
        thread.start()

        async def finalize():
            if finalized.is_set():
                return
            finalized.set()
            stop.set()
            engine.ended = True
            thread.join(timeout=2.0)
            report = engine.finish()
            if session_dir:
                try:
                    persist_session(engine, session_dir, seed)
                except OSError as exc:
                    report = {"error": f"session aborted: {exc}",
                              "partial": True}
                    try:
                        await ws.send_text(frame("error", code="storage",
                                                 message=str(exc)))
                    except Exception:
                        pass
            try:
                for (t_s, x_mm, y_mm) in engine.telemetry.drain():
                    await ws.send_text(send_seq("spot", x_mm=x_mm, y_mm=y_mm))
                await ws.send_text(send_seq("session_end", report=report))
                await ws.close()
            except Exception:
                pass
            state["busy"] = False

        async def egress():
            # telemetry plus the liveness watchdog: on pose timeout the
            # egress side finalizes and closes, unblocking the receive loop
            while not stop.is_set():
                try:
                    for (t_s, x_mm, y_mm) in engine.telemetry.drain():
                        await ws.send_text(send_seq("spot", x_mm=x_mm,
                                                    y_mm=y_mm))
                except Exception:
                    return
                if engine.timed_out:
                    await finalize()
                    return
                await asyncio.sleep(0.005)

        egress_task = asyncio.ensure_future(egress())
        last_seq: Optional[int] = None
        try:
            await ws.send_text(send_seq("session_start",
                                        shape=engine.shape.shape_id))
            await ws.send_text(send_seq("shape", **engine.shape.to_dict()))
            while True:
                text = await ws.receive_text()
                try:
                    msg = parse_client_frame(text, last_seq)
                except ValidationError as exc:
                    await ws.send_text(frame("error", code="bad-frame",
                                             message=str(exc)))
                    continue
                if msg["type"] == "pose":
                    last_seq = msg["seq"]
                    engine.post_pose(TabletPose(float(msg["x"]), float(msg["y"]),
                                                engine.sim.t))
                elif msg["type"] == "shape":
                    if engine.record.poses:
                        await ws.send_text(frame(
                            "error", code="busy",
                            message="shape change after session start"))
                    else:
                        engine.shape = make_shape(msg["id"])
                        await ws.send_text(send_seq("shape",
                                                    **engine.shape.to_dict()))
                elif msg["type"] == "mode":
                    # the bridge runs exactly one mode; acknowledge it,
                    # refuse anything else
                    if msg.get("mode") == "teleoperation":
                        await ws.send_text(send_seq("mode",
                                                    mode="teleoperation"))
                    else:
                        await ws.send_text(frame(
                            "error", code="busy",
                            message="bridge serves teleoperation only"))
                elif msg["type"] == "session_end":
                    last_seq = msg["seq"]
                    break
        except WebSocketDisconnect:
            engine.record.partial = True
        except RuntimeError:
            # receive after the watchdog closed the socket
            pass
        finally:
            stop.set()
            await finalize()
            egress_task.cancel()

    return app


def serve(port: int, params: Optional[PlantParams] = None,
          shape: Optional[TargetShape] = None,
          session_dir: Optional[str] = None, seed: int = 0) -> None:
    """Run the bridge under uvicorn (blocking)."""
    import uvicorn

    app = create_app(params=params, shape=shape, session_dir=session_dir,
                     seed=seed)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")
