"""Flight-control policies.

A policy maps an observation (grayscale image, sensor triple, previous
commands) to one of the five flight commands. Three implementations:

- ScriptedPolicy: replays a fixed command list (tests); repeats its last
  command if asked beyond the end.
- OraclePolicy: replays the planner's optimal path for the flight's
  scene, realizing the planner's guarantee.
- ExternalPolicy: drives an out-of-process model over a line-delimited
  JSON protocol on standard streams or a TCP socket.

Wire protocol (one JSON object per line):
  handshake  ->  {"type":"hello","image_w":W,"image_h":H,"prev_k":K}
             <-  {"type":"ready"}
  per step   ->  {"type":"obs","flight_id":n,"step":n,
                  "image":{"w":W,"h":H,"pixels_b64":"..."},
                  "sensors":{"height_m":f,"tof_m":f,"cmd_count":n},
                  "prev_cmds":[c,...]}
             <-  {"type":"cmd","command":"takeoff|land|forward|cw|ccw"}
  flight end ->  {"type":"done","outcome":"..."}

Protocol failures (timeout, malformed response, broken connection) raise
a PolicyError; the harness surfaces them as errors, never as outcomes.
"""

from __future__ import annotations

import base64
import json
import shlex
import socket
import subprocess
from typing import List, Optional, Sequence

from .camera import Image
from .drone import COMMAND_BY_NAME, COMMAND_NAMES, DroneState, FlightCommand, SensorReading
from .planner import PlanResult, PlannerConfig, optimal_flight_path
from .scene import Scene

DEFAULT_STEP_TIMEOUT_S = 10.0


class PolicyError(RuntimeError):
    """The policy violated its protocol (not a flight outcome)."""


class PolicyTimeoutError(PolicyError):
    pass


class PolicyMalformedError(PolicyError):
    pass


class PolicyBrokenError(PolicyError):
    pass


class Policy:
    """Base class; subclasses must implement observe()."""

    def begin_flight(self, scene: Scene, flight_id: int,
                     plan: Optional[PlanResult] = None) -> None:
        pass

    def observe(self, image: Image, sensors: SensorReading,
                prev_cmds: Sequence[int]) -> FlightCommand:
        raise NotImplementedError

    def end_flight(self, outcome: str) -> None:
        pass

    def close(self) -> None:
        pass


class ScriptedPolicy(Policy):
    def __init__(self, commands: Sequence[FlightCommand]):
        if not commands:
            raise ValueError("scripted policy needs at least one command")
        self.commands = list(commands)
        self._next = 0

    def begin_flight(self, scene, flight_id, plan=None):
        self._next = 0

    def observe(self, image, sensors, prev_cmds):
        idx = min(self._next, len(self.commands) - 1)
        self._next += 1
        return self.commands[idx]


class OraclePolicy(Policy):
    """Replays the optimal flight path; ignores the observations."""

    def __init__(self, planner_cfg: Optional[PlannerConfig] = None):
        self.planner_cfg = planner_cfg if planner_cfg is not None else PlannerConfig()
        self._path: List[FlightCommand] = []
        self._next = 0

    def begin_flight(self, scene, flight_id, plan=None):
        if plan is None:
            plan = optimal_flight_path(scene, DroneState.at_start(scene), self.planner_cfg)
        self._path = list(plan.path)
        self._next = 0

    def observe(self, image, sensors, prev_cmds):
        if self._next < len(self._path):
            cmd = self._path[self._next]
            self._next += 1
            return cmd
        return FlightCommand.LAND  # exhausted or empty plan: try to settle

    @property
    def path_length(self) -> int:
        return len(self._path)


class _LineChannel:
    """Line transport over a subprocess' stdio or a TCP socket."""

    def __init__(self, proc: Optional[subprocess.Popen] = None,
                 sock: Optional[socket.socket] = None):
        if (proc is None) == (sock is None):
            raise ValueError("exactly one transport required")
        self._proc = proc
        self._sock = sock
        self._sock_file = sock.makefile("rwb") if sock is not None else None

    def send_line(self, line: str) -> None:
        data = line.encode("utf-8") + b"\n"
        try:
            if self._proc is not None:
                self._proc.stdin.write(data)
                self._proc.stdin.flush()
            else:
                self._sock_file.write(data)
                self._sock_file.flush()
        except (BrokenPipeError, OSError) as exc:
            raise PolicyBrokenError(f"connection lost while sending: {exc}") from exc

    def recv_line(self, timeout: float) -> str:
        if self._proc is not None:
            import select
            ready, _, _ = select.select([self._proc.stdout], [], [], timeout)
            if not ready:
                raise PolicyTimeoutError(f"no response within {timeout} s")
            line = self._proc.stdout.readline()
        else:
            self._sock.settimeout(timeout)
            try:
                line = self._sock_file.readline()
            except socket.timeout as exc:
                raise PolicyTimeoutError(f"no response within {timeout} s") from exc
        if not line:
            raise PolicyBrokenError("connection closed by policy")
        return line.decode("utf-8")

    def close(self) -> None:
        if self._proc is not None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            self._proc.terminate()
            try:
                self._proc.wait(timeout=2.0)
            except subprocess.TimeoutExpired:
                self._proc.kill()
        else:
            self._sock_file.close()
            self._sock.close()


class ExternalPolicy(Policy):
    def __init__(self, channel: _LineChannel, image_w: int, image_h: int, prev_k: int,
                 step_timeout: float = DEFAULT_STEP_TIMEOUT_S):
        self._channel = channel
        self._timeout = step_timeout
        self._image_w = image_w
        self._image_h = image_h
        self._prev_k = prev_k
        self._flight_id = 0
        self._step = 0
        self._ready = False

    @classmethod
    def spawn(cls, command: str, image_w: int, image_h: int, prev_k: int,
              step_timeout: float = DEFAULT_STEP_TIMEOUT_S) -> "ExternalPolicy":
        proc = subprocess.Popen(shlex.split(command), stdin=subprocess.PIPE,
                                stdout=subprocess.PIPE)
        return cls(_LineChannel(proc=proc), image_w, image_h, prev_k, step_timeout)

    @classmethod
    def connect(cls, host: str, port: int, image_w: int, image_h: int, prev_k: int,
                step_timeout: float = DEFAULT_STEP_TIMEOUT_S) -> "ExternalPolicy":
        sock = socket.create_connection((host, port), timeout=step_timeout)
        return cls(_LineChannel(sock=sock), image_w, image_h, prev_k, step_timeout)

    @classmethod
    def from_spec(cls, spec: str, image_w: int, image_h: int, prev_k: int,
                  step_timeout: float = DEFAULT_STEP_TIMEOUT_S) -> "ExternalPolicy":
        """Spec strings: "cmd:<shell command>" or "tcp:<host>:<port>"."""
        if spec.startswith("cmd:"):
            return cls.spawn(spec[4:], image_w, image_h, prev_k, step_timeout)
        if spec.startswith("tcp:"):
            host, port = spec[4:].rsplit(":", 1)
            return cls.connect(host, int(port), image_w, image_h, prev_k, step_timeout)
        raise ValueError(f"unknown external policy spec {spec!r}")

    def _handshake(self) -> None:
        self._channel.send_line(json.dumps({
            "type": "hello",
            "image_w": self._image_w,
            "image_h": self._image_h,
            "prev_k": self._prev_k,
        }))
        reply = self._read_json()
        if reply.get("type") != "ready":
            raise PolicyMalformedError(f"expected ready, got {reply!r}")
        self._ready = True

    def _read_json(self) -> dict:
        line = self._channel.recv_line(self._timeout)
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise PolicyMalformedError(f"invalid JSON from policy: {line!r}") from exc
        if not isinstance(obj, dict):
            raise PolicyMalformedError(f"expected JSON object, got {obj!r}")
        return obj

    def begin_flight(self, scene, flight_id, plan=None):
        if not self._ready:
            self._handshake()
        self._flight_id = flight_id
        self._step = 0

    def observe(self, image, sensors, prev_cmds):
        obs = {
            "type": "obs",
            "flight_id": self._flight_id,
            "step": self._step,
            "image": {
                "w": image.width,
                "h": image.height,
                "pixels_b64": base64.b64encode(image.pixels).decode("ascii"),
            },
            "sensors": {
                "height_m": sensors.height_m,
                "tof_m": sensors.tof_m,
                "cmd_count": sensors.cmd_count,
            },
            "prev_cmds": list(prev_cmds),
        }
        self._channel.send_line(json.dumps(obs))
        self._step += 1
        reply = self._read_json()
        if reply.get("type") != "cmd" or "command" not in reply:
            raise PolicyMalformedError(f"expected cmd message, got {reply!r}")
        token = reply["command"]
        if token not in COMMAND_BY_NAME:
            raise PolicyMalformedError(
                f"unknown command token {token!r}; expected one of {COMMAND_NAMES}")
        return COMMAND_BY_NAME[token]

    def end_flight(self, outcome):
        if self._ready:
            self._channel.send_line(json.dumps({"type": "done", "outcome": outcome}))

    def close(self):
        self._channel.close()
