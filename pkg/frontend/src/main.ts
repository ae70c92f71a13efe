// Cockpit wiring: websocket, keyboard, canvas. All simulation state comes
// from server frames; this file only draws and forwards input.

import {
  applyMessage,
  canSendCommand,
  deviationFill,
  initialModel,
  metricsReadout,
  setConnected,
  sourceBadge,
  ViewModel,
} from "./model.js";
import { ClientMsg, Direction, parseServerMsg } from "./protocol.js";
import { boundsOf, fitTransform, offsetPolyline, toScreen, Transform } from "./transform.js";

const SOURCE_COLORS: Record<string, string> = {
  brain: "#2980b9",
  fuzzy: "#c0392b",
  blend: "#8e44ad",
};

let model: ViewModel = initialModel();
let ws: WebSocket | null = null;

const $ = (id: string) => document.getElementById(id)!;
const canvas = $("view") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;

function send(msg: ClientMsg) {
  if (ws && ws.readyState === WebSocket.OPEN) ws.send(JSON.stringify(msg));
}

function connect() {
  const url = ($("endpoint") as HTMLInputElement).value;
  if (ws) ws.close();
  ws = new WebSocket(url);
  ws.onopen = () => { model = setConnected(model, true); };
  ws.onclose = () => { model = setConnected(model, false); };
  ws.onerror = () => { model = setConnected(model, false); };
  ws.onmessage = (ev: MessageEvent) => {
    const msg = parseServerMsg(String(ev.data));
    if (msg) model = applyMessage(model, msg, performance.now());
  };
}

function sendCommand(direction: Direction) {
  if (!canSendCommand(model)) {
    model = { ...model, flashUntil: performance.now() + 400 };
    return;
  }
  send({ type: "command", direction });
}

function applyConfig() {
  const scheme = ($("scheme") as HTMLSelectElement).value;
  const tau = parseFloat(($("tau") as HTMLInputElement).value);
  const mode = scheme === "cost" ? "shared-cost" : "shared-threshold";
  send({
    type: "config",
    config: { run: { mode, driver_policy: "disabled" }, shared: { tau, scheme } },
  });
}

document.addEventListener("keydown", (ev) => {
  if (ev.key === "ArrowLeft") { sendCommand("left"); ev.preventDefault(); }
  else if (ev.key === "ArrowRight") { sendCommand("right"); ev.preventDefault(); }
  else if (ev.key === " ") {
    const f = model.frame;
    send(f && f.running && !f.paused ? { type: "pause" } : { type: "start", realtime: true });
    ev.preventDefault();
  }
});

$("connect").addEventListener("click", connect);
$("start").addEventListener("click", () => send({ type: "start", realtime: true }));
$("pause").addEventListener("click", () => send({ type: "pause" }));
$("reset").addEventListener("click", () => send({ type: "reset" }));
$("apply").addEventListener("click", applyConfig);
$("left").addEventListener("click", () => sendCommand("left"));
$("right").addEventListener("click", () => sendCommand("right"));

// -- drawing ----------------------------------------------------------------

function drawPolyline(tf: Transform, pts: [number, number][], stroke: string,
                      width: number, dash: number[] = []) {
  ctx.beginPath();
  pts.forEach(([wx, wy], i) => {
    const [px, py] = toScreen(tf, wx, wy);
    if (i === 0) ctx.moveTo(px, py); else ctx.lineTo(px, py);
  });
  ctx.strokeStyle = stroke;
  ctx.lineWidth = width;
  ctx.setLineDash(dash);
  ctx.stroke();
  ctx.setLineDash([]);
}

function render() {
  requestAnimationFrame(render);
  ctx.fillStyle = "#11151a";
  ctx.fillRect(0, 0, canvas.width, canvas.height);

  const banner = $("banner");
  banner.style.display = model.connected ? "none" : "block";
  setControlsEnabled(model.connected);

  const track = model.track;
  if (track) {
    const tf = fitTransform(boundsOf(track.points, track.width * 1.5),
                            canvas.width, canvas.height);
    const half = track.width / 2;
    drawPolyline(tf, offsetPolyline(track.points, half), "#3c4754", 2);
    drawPolyline(tf, offsetPolyline(track.points, -half), "#3c4754", 2);
    drawPolyline(tf, track.points, "#273140", 1, [6, 6]);

    // trail, colored by arbitration source; drawn segment by segment so a
    // switch shows exactly at the switching sample
    for (let i = 1; i < model.trail.length; i++) {
      const a = model.trail[i - 1];
      const b = model.trail[i];
      drawPolyline(tf, [[a.x, a.y], [b.x, b.y]],
                   SOURCE_COLORS[b.source] ?? "#999999", 2);
    }

    const f = model.frame;
    if (f) {
      const [px, py] = toScreen(tf, f.x, f.y);
      ctx.save();
      ctx.translate(px, py);
      ctx.rotate(-f.heading);
      ctx.fillStyle = "#ecf0f1";
      ctx.fillRect(-7, -4, 14, 8);
      ctx.fillStyle = "#2ecc71";
      ctx.fillRect(3, -4, 4, 8); // nose marker
      ctx.restore();
    }
  }
  renderPanel();
}

function setControlsEnabled(on: boolean) {
  for (const id of ["start", "pause", "reset", "apply", "left", "right"]) {
    ($(id) as HTMLButtonElement).disabled = !on;
  }
}

function renderPanel() {
  const f = model.frame;
  const badge = $("badge");
  badge.textContent = sourceBadge(f);
  badge.className = "badge " + (f ? f.source : "");

  const tau = model.config ? (model.config as any).shared.tau : 1;
  const fill = deviationFill(f, tau);
  const bar = $("devfill");
  bar.style.left = fill < 0 ? `${50 + fill * 50}%` : "50%";
  bar.style.width = `${Math.abs(fill) * 50}%`;
  $("devlabel").textContent = f ? `e = ${f.e.toFixed(3)} m` : "e = -";

  const dl = $("metrics");
  dl.innerHTML = metricsReadout(model)
    .map(([k, v]) => `<div><span>${k}</span><b>${v}</b></div>`).join("");

  const cd = f ? f.cooldown : 0;
  const cdEl = $("cooldown");
  cdEl.textContent = cd > 0 ? `cooldown ${cd.toFixed(2)} s` : "ready";
  const flashing = performance.now() < model.flashUntil;
  cdEl.className = flashing ? "cooldown flash" : (cd > 0 ? "cooldown busy" : "cooldown");

  $("pending").textContent = f && f.pending > 0 ? `pending x${f.pending}` : "";
  $("clock").textContent = f ? `t = ${f.t.toFixed(2)} s` : "";
  $("status").textContent = !f ? "configure and press start"
    : f.done ? `finished: ${f.outcome}`
    : f.paused ? "paused"
    : f.running ? "running" : "ready";

  const fm = model.finalMetrics;
  $("final").textContent = fm
    ? `lap ${fm["lap_completed"] ? "completed" : "not completed"} - ` +
      `max |e| ${(fm["max_abs_e"] as number).toFixed(3)} m - ` +
      `${fm["regulations"]} regulations`
    : "";
}

connect();
requestAnimationFrame(render);
