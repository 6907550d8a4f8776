import init, { pattern, profile, simulate } from "./pkg/rattling_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function report(id, text, isError = false) {
  const el = $(id);
  el.textContent = text;
  el.className = isError ? "out err" : "out";
}

function axes(ctx, w, h, pad) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, pad / 2);
  ctx.lineTo(pad, h - pad);
  ctx.lineTo(w - pad / 2, h - pad);
  ctx.stroke();
}

function scale(lo, hi, a, b) {
  const span = hi - lo || 1;
  return (v) => a + ((v - lo) / span) * (b - a);
}

function runSimulation() {
  const canvas = $("s-canvas");
  const ctx = canvas.getContext("2d");
  let v;
  try {
    v = simulate(num("s-h1"), num("s-h2"), num("s-c"), num("s-events"));
  } catch (e) {
    report("s-out", e.message, true);
    return;
  }
  const [fitted, aStar] = v;
  const nodes = [];
  const times = [];
  for (let i = 2; i < v.length; i += 2) {
    nodes.push(v[i]);
    times.push(v[i + 1]);
  }
  const { width: w, height: h } = canvas;
  const pad = 40;
  axes(ctx, w, h, pad);
  const nMax = Math.max(...nodes, 1);
  const tMax = Math.max(...times, aStar * nMax * nMax);
  const x = scale(0, nMax, pad, w - pad / 2);
  const y = scale(0, tMax, h - pad, pad / 2);

  ctx.strokeStyle = "#c60";
  ctx.beginPath();
  for (let k = 0; k <= 200; k++) {
    const n = (k / 200) * nMax;
    const px = x(n);
    const py = y(aStar * n * n);
    k === 0 ? ctx.moveTo(px, py) : ctx.lineTo(px, py);
  }
  ctx.stroke();

  ctx.fillStyle = "#036";
  nodes.forEach((n, i) => ctx.fillRect(x(n) - 2, y(times[i]) - 2, 4, 4));
  ctx.fillStyle = "#333";
  ctx.fillText("node n", w - 60, h - 10);
  ctx.fillText("t_n", 6, 16);

  const share = (nodes.length - 1) / Math.max(nMax, 1);
  report(
    "s-out",
    `${nodes.length} switches up to node ${nMax}, switching share ${share.toFixed(3)}\n` +
      `fitted a = ${Number.isNaN(fitted) ? "n/a (too few events)" : fitted.toFixed(5)}, ` +
      `a* = ${aStar.toFixed(5)} (curve a* n²)`,
  );
}

function runProfiles() {
  const canvas = $("p-canvas");
  const ctx = canvas.getContext("2d");
  let v;
  try {
    v = profile(num("p-lambda"), 199);
  } catch (e) {
    report("p-out", e.message, true);
    return;
  }
  const aStar = v[0];
  const rows = [];
  for (let i = 1; i < v.length; i += 4) rows.push(v.slice(i, i + 4));
  const { width: w, height: h } = canvas;
  const pad = 40;
  axes(ctx, w, h, pad);
  const values = rows.flatMap((r) => [r[1], r[2], r[3]]);
  const x = scale(-1, 1, pad, w - pad / 2);
  const y = scale(Math.min(...values), Math.max(...values), h - pad, pad / 2);
  const colours = ["#036", "#c60", "#393"];
  ["F", "G", "H"].forEach((name, j) => {
    ctx.strokeStyle = colours[j];
    ctx.beginPath();
    rows.forEach((r, i) => (i === 0 ? ctx.moveTo(x(r[0]), y(r[j + 1])) : ctx.lineTo(x(r[0]), y(r[j + 1]))));
    ctx.stroke();
    ctx.fillStyle = colours[j];
    ctx.fillText(name, w - 40, 20 + 14 * j);
  });
  report("p-out", `a*(${num("p-lambda")}) = ${aStar.toPrecision(10)}`);
}

function runPattern() {
  const canvas = $("q-canvas");
  const ctx = canvas.getContext("2d");
  let v;
  try {
    v = pattern(num("q-alpha"), num("q-beta"), num("q-nmax"));
  } catch (e) {
    report("q-out", e.message, true);
    return;
  }
  const metric = v[v.length - 1];
  const flags = v.subarray(0, v.length - 1);
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  const shown = Math.min(flags.length, 280);
  const cell = w / shown;
  for (let n = 0; n < shown; n++) {
    ctx.fillStyle = flags[n] ? "#036" : "#e4e4e4";
    ctx.fillRect(n * cell, 10, Math.max(cell - 1, 1), h - 20);
  }
  const members = flags.reduce((s, f) => s + f, 0) - 1;
  report(
    "q-out",
    `${members} members in [1, ${flags.length - 1}] (first ${shown} nodes drawn), ` +
      `quasi-uniformity metric at the last member ${Number.isNaN(metric) ? "n/a" : metric.toExponential(3)}`,
  );
}

await init();
$("s-run").addEventListener("click", runSimulation);
$("p-run").addEventListener("click", runProfiles);
$("q-run").addEventListener("click", runPattern);
runSimulation();
runProfiles();
runPattern();
