import init, { bandMap, probabilityCurve, dispersion, flatPoints } from "./pkg/ringchain_web.js";

const $ = (id) => document.getElementById(id);
const canvas = $("plot");
const ctx = canvas.getContext("2d");
const status = $("status");
const inputs = ["ell", "l1", "l3", "flux", "kmax"];
const margin = { left: 60, right: 20, top: 20, bottom: 45 };
let view = "bands";
let pending = false;

function params() {
  const v = Object.fromEntries(inputs.map((id) => [id, parseFloat($(id).value)]));
  v.variant = $("variant").value;
  return v;
}

function showValues() {
  for (const id of inputs) {
    document.querySelector(`output[for=${id}]`).textContent = $(id).value;
  }
  const variant = $("variant").value;
  $("l1").disabled = variant === "tight";
  $("l3").disabled = variant === "merged";
  $("axis-box").hidden = view !== "bands";
}

// Maps data ranges onto the canvas and draws labelled axes.
function frame(x0, x1, y0, y1, xlabel, ylabel) {
  const w = canvas.width - margin.left - margin.right;
  const h = canvas.height - margin.top - margin.bottom;
  const sx = (x) => margin.left + ((x - x0) / (x1 - x0)) * w;
  const sy = (y) => margin.top + h - ((y - y0) / (y1 - y0)) * h;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#444";
  ctx.fillStyle = "#222";
  ctx.font = "13px system-ui, sans-serif";
  ctx.strokeRect(margin.left, margin.top, w, h);
  ctx.textAlign = "center";
  for (let i = 0; i <= 5; i++) {
    const x = x0 + ((x1 - x0) * i) / 5;
    ctx.fillText(x.toFixed(2), sx(x), margin.top + h + 16);
  }
  ctx.fillText(xlabel, margin.left + w / 2, canvas.height - 8);
  ctx.textAlign = "right";
  for (let i = 0; i <= 5; i++) {
    const y = y0 + ((y1 - y0) * i) / 5;
    ctx.fillText(y.toFixed(2), margin.left - 6, sy(y) + 4);
  }
  ctx.save();
  ctx.translate(14, margin.top + h / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.textAlign = "center";
  ctx.fillText(ylabel, 0, 0);
  ctx.restore();
  return { sx, sy, w, h };
}

const axisRange = { l1: [0, 4 * Math.PI], l3: [0, 2 * Math.PI], ell: [0, 3], A: [0, 1] };

function drawBands(p) {
  const axis = $("axis").value;
  if ((axis === "l1" && p.variant === "tight") || (axis === "l3" && p.variant === "merged")) {
    throw new Error(`the ${p.variant} chain has no ${axis === "l1" ? "link" : "free arc"} to sweep`);
  }
  const steps = 240;
  const data = bandMap(p.variant, p.ell, p.l1, p.l3, p.flux, axis, steps, p.kmax);
  const [x0, x1] = axisRange[axis];
  const { sx, sy } = frame(x0, x1, 0, p.kmax, axis === "A" ? "A" : axis, "k");
  const cell = Math.max(1, (sx(x1) - sx(x0)) / steps);
  let bands = 0;
  for (let i = 0; i < data.length; i += 3) {
    const [x, lo, hi] = [data[i], data[i + 1], data[i + 2]];
    const flat = lo === hi;
    ctx.fillStyle = flat ? "#c00" : "#2a5d9f";
    const top = sy(hi);
    ctx.fillRect(sx(x) - cell / 2, top - (flat ? 1 : 0), cell, Math.max(flat ? 2 : 1, sy(lo) - top));
    bands++;
  }
  return `${bands} band segments over ${steps} values of ${axis}`;
}

function drawProbability(p) {
  if (p.variant === "loose") {
    frame(0, 1, 0, 1, "A", "P");
    return "the loose chain's gaps take over at high energy: its probability is zero for every A";
  }
  const points = 41;
  const data = probabilityCurve(p.variant, points, 400);
  const { sx, sy } = frame(0, 1, 0, 1, "A", "P");
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  for (let i = 0; i < data.length; i += 3) {
    const [x, y] = [sx(data[i]), sy(data[i + 2])];
    i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y);
  }
  ctx.stroke();
  ctx.fillStyle = "#2a5d9f";
  let worst = 0;
  for (let i = 0; i < data.length; i += 3) {
    ctx.beginPath();
    ctx.arc(sx(data[i]), sy(data[i + 1]), 3.5, 0, 2 * Math.PI);
    ctx.fill();
    worst = Math.max(worst, Math.abs(data[i + 1] - data[i + 2]));
  }
  return `torus quadrature (dots) against the closed form (line), largest difference ${worst.toExponential(2)}`;
}

function drawDispersion(p) {
  const samples = 1500;
  const data = dispersion(p.variant, p.ell, p.l1, p.l3, p.flux, p.kmax, samples);
  const flats = flatPoints(p.variant, p.ell, p.l1, p.l3, p.flux, p.kmax);
  const { sx, sy } = frame(-Math.PI, Math.PI, 0, p.kmax, "θ", "k");
  ctx.fillStyle = "#2a5d9f";
  for (let i = 0; i < data.length; i += 4) {
    for (const t of [data[i + 1], data[i + 2]]) {
      if (!Number.isNaN(t)) ctx.fillRect(sx(t) - 1, sy(data[i]) - 1, 2, 2);
    }
  }
  ctx.strokeStyle = "#c00";
  for (const k of flats) {
    ctx.beginPath();
    ctx.moveTo(sx(-Math.PI), sy(k));
    ctx.lineTo(sx(Math.PI), sy(k));
    ctx.stroke();
  }
  return flats.length ? `flat bands (red) at k = ${flats.map((k) => k.toFixed(4)).join(", ")}` : "no flat bands in range";
}

const views = { bands: drawBands, prob: drawProbability, dispersion: drawDispersion };

function redraw() {
  pending = false;
  showValues();
  const started = performance.now();
  try {
    const note = views[view](params());
    status.className = "";
    status.textContent = `${note} (${Math.round(performance.now() - started)} ms)`;
  } catch (e) {
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    status.className = "error";
    status.textContent = e.message ?? String(e);
  }
}

function schedule() {
  if (!pending) {
    pending = true;
    requestAnimationFrame(redraw);
  }
}

await init();
for (const id of [...inputs, "variant", "axis"]) $(id).addEventListener("input", schedule);
for (const b of document.querySelectorAll("nav button")) {
  b.addEventListener("click", () => {
    view = b.dataset.view;
    for (const o of document.querySelectorAll("nav button")) o.setAttribute("aria-pressed", o === b);
    schedule();
  });
}
redraw();
