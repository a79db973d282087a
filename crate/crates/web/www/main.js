import init, { hermite_curve, inverse_decay_profile, perturbed_frame } from "./pkg/frame_forge_web.js";

const BLUE = "#1f6fb4";
const ORANGE = "#d9480f";

function setupCanvas(canvas) {
  const dpr = window.devicePixelRatio || 1;
  const { width, height } = canvas.getBoundingClientRect();
  canvas.width = Math.round(width * dpr);
  canvas.height = Math.round(height * dpr);
  const ctx = canvas.getContext("2d");
  ctx.setTransform(dpr, 0, 0, dpr, 0, 0);
  ctx.clearRect(0, 0, width, height);
  return { ctx, width, height };
}

// series: [{x, y, color}]; logY drops nonpositive values
function plot(canvas, series, { logY = false, xLabel = "", yLabel = "" } = {}) {
  const { ctx, width, height } = setupCanvas(canvas);
  const pad = { l: 58, r: 12, t: 10, b: 34 };
  const tf = (v) => (logY ? (v > 0 ? Math.log10(v) : NaN) : v);
  let xmin = Infinity, xmax = -Infinity, ymin = Infinity, ymax = -Infinity;
  for (const s of series) {
    s.x.forEach((x, i) => {
      const y = tf(s.y[i]);
      if (!Number.isFinite(y)) return;
      xmin = Math.min(xmin, x); xmax = Math.max(xmax, x);
      ymin = Math.min(ymin, y); ymax = Math.max(ymax, y);
    });
  }
  if (!Number.isFinite(xmin)) return;
  if (logY) ymin = Math.max(ymin, ymax - 18);
  if (ymax === ymin) { ymax += 1; ymin -= 1; }
  const X = (x) => pad.l + ((x - xmin) / (xmax - xmin || 1)) * (width - pad.l - pad.r);
  const Y = (y) => height - pad.b - ((y - ymin) / (ymax - ymin)) * (height - pad.t - pad.b);

  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#555";
  ctx.font = "11px system-ui, sans-serif";
  ctx.beginPath();
  ctx.moveTo(pad.l, pad.t); ctx.lineTo(pad.l, height - pad.b); ctx.lineTo(width - pad.r, height - pad.b);
  ctx.stroke();
  for (let i = 0; i <= 4; i++) {
    const y = ymin + (i / 4) * (ymax - ymin);
    const label = logY ? `1e${y.toFixed(1)}` : y.toPrecision(3);
    ctx.fillText(label, 4, Y(y) + 4);
    const x = xmin + (i / 4) * (xmax - xmin);
    ctx.fillText(Number(x.toPrecision(3)).toString(), X(x) - 8, height - pad.b + 14);
  }
  ctx.fillText(xLabel, width / 2, height - 4);
  ctx.save(); ctx.translate(12, height / 2); ctx.rotate(-Math.PI / 2); ctx.fillText(yLabel, 0, 0); ctx.restore();

  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 1.6;
    ctx.beginPath();
    let pen = false;
    s.x.forEach((x, i) => {
      const y = tf(s.y[i]);
      if (!Number.isFinite(y) || y < ymin) { pen = false; return; }
      if (pen) ctx.lineTo(X(x), Y(y)); else ctx.moveTo(X(x), Y(y));
      pen = true;
    });
    ctx.stroke();
  }
}

function bind(ids, render) {
  const run = () => {
    for (const id of ids) document.getElementById(`${id}-out`).textContent = document.getElementById(id).value;
    render();
  };
  for (const id of ids) document.getElementById(id).addEventListener("input", run);
  window.addEventListener("resize", render);
  run();
}

const num = (id) => Number(document.getElementById(id).value);

function guarded(statsId, body) {
  const stats = document.getElementById(statsId);
  try {
    stats.classList.remove("err");
    body(stats);
  } catch (e) {
    stats.classList.add("err");
    stats.textContent = String(e.message || e);
  }
}

function renderHermite() {
  guarded("h-stats", (stats) => {
    const a = Math.exp(num("h-a"));
    document.getElementById("h-a-out").textContent = a.toPrecision(3);
    const d = JSON.parse(hermite_curve(a, num("h-m"), 8));
    plot(document.getElementById("h-plot"), [
      { x: d.x, y: d.exact, color: BLUE },
      { x: d.x, y: d.partial, color: ORANGE },
    ], { xLabel: "x" });
    stats.textContent = `a = ${a.toPrecision(4)}   L² error of the partial sum = ${d.l2_error.toExponential(3)}`;
  });
}

function renderInverse() {
  guarded("i-stats", (stats) => {
    const d = JSON.parse(inverse_decay_profile(num("i-t"), num("i-n"), num("i-g")));
    plot(document.getElementById("i-plot"), [
      { x: d.distance, y: d.observed, color: BLUE },
      { x: d.distance, y: d.predicted, color: ORANGE },
    ], { logY: true, xLabel: "|m − n|" });
    const fit = d.fitted_gamma === null ? "n/a" : d.fitted_gamma.toFixed(4);
    stats.textContent =
      `r = ${d.r.toFixed(4)}   γ₁ = ${d.gamma1.toExponential(3)}   C = ${d.c_inv.toFixed(3)}   ` +
      `fitted rate = ${fit}   violations = ${d.violations}`;
  });
}

function renderFrame() {
  guarded("f-stats", (stats) => {
    const d = JSON.parse(perturbed_frame(num("f-a"), num("f-e"), num("f-n")));
    plot(document.getElementById("f-plot"), [{ x: d.offsets, y: d.dual_row, color: BLUE }], {
      logY: true,
      xLabel: "j",
    });
    stats.textContent =
      `frame bounds [${d.lower_bound.toFixed(5)}, ${d.upper_bound.toFixed(5)}]   ` +
      `dual decay rate = ${d.dual_gamma.toFixed(5)}`;
  });
}

await init();
bind(["h-a", "h-m"], renderHermite);
bind(["i-t", "i-n", "i-g"], renderInverse);
bind(["f-a", "f-e", "f-n"], renderFrame);
