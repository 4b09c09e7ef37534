import init, { purity_curve, negativity_curve, mode_profile } from "./pkg/harvest_web.js";

const $ = (id) => document.getElementById(id);

function toPairs(flat) {
  const out = [];
  for (let i = 0; i + 1 < flat.length; i += 2) {
    if (Number.isFinite(flat[i]) && Number.isFinite(flat[i + 1])) out.push([flat[i], flat[i + 1]]);
  }
  return out;
}

function niceTicks(lo, hi, count) {
  const raw = (hi - lo) / count;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const step = [1, 2, 5, 10].map((f) => f * mag).find((s) => s >= raw);
  const ticks = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12 * step; v += step) ticks.push(v);
  return ticks;
}

function plot(canvas, points, { logX = false, xLabel = "", yLabel = "" } = {}) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height;
  const m = { l: 70, r: 20, t: 15, b: 45 };
  ctx.clearRect(0, 0, W, H);
  if (points.length < 2) return;
  const fx = logX ? Math.log10 : (v) => v;
  const xs = points.map((p) => fx(p[0]));
  const ys = points.map((p) => p[1]);
  let [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  if (y1 - y0 < 1e-300) { y0 -= 0.5; y1 += 0.5; }
  const pad = 0.05 * (y1 - y0);
  y0 -= pad; y1 += pad;
  const px = (v) => m.l + (W - m.l - m.r) * (v - x0) / (x1 - x0);
  const py = (v) => H - m.b - (H - m.t - m.b) * (v - y0) / (y1 - y0);

  ctx.strokeStyle = "#000";
  ctx.strokeRect(m.l, m.t, W - m.l - m.r, H - m.t - m.b);
  ctx.fillStyle = "#000";
  ctx.font = "12px sans-serif";
  ctx.textAlign = "center";
  const xt = logX
    ? niceTicks(x0, x1, 6).filter((v) => Number.isInteger(Math.round(v * 1e9) / 1e9))
    : niceTicks(x0, x1, 6);
  for (const t of xt) {
    ctx.fillText(logX ? String(+Math.pow(10, t).toPrecision(3)) : String(+t.toPrecision(4)), px(t), H - m.b + 16);
  }
  ctx.fillText(xLabel, (m.l + W - m.r) / 2, H - 8);
  ctx.textAlign = "right";
  for (const t of niceTicks(y0, y1, 5)) {
    ctx.fillText(Math.abs(t) < 1e-3 && t !== 0 ? t.toExponential(1) : String(+t.toPrecision(4)), m.l - 6, py(t) + 4);
  }
  ctx.save();
  ctx.translate(16, (m.t + H - m.b) / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.textAlign = "center";
  ctx.fillText(yLabel, 0, 0);
  ctx.restore();

  ctx.strokeStyle = "#1f77b4";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  points.forEach(([x, y], i) => (i ? ctx.lineTo(px(fx(x)), py(y)) : ctx.moveTo(px(fx(x)), py(y))));
  ctx.stroke();
}

function guarded(fn) {
  return () => {
    const status = $("status");
    try {
      const t0 = performance.now();
      fn();
      status.className = "";
      status.textContent = `Computed in ${(performance.now() - t0).toFixed(0)} ms.`;
    } catch (e) {
      status.className = "error";
      status.textContent = String(e);
    }
  };
}

const runPurity = guarded(() => {
  const data = purity_curve(+$("p-mass").value, +$("p-dim").value, 0.1, 10, 161);
  plot($("p-plot"), toPairs(data), { logX: true, xLabel: "sigma / l", yLabel: "nu" });
});

const runNegativity = guarded(() => {
  const data = negativity_curve(+$("n-ell").value, +$("n-sep").value, 0, 8, +$("n-points").value);
  plot($("n-plot"), toPairs(data), { xLabel: "Omega T", yLabel: "negativity / lambda^2" });
});

const runProfile = guarded(() => {
  const data = mode_profile($("m-kind").value, +$("m-scale").value, +$("m-index").value, 801);
  plot($("m-plot"), toPairs(data), { xLabel: "u", yLabel: "f(u)" });
});

await init();
$("p-run").onclick = runPurity;
$("n-run").onclick = runNegativity;
$("m-run").onclick = runProfile;
$("m-kind").onchange = () => {
  const idx = $("m-index");
  idx.min = $("m-kind").value === "box" ? 1 : 0;
  if (+idx.value < +idx.min) idx.value = idx.min;
};
runPurity();
runProfile();
runNegativity();
