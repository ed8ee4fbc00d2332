import init, { dispersionCurve, resourceSweep, trotterCurve } from "./pkg/coulomb_qed_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

// Line plot; each series is {x, y, color, dash}.
function plot(canvas, series, { logX = false, logY = false } = {}) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  const fx = logX ? Math.log10 : (v) => v;
  const fy = logY ? Math.log10 : (v) => v;
  const pts = series.map((s) => s.x.map((x, i) => [fx(x), fy(s.y[i])]).filter(([a, b]) => isFinite(a) && isFinite(b)));
  const all = pts.flat();
  const [x0, x1] = [Math.min(...all.map((p) => p[0])), Math.max(...all.map((p) => p[0]))];
  let [y0, y1] = [Math.min(...all.map((p) => p[1])), Math.max(...all.map((p) => p[1]))];
  if (!logY) y0 = Math.min(0, y0);
  const sx = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const sy = (y) => h - pad - ((y - y0) / (y1 - y0 || 1)) * (h - 2 * pad);

  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.setLineDash([]);
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  const label = (v, log) => (log ? "1e" + v.toFixed(1) : v.toFixed(2));
  ctx.fillText(label(y1, logY), 2, pad + 4);
  ctx.fillText(label(y0, logY), 2, h - pad);
  ctx.fillText(label(x0, logX), pad, h - pad + 14);
  ctx.fillText(label(x1, logX), w - pad - 30, h - pad + 14);

  series.forEach((s, k) => {
    ctx.strokeStyle = s.color;
    ctx.setLineDash(s.dash ? [6, 4] : []);
    ctx.beginPath();
    pts[k].forEach(([x, y], i) => (i ? ctx.lineTo(sx(x), sy(y)) : ctx.moveTo(sx(x), sy(y))));
    ctx.stroke();
  });
}

function showError(el, e) {
  el.innerHTML = `<span class="error">${e.message ?? e}</span>`;
}

function drawDispersion() {
  const c = JSON.parse(dispersionCurve(num("d-mass"), num("d-wilson"), 201));
  plot($("d-plot"), [
    { x: c.k, y: c.axis, color: "#1f77b4" },
    { x: c.k, y: c.diagonal, color: "#ff7f0e" },
    { x: [c.k[0], c.k[c.k.length - 1]], y: [c.bound, c.bound], color: "#444", dash: true },
  ]);
}

function drawResources() {
  const table = $("r-table");
  try {
    const rows = JSON.parse(
      resourceSweep(num("r-side"), num("r-g"), 0.5, 1.0, num("r-energy"), num("r-time"), num("r-lo"), num("r-hi"), 8),
    );
    const head = "<tr><th>&epsilon;</th><th>A<sub>max</sub></th><th>&Pi;<sub>max</sub></th><th>n<sub>A</sub></th><th>qubits</th><th>steps</th></tr>";
    table.innerHTML =
      head +
      rows
        .map(
          (r) =>
            `<tr><td>${r.epsilon.toExponential(2)}</td><td>${r.a_max.toFixed(2)}</td><td>${r.pi_max.toFixed(2)}</td>` +
            `<td>${r.n_a}</td><td>${r.total_qubits}</td><td>${r.steps}</td></tr>`,
        )
        .join("");
  } catch (e) {
    showError(table, e);
  }
}

function drawTrotter() {
  const status = $("t-status");
  status.textContent = "running...";
  // let the status paint before the blocking call
  setTimeout(() => {
    try {
      const steps = [4, 8, 16, 32, 64];
      const c = JSON.parse(trotterCurve(num("t-g"), num("t-time"), Uint32Array.from(steps), 3));
      plot(
        $("t-plot"),
        [
          { x: steps, y: c.distance, color: "#1f77b4" },
          { x: steps, y: c.infidelity, color: "#ff7f0e" },
          { x: steps, y: c.bound, color: "#444", dash: true },
        ],
        { logX: true, logY: true },
      );
      status.textContent = `slope ${c.slope.toFixed(3)}, C = ${c.constant.toFixed(2)}`;
    } catch (e) {
      showError(status, e);
    }
  }, 10);
}

await init();
for (const id of ["d-mass", "d-wilson"]) $(id).addEventListener("input", drawDispersion);
for (const id of ["r-side", "r-g", "r-energy", "r-time", "r-lo", "r-hi"]) $(id).addEventListener("input", drawResources);
$("t-run").addEventListener("click", drawTrotter);
drawDispersion();
drawResources();
drawTrotter();
