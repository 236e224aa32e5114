// Build the bindings first (see the README): cargo build --target wasm32-unknown-unknown, then wasm-bindgen --target web --out-dir www/pkg
import init, { Session } from "./pkg/dcstring_wasm.js";

const $ = (id) => document.getElementById(id);
let session = null;

function rebuild() {
  try {
    session = new Session(+$("a").value, +$("b").value, $("k").value, $("r").value,
                          $("kappa").value, $("rho").value, +$("eps").value);
    $("status").textContent = `S(0) = ${session.phaseLength().toFixed(6)}`;
    $("status").className = "";
  } catch (e) {
    session = null;
    $("status").textContent = String(e.message ?? e);
    $("status").className = "err";
  }
}

function guard(f) {
  return () => {
    if (!session) return;
    try { f(); } catch (e) { $("status").textContent = String(e.message ?? e); $("status").className = "err"; }
  };
}

function plot(canvas, xs, series, yRange) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const finite = series.flatMap((s) => s.ys.filter(Number.isFinite));
  const [y0, y1] = yRange ?? [Math.min(...finite), Math.max(...finite)];
  const px = (x) => 40 + ((x - x0) / (x1 - x0)) * (w - 60);
  const py = (y) => h - 20 - ((y - y0) / (y1 - y0 || 1)) * (h - 40);
  ctx.strokeStyle = "#bbb";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(px(x0), py(0)); ctx.lineTo(px(x1), py(0));
  if (x0 < 0 && x1 > 0) { ctx.moveTo(px(0), py(y0)); ctx.lineTo(px(0), py(y1)); }
  ctx.stroke();
  ctx.lineWidth = 3;
  for (const { ys, color } of series) {
    ctx.strokeStyle = color;
    ctx.beginPath();
    let pen = false;
    xs.forEach((x, i) => {
      const y = ys[i];
      if (!Number.isFinite(y) || y < y0 || y > y1) { pen = false; return; }
      pen ? ctx.lineTo(px(x), py(y)) : ctx.moveTo(px(x), py(y));
      pen = true;
    });
    ctx.stroke();
  }
}

function column(flat, width, j) {
  const out = [];
  for (let i = j; i < flat.length; i += width) out.push(flat[i]);
  return out;
}

const showRow = guard(() => {
  const r = session.tableRow(+$("n").value);
  const pairing = ["", " (delta passes pi/2 nearby)", " (anomalous)"][r[7]];
  const names = ["sqrt λ exact", "sqrt(eps μ)", "omega", "omega1", "delta", "high frequency"];
  $("row").innerHTML =
    "<tr>" + names.map((s) => `<th>${s}</th>`).join("") + "<th>l</th></tr><tr>" +
    [...r.slice(0, 6)].map((v) => `<td>${v.toFixed(6)}</td>`).join("") +
    `<td>${r[6]}${pairing}</td></tr>`;
});

const showShapes = guard(() => {
  const flat = session.eigenfunctions(+$("n").value, 801);
  plot($("shape"), column(flat, 4, 0), [
    { ys: column(flat, 4, 1), color: "#000" },
    { ys: column(flat, 4, 2), color: "#d62728" },
    { ys: column(flat, 4, 3), color: "#1f77b4" },
  ]);
});

const showCurve = guard(() => {
  const l = +$("l").value;
  const eps = +$("eps").value;
  const unit = (eps * Math.PI) / session.phaseLength();
  const flat = session.quantizationCurve(l, Math.max(unit * (l - 1), 1e-3), unit * (l + 2), 400);
  const f = column(flat, 3, 2).map((v) => v / Math.PI);
  plot($("curve"), column(flat, 3, 0), [
    { ys: column(flat, 3, 1), color: "#2ca02c" },
    { ys: f, color: "#9467bd" },
  ], [-2, 2]);
});

await init();
for (const id of ["a", "b", "eps", "k", "r", "kappa", "rho"]) $(id).addEventListener("change", rebuild);
$("row-btn").addEventListener("click", showRow);
$("shape-btn").addEventListener("click", showShapes);
$("curve-btn").addEventListener("click", showCurve);
rebuild();
showRow();
showShapes();
showCurve();
