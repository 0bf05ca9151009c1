import init, { bracket, chen_convergence, perturbed_trace } from "./pkg/loopbracket_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function show(id, text, failed) {
  const el = $(id);
  el.textContent = text;
  el.className = failed ? "err" : "";
}

function run(out, f) {
  try {
    f();
  } catch (e) {
    show(out, String(e), true);
  }
}

function drawBracket(v) {
  const cv = $("b-canvas");
  const ctx = cv.getContext("2d");
  const w = cv.width, h = cv.height;
  ctx.clearRect(0, 0, w, h);
  const poly = v.polygon;
  const xs = poly.map((p) => p[0]), ys = poly.map((p) => p[1]);
  const cx = (Math.min(...xs) + Math.max(...xs)) / 2, cy = (Math.min(...ys) + Math.max(...ys)) / 2;
  const extent = Math.max(...poly.map(([x, y]) => Math.hypot(x - cx, y - cy)));
  const s = 0.42 * Math.min(w, h) / extent;
  const at = ([x, y]) => [w / 2 + s * (x - cx), h / 2 - s * (y - cy)];

  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#555";
  ctx.font = "12px sans-serif";
  ctx.beginPath();
  poly.forEach((p, i) => (i ? ctx.lineTo(...at(p)) : ctx.moveTo(...at(p))));
  ctx.closePath();
  ctx.stroke();
  poly.forEach((p, i) => {
    const q = poly[(i + 1) % poly.length];
    const [mx, my] = at([cx + ((p[0] + q[0]) / 2 - cx) * 1.1, cy + ((p[1] + q[1]) / 2 - cy) * 1.1]);
    ctx.fillText(v.sides[i], mx - 6, my + 4);
  });

  const chords = (list, color) => {
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    for (const [a, b] of list) {
      ctx.beginPath();
      ctx.moveTo(...at(a));
      ctx.lineTo(...at(b));
      ctx.stroke();
    }
  };
  chords(v.gamma_chords, "#1f6fb2");
  chords(v.lambda_chords, "#c0392b");

  for (const c of v.crossings) {
    const [x, y] = at(c.point);
    ctx.fillStyle = c.sign > 0 ? "#2a2" : "#a2a";
    ctx.beginPath();
    ctx.arc(x, y, 5, 0, 2 * Math.PI);
    ctx.fill();
  }
}

function terms(list) {
  if (!list.length) return "0";
  return list.map((t) => `${t.coef} (${t.word})`).join(" + ");
}

function doBracket() {
  run("b-out", () => {
    const v = JSON.parse(bracket(num("b-genus"), $("b-gamma").value, $("b-lambda").value,
      $("b-unoriented").checked, num("b-seed")));
    drawBracket(v);
    const lines = [`[${v.gamma}, ${v.lambda}] = ${terms(v.bracket)}`, ""];
    for (const c of v.crossings) {
      lines.push(`${c.sign > 0 ? "+" : "-"}  ${c.gamma_p} | ${c.lambda_p}`);
    }
    show("b-out", lines.join("\n"), false);
  });
}

// Line plot of several series on shared axes; `log` plots log10 of the values.
function plot(id, xs, series, log) {
  const cv = $(id);
  const ctx = cv.getContext("2d");
  const w = cv.width, h = cv.height, pad = 40;
  ctx.clearRect(0, 0, w, h);
  const tf = (y) => (log ? Math.log10(Math.max(y, 1e-18)) : y);
  const all = series.flatMap((s) => s.ys.map(tf));
  let lo = Math.min(...all), hi = Math.max(...all);
  if (hi - lo < 1e-12) { lo -= 1; hi += 1; }
  const x0 = Math.min(...xs), x1 = Math.max(...xs) || 1;
  const X = (x) => pad + (w - 2 * pad) * (x - x0) / (x1 - x0 || 1);
  const Y = (y) => h - pad - (h - 2 * pad) * (tf(y) - lo) / (hi - lo);

  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  ctx.fillText((log ? "1e" : "") + hi.toFixed(log ? 0 : 3), 2, pad + 4);
  ctx.fillText((log ? "1e" : "") + lo.toFixed(log ? 0 : 3), 2, h - pad + 4);
  ctx.fillText(String(x0), pad, h - pad + 14);
  ctx.fillText(String(x1), w - pad - 10, h - pad + 14);

  series.forEach((s, k) => {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 2;
    ctx.setLineDash(s.dash || []);
    ctx.beginPath();
    s.ys.forEach((y, i) => (i ? ctx.lineTo(X(xs[i]), Y(y)) : ctx.moveTo(X(xs[i]), Y(y))));
    ctx.stroke();
    ctx.fillStyle = s.color;
    ctx.fillText(s.name, w - pad - 110, pad + 14 + 14 * k);
  });
  ctx.setLineDash([]);
}

function doChen() {
  run("c-out", () => {
    const v = JSON.parse(chen_convergence(num("c-dim"), num("c-r"), num("c-seed"), num("c-order"), num("c-grid")));
    const xs = v.rows.map((r) => r.order);
    plot("c-canvas", xs, [
      { name: "error vs rk4", color: "#1f6fb2", ys: v.rows.map((r) => r.error) },
      { name: "remainder bound", color: "#c0392b", dash: [4, 3], ys: v.rows.map((r) => r.remainder_bound) },
      { name: "term norm", color: "#888", ys: v.rows.map((r) => r.term_norm) },
    ], true);
    const last = v.rows[v.rows.length - 1];
    show("c-out", `int |A| = ${v.R}\norder ${last.order}: error ${last.error}, bound ${last.remainder_bound}`, false);
  });
}

function doPerturbed() {
  run("p-out", () => {
    const v = JSON.parse(perturbed_trace($("p-group").value, num("p-genus"), $("p-word").value,
      num("p-seed"), num("p-scale"), 40));
    const xs = v.rows.map((r) => r.scale);
    plot("p-canvas", xs, [
      { name: "series", color: "#1f6fb2", ys: v.rows.map((r) => r.series) },
      { name: "rk4", color: "#c0392b", dash: [4, 3], ys: v.rows.map((r) => r.rk4) },
    ], false);
    const gap = Math.max(...v.rows.map((r) => Math.abs(r.series - r.rk4)));
    show("p-out", `${v.group}, word ${v.word || "(empty)"}\nflat trace ${v.flat_trace}, relator residual ${v.relator_residual}\nmax |series - rk4| ${gap.toExponential(3)}`, false);
  });
}

await init();
$("b-run").onclick = doBracket;
$("c-run").onclick = doChen;
$("p-run").onclick = doPerturbed;
doBracket();
doChen();
doPerturbed();
