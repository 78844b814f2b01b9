import init, { bounds_explorer, random_typing, hill_climb } from "./pkg/abbrev_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function frame(canvas, xmin, xmax, ymin, ymax, pad = 30) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const w = canvas.width - 2 * pad;
  const h = canvas.height - 2 * pad;
  const sx = (x) => pad + ((x - xmin) / (xmax - xmin)) * w;
  const sy = (y) => pad + h - ((y - ymin) / (ymax - ymin)) * h;
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w, h);
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  ctx.fillText(String(xmin), pad, canvas.height - 10);
  ctx.fillText(String(xmax), pad + w - 20, canvas.height - 10);
  ctx.fillText(String(ymax), 2, pad + 4);
  ctx.fillText(String(ymin), 2, pad + h);
  return { ctx, sx, sy };
}

function polyline(ctx, pts, colour) {
  ctx.strokeStyle = colour;
  ctx.beginPath();
  pts.forEach(([x, y], k) => (k ? ctx.lineTo(x, y) : ctx.moveTo(x, y)));
  ctx.stroke();
}

function guarded(info, f) {
  try {
    f();
  } catch (e) {
    $(info).innerHTML = `<span class="error">${e.message ?? e}</span>`;
  }
}

function drawBounds() {
  guarded("b-info", () => {
    const view = JSON.parse(bounds_explorer(num("b-types"), num("b-samples"), num("b-seed")));
    const { ctx, sx, sy } = frame($("b-canvas"), -1, 1, -1, 1);
    const clamp = (y) => Math.max(-1, Math.min(1, y));
    for (const [key, colour] of [["daniels", "#1f77b4"], ["durbin", "#ff7f0e"]]) {
      polyline(ctx, view.curve.map((r) => [sx(r.tau), sy(clamp(r[key].lower))]), colour);
      polyline(ctx, view.curve.map((r) => [sx(r.tau), sy(clamp(r[key].upper))]), colour);
    }
    let outside = 0;
    for (const p of view.points) {
      if (!p.inside) outside++;
      ctx.fillStyle = p.inside ? "rgba(0,0,0,0.35)" : "#d00";
      ctx.fillRect(sx(p.tau) - 1.5, sy(p.rho) - 1.5, 3, 3);
    }
    $("b-info").textContent = `${view.points.length} rankings, ${outside} outside the bounds`;
  });
}

function drawTyping() {
  guarded("t-info", () => {
    const view = JSON.parse(random_typing(num("t-ps"), num("t-n"), num("t-l0"), num("t-tokens"), num("t-seed")));
    const rows = view.lengths.slice(0, 40);
    const top = Math.max(...rows.map((r) => Math.max(r.observed, r.expected)));
    const lo = rows[0].length;
    const hi = rows[rows.length - 1].length + 1;
    const { ctx, sx, sy } = frame($("t-canvas"), lo, hi, 0, Number(top.toFixed(3)));
    const bw = Math.max(2, sx(lo + 1) - sx(lo) - 2);
    for (const r of rows) {
      ctx.fillStyle = "#9ecae1";
      ctx.fillRect(sx(r.length), sy(r.observed), bw, sy(0) - sy(r.observed));
      ctx.fillStyle = "#08519c";
      ctx.beginPath();
      ctx.arc(sx(r.length) + bw / 2, sy(r.expected), 3, 0, 2 * Math.PI);
      ctx.fill();
    }
    const rho = view.rho === null ? "undefined" : view.rho.toFixed(4);
    $("t-info").textContent =
      `${view.tokens} tokens, ${view.types} types; length = ${view.slope.toFixed(4)} ln p + ${view.intercept.toFixed(4)}; ` +
      `tau = ${view.tau.toFixed(4)}, rho = ${rho}, mean cost below type mean: ${view.sign_criterion}`;
  });
}

function drawClimb() {
  guarded("h-info", () => {
    const view = JSON.parse(hill_climb(num("h-types"), $("h-cost").value, num("h-seed")));
    const steps = view.steps;
    const last = steps[steps.length - 1];
    const costs = steps.map((s) => s.cost);
    const cmin = Math.min(...costs);
    const cmax = Math.max(...costs);
    const span = cmax - cmin || 1;
    const n = Math.max(1, steps.length - 1);
    const { ctx, sx, sy } = frame($("h-canvas"), 0, n, -1, 1);
    polyline(ctx, steps.map((s) => [sx(s.step), sy(2 * (s.cost - cmin) / span - 1)]), "#000");
    polyline(ctx, steps.map((s) => [sx(s.step), sy(s.tau)]), "#d62728");
    $("h-info").textContent =
      `${n} swaps; mean cost ${steps[0].cost.toFixed(4)} to ${last.cost.toFixed(4)}, ` +
      `tau ${steps[0].tau.toFixed(4)} to ${last.tau.toFixed(4)}`;
  });
}

await init();
$("b-run").onclick = drawBounds;
$("t-run").onclick = drawTyping;
$("h-run").onclick = drawClimb;
drawBounds();
drawTyping();
drawClimb();
