import init, { layout, trace, ttt_curve } from "./pkg/udnsim_web.js";

const $ = (id) => document.getElementById(id);
const palette = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

function params() {
  return {
    kase: $("case").value,
    den: Number($("den").value),
    vel: Number($("vel").value),
    seed: BigInt($("seed").value || 0),
    rep: Number($("rep").value),
    ttt: Number($("ttt").value),
    reps: Number($("reps").value),
  };
}

function guarded(fn) {
  return () => {
    $("status").textContent = "";
    try {
      fn();
    } catch (e) {
      $("status").textContent = String(e.message ?? e);
    }
  };
}

function drawMap(l, path, serving) {
  const c = $("map");
  const g = c.getContext("2d");
  const sx = c.width / l.width_m;
  const sy = c.height / l.height_m;
  const px = (x, y) => [x * sx, c.height - y * sy];
  g.clearRect(0, 0, c.width, c.height);

  for (const b of l.gnbs) {
    const [x, y] = px(b.x, b.y);
    g.beginPath();
    g.arc(x, y, l.coverage_m * sx, 0, 2 * Math.PI);
    g.fillStyle = "rgba(31,119,180,0.04)";
    g.fill();
  }
  g.setLineDash([4, 4]);
  g.strokeStyle = "#999";
  g.beginPath();
  g.moveTo(...px(...l.route_start));
  g.lineTo(...px(...l.route_end));
  g.stroke();
  g.setLineDash([]);

  if (path) {
    for (let i = 1; i < path.x.length; i++) {
      const s = serving[i];
      g.strokeStyle = s === null ? "#000" : palette[s % palette.length];
      g.lineWidth = 3;
      g.beginPath();
      g.moveTo(...px(path.x[i - 1], path.y[i - 1]));
      g.lineTo(...px(path.x[i], path.y[i]));
      g.stroke();
    }
    g.lineWidth = 1;
  }
  for (const b of l.gnbs) {
    const [x, y] = px(b.x, b.y);
    g.fillStyle = palette[b.id % palette.length];
    g.fillRect(x - 3, y - 3, 6, 6);
    g.fillStyle = "#333";
    g.font = "10px sans-serif";
    g.fillText(String(b.id), x + 4, y - 4);
  }
}

function axes(g, c, xmax, ymin, ymax, xlabel, ylabel) {
  const m = { l: 45, r: 10, t: 10, b: 30 };
  const w = c.width - m.l - m.r;
  const h = c.height - m.t - m.b;
  const X = (v) => m.l + (v / xmax) * w;
  const Y = (v) => m.t + h - ((v - ymin) / (ymax - ymin)) * h;
  g.clearRect(0, 0, c.width, c.height);
  g.strokeStyle = "#888";
  g.strokeRect(m.l, m.t, w, h);
  g.fillStyle = "#333";
  g.font = "11px sans-serif";
  for (let i = 0; i <= 4; i++) {
    const v = ymin + ((ymax - ymin) * i) / 4;
    g.fillText(v.toFixed(1), 4, Y(v) + 4);
    const t = (xmax * i) / 4;
    g.fillText(t.toFixed(0), X(t) - 8, c.height - 12);
  }
  g.fillText(xlabel, m.l + w / 2 - 20, c.height - 1);
  g.save();
  g.translate(11, m.t + h / 2 + 20);
  g.rotate(-Math.PI / 2);
  g.fillText(ylabel, 0, 0);
  g.restore();
  return { X, Y };
}

function series(g, X, Y, xs, ys, color) {
  g.strokeStyle = color;
  g.beginPath();
  let pen = false;
  for (let i = 0; i < xs.length; i++) {
    if (ys[i] === null) {
      pen = false;
      continue;
    }
    if (pen) g.lineTo(X(xs[i]), Y(ys[i]));
    else g.moveTo(X(xs[i]), Y(ys[i]));
    pen = true;
  }
  g.stroke();
}

function drawSinr(t) {
  const c = $("sinr");
  const g = c.getContext("2d");
  const vals = [...t.best_sinr_db, ...t.serving_sinr_db].filter((v) => v !== null);
  const ymin = Math.floor(Math.min(-10, ...vals) / 5) * 5;
  const ymax = Math.ceil(Math.max(10, ...vals) / 5) * 5;
  const xmax = t.tic[t.tic.length - 1] || 1;
  const { X, Y } = axes(g, c, xmax, ymin, ymax, "tic", "SINR (dB)");
  series(g, X, Y, t.tic, t.best_sinr_db, "#bbb");
  series(g, X, Y, t.tic, t.serving_sinr_db, "#1f77b4");
  g.strokeStyle = "#d62728";
  for (const e of t.events) {
    g.beginPath();
    g.moveTo(X(e.tic), Y(ymin));
    g.lineTo(X(e.tic), Y(ymax));
    g.stroke();
  }
}

function drawCurve(points) {
  const c = $("curve");
  const g = c.getContext("2d");
  const ymax = Math.max(1, ...points.map((p) => p.mean_ho_rate)) * 1.1;
  const { X, Y } = axes(g, c, 12, 0, ymax, "TTT (tics)", "handovers per run");
  series(g, X, Y, points.map((p) => p.ttt), points.map((p) => p.mean_ho_rate), "#2ca02c");
  g.strokeStyle = "#999";
  g.setLineDash([3, 3]);
  g.beginPath();
  g.moveTo(X(0), Y(1));
  g.lineTo(X(12), Y(1));
  g.stroke();
  g.setLineDash([]);

  const rows = points
    .map((p) => `<tr><td>${p.ttt}</td><td>${p.mean_ho_rate.toFixed(2)}</td><td>${p.ho_avg_sinr_db === null ? "nan" : p.ho_avg_sinr_db.toFixed(2)}</td><td>${p.failure_flag ? "yes" : ""}</td></tr>`)
    .join("");
  $("curve-table").innerHTML = `<tr><th>TTT</th><th>rate</th><th>HO SINR (dB)</th><th>rate &lt; 1</th></tr>${rows}`;
}

await init();

$("show-layout").onclick = guarded(() => {
  const p = params();
  drawMap(JSON.parse(layout(p.kase, p.den, p.vel, p.seed, p.rep)));
});

$("run-trace").onclick = guarded(() => {
  const p = params();
  const t = JSON.parse(trace(p.kase, p.den, p.ttt, p.vel, p.seed, p.rep, 5));
  drawMap(t.layout, t, t.serving);
  drawSinr(t);
  const mean = t.events.length ? (t.events.reduce((a, e) => a + e.sinr_db, 0) / t.events.length).toFixed(2) : "nan";
  $("summary").textContent = `${t.ho_times} handovers, ${t.outage_tics} outage tics, mean handover SINR ${mean} dB`;
});

$("run-curve").onclick = guarded(() => {
  const p = params();
  drawCurve(JSON.parse(ttt_curve(p.kase, p.den, p.vel, p.reps, p.seed)));
});

$("show-layout").click();
