/**
 * Minimal deterministic SVG line charts: linear/log scales, decade ticks,
 * a legend, and a footer echoing the CSV metadata. Same input and style
 * version always produce the same bytes.
 */

export interface Point {
  x: number;
  y: number;
}

export interface Series {
  label: string;
  points: Point[];
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  xLog?: boolean;
  yLog?: boolean;
  footer?: string;
  series: Series[];
}

const WIDTH = 860;
const HEIGHT = 520;
const MARGIN = { left: 78, right: 24, top: 42, bottom: 58 };
const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];
// Keep at most this many decades visible on a log axis; tails that
// underflow far below the curve maximum carry no information.
const MAX_DECADES = 12;

function fmt(value: number): string {
  return value.toFixed(2).replace(/\.00$/, "");
}

function tickLabel(value: number, log: boolean): string {
  if (value === 0) return "0";
  const magnitude = Math.abs(value);
  if (log || magnitude >= 1e4 || magnitude < 1e-3) {
    const exp = Math.floor(Math.log10(magnitude) + 1e-9);
    const mant = value / 10 ** exp;
    const mantStr = Math.abs(mant - 1) < 1e-9 ? "" : `${Number(mant.toFixed(2))}x`;
    return `${mantStr}1e${exp}`;
  }
  return `${Number(value.toPrecision(6))}`;
}

function niceStep(span: number, target: number): number {
  const raw = span / target;
  const power = 10 ** Math.floor(Math.log10(raw));
  for (const mult of [1, 2, 5, 10]) {
    if (mult * power >= raw) return mult * power;
  }
  return 10 * power;
}

export interface Scale {
  toPixel(value: number): number;
  ticks: number[];
  lo: number;
  hi: number;
  log: boolean;
}

export function makeScale(values: number[], log: boolean, pixelLo: number, pixelHi: number): Scale {
  let usable = values.filter((v) => Number.isFinite(v));
  if (log) usable = usable.filter((v) => v > 0);
  if (usable.length === 0) {
    throw new Error("no finite data to scale" + (log ? " (log axis needs positive values)" : ""));
  }
  let lo = Math.min(...usable);
  let hi = Math.max(...usable);
  let ticks: number[];
  if (log) {
    let dHi = Math.ceil(Math.log10(hi));
    let dLo = Math.max(Math.floor(Math.log10(lo)), dHi - MAX_DECADES);
    if (dLo === dHi) dHi += 1;
    lo = 10 ** dLo;
    hi = 10 ** dHi;
    const every = Math.max(1, Math.ceil((dHi - dLo) / 10));
    ticks = [];
    for (let d = dLo; d <= dHi; d += every) ticks.push(10 ** d);
  } else {
    if (lo === hi) {
      lo -= 1;
      hi += 1;
    }
    const pad = 0.04 * (hi - lo);
    lo = lo >= 0 && lo - pad < 0 ? 0 : lo - pad;
    hi += pad;
    const step = niceStep(hi - lo, 6);
    const first = Math.ceil(lo / step) * step;
    ticks = [];
    for (let v = first; v <= hi + 1e-9 * step; v += step) ticks.push(Number(v.toPrecision(12)));
  }
  const toPixel = (value: number): number => {
    const t = log
      ? (Math.log10(value) - Math.log10(lo)) / (Math.log10(hi) - Math.log10(lo))
      : (value - lo) / (hi - lo);
    return pixelLo + t * (pixelHi - pixelLo);
  };
  return { toPixel, ticks, lo, hi, log };
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function buildChart(spec: ChartSpec): string {
  if (spec.series.length === 0) {
    throw new Error("chart needs at least one series");
  }
  const xs = spec.series.flatMap((s) => s.points.map((p) => p.x));
  const ys = spec.series.flatMap((s) => s.points.map((p) => p.y));
  const plotLeft = MARGIN.left;
  const plotRight = WIDTH - MARGIN.right;
  const plotTop = MARGIN.top;
  const plotBottom = HEIGHT - MARGIN.bottom;
  const xScale = makeScale(xs, Boolean(spec.xLog), plotLeft, plotRight);
  const yScale = makeScale(ys, Boolean(spec.yLog), plotBottom, plotTop);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${WIDTH} ${HEIGHT}" ` +
      `font-family="Helvetica, Arial, sans-serif">`
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="16">${escapeXml(spec.title)}</text>`
  );

  for (const tick of xScale.ticks) {
    const px = fmt(xScale.toPixel(tick));
    parts.push(
      `<line x1="${px}" y1="${plotTop}" x2="${px}" y2="${plotBottom}" stroke="#dddddd" stroke-width="1"/>`
    );
    parts.push(
      `<text x="${px}" y="${plotBottom + 18}" text-anchor="middle" font-size="11">` +
        `${escapeXml(tickLabel(tick, xScale.log))}</text>`
    );
  }
  for (const tick of yScale.ticks) {
    const py = fmt(yScale.toPixel(tick));
    parts.push(
      `<line x1="${plotLeft}" y1="${py}" x2="${plotRight}" y2="${py}" stroke="#dddddd" stroke-width="1"/>`
    );
    parts.push(
      `<text x="${plotLeft - 6}" y="${Number(py) + 4}" text-anchor="end" font-size="11">` +
        `${escapeXml(tickLabel(tick, yScale.log))}</text>`
    );
  }
  parts.push(
    `<rect x="${plotLeft}" y="${plotTop}" width="${plotRight - plotLeft}" ` +
      `height="${plotBottom - plotTop}" fill="none" stroke="#333333"/>`
  );
  parts.push(
    `<text x="${(plotLeft + plotRight) / 2}" y="${HEIGHT - 20}" text-anchor="middle" font-size="13">` +
      `${escapeXml(spec.xLabel)}</text>`
  );
  parts.push(
    `<text x="20" y="${(plotTop + plotBottom) / 2}" text-anchor="middle" font-size="13" ` +
      `transform="rotate(-90 20 ${(plotTop + plotBottom) / 2})">${escapeXml(spec.yLabel)}</text>`
  );

  spec.series.forEach((series, index) => {
    const color = PALETTE[index % PALETTE.length];
    const coords: string[] = [];
    for (const point of series.points) {
      if (!Number.isFinite(point.x) || !Number.isFinite(point.y)) continue;
      if (xScale.log && point.x <= 0) continue;
      if (yScale.log && (point.y <= 0 || point.y < yScale.lo)) continue;
      coords.push(`${fmt(xScale.toPixel(point.x))},${fmt(yScale.toPixel(point.y))}`);
    }
    if (coords.length === 0) return;
    parts.push(
      `<polyline points="${coords.join(" ")}" fill="none" stroke="${color}" stroke-width="1.8"/>`
    );
  });

  const legendX = plotRight - 190;
  let legendY = plotTop + 14;
  spec.series.forEach((series, index) => {
    const color = PALETTE[index % PALETTE.length];
    parts.push(
      `<line x1="${legendX}" y1="${legendY - 4}" x2="${legendX + 26}" y2="${legendY - 4}" ` +
        `stroke="${color}" stroke-width="2.4"/>`
    );
    parts.push(
      `<text x="${legendX + 32}" y="${legendY}" font-size="12">${escapeXml(series.label)}</text>`
    );
    legendY += 17;
  });

  if (spec.footer) {
    parts.push(
      `<text x="${plotLeft}" y="${HEIGHT - 6}" font-size="9" fill="#666666">` +
        `${escapeXml(spec.footer)}</text>`
    );
  }
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
