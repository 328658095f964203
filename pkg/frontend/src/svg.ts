import { Panel, Series } from './csv';

const WIDTH = 760;
const HEIGHT = 480;
const MARGIN = { top: 48, right: 24, bottom: 56, left: 84 };

/** Colors are assigned by sorted algorithm name, keeping legends stable. */
const PALETTE = [
    '#1f77b4', '#d62728', '#2ca02c', '#9467bd',
    '#ff7f0e', '#8c564b', '#17becf', '#7f7f7f',
];

function niceTicks(lo: number, hi: number, count: number): number[] {
    if (hi === lo) {
        hi = lo + 1;
    }
    const span = hi - lo;
    const step = Math.pow(10, Math.floor(Math.log10(span / count)));
    const candidates = [step, 2 * step, 5 * step, 10 * step];
    const chosen = candidates.find((s) => span / s <= count) ?? 10 * step;
    const start = Math.ceil(lo / chosen) * chosen;
    const ticks: number[] = [];
    for (let v = start; v <= hi + 1e-9 * span; v += chosen) {
        ticks.push(Math.abs(v) < 1e-12 * span ? 0 : v);
    }
    return ticks;
}

function formatTick(v: number): string {
    if (Math.abs(v) >= 10000) {
        return v.toExponential(0).replace('+', '');
    }
    return `${Math.round(v * 1000) / 1000}`;
}

function escapeXml(s: string): string {
    return s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

function coord(v: number): string {
    return v.toFixed(2);
}

/** Render one panel to a deterministic standalone SVG document. */
export function renderPanelSvg(panel: Panel): string {
    const plotW = WIDTH - MARGIN.left - MARGIN.right;
    const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;

    let tMax = 1;
    let yLo = 0;
    let yHi = 0;
    for (const s of panel.series) {
        for (let i = 0; i < s.t.length; i++) {
            tMax = Math.max(tMax, s.t[i]);
            yLo = Math.min(yLo, s.mean[i] - s.std[i]);
            yHi = Math.max(yHi, s.mean[i] + s.std[i]);
        }
    }
    if (yHi === yLo) {
        yHi = yLo + 1;
    }
    const pad = 0.05 * (yHi - yLo);
    yLo -= pad;
    yHi += pad;

    const x = (t: number) => MARGIN.left + (t / tMax) * plotW;
    const y = (v: number) => MARGIN.top + (1 - (v - yLo) / (yHi - yLo)) * plotH;

    const parts: string[] = [];
    parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`);
    parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
    parts.push(`<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">` +
        `${escapeXml(panel.experiment)} (T=${panel.horizon})</text>`);

    // axes
    const x0 = MARGIN.left;
    const x1 = MARGIN.left + plotW;
    const yBottom = MARGIN.top + plotH;
    for (const tick of niceTicks(0, tMax, 6)) {
        const px = x(tick);
        parts.push(`<line x1="${coord(px)}" y1="${MARGIN.top}" x2="${coord(px)}" y2="${yBottom}" stroke="#dddddd" stroke-width="1"/>`);
        parts.push(`<text x="${coord(px)}" y="${yBottom + 20}" text-anchor="middle" font-family="sans-serif" font-size="12">${formatTick(tick)}</text>`);
    }
    for (const tick of niceTicks(yLo, yHi, 6)) {
        const py = y(tick);
        parts.push(`<line x1="${x0}" y1="${coord(py)}" x2="${x1}" y2="${coord(py)}" stroke="#dddddd" stroke-width="1"/>`);
        parts.push(`<text x="${x0 - 8}" y="${coord(py + 4)}" text-anchor="end" font-family="sans-serif" font-size="12">${formatTick(tick)}</text>`);
    }
    parts.push(`<line x1="${x0}" y1="${yBottom}" x2="${x1}" y2="${yBottom}" stroke="black" stroke-width="1"/>`);
    parts.push(`<line x1="${x0}" y1="${MARGIN.top}" x2="${x0}" y2="${yBottom}" stroke="black" stroke-width="1"/>`);
    parts.push(`<text x="${(x0 + x1) / 2}" y="${HEIGHT - 12}" text-anchor="middle" font-family="sans-serif" font-size="13">round t</text>`);
    parts.push(`<text x="20" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 20 ${MARGIN.top + plotH / 2})">cumulative regret</text>`);

    // one band + mean line per algorithm
    panel.series.forEach((s: Series, index: number) => {
        const color = PALETTE[index % PALETTE.length];
        const upper = s.t.map((t, i) => `${coord(x(t))},${coord(y(s.mean[i] + s.std[i]))}`);
        const lower = s.t.map((t, i) => `${coord(x(t))},${coord(y(s.mean[i] - s.std[i]))}`).reverse();
        parts.push(`<polygon class="band" points="${upper.concat(lower).join(' ')}" fill="${color}" fill-opacity="0.18" stroke="none"/>`);
        const line = s.t.map((t, i) => `${coord(x(t))},${coord(y(s.mean[i]))}`).join(' ');
        parts.push(`<polyline class="mean" points="${line}" fill="none" stroke="${color}" stroke-width="1.8"/>`);
    });

    // legend, top-left inside the plot area
    panel.series.forEach((s: Series, index: number) => {
        const color = PALETTE[index % PALETTE.length];
        const ly = MARGIN.top + 14 + 18 * index;
        parts.push(`<line x1="${x0 + 10}" y1="${ly}" x2="${x0 + 34}" y2="${ly}" stroke="${color}" stroke-width="2.5"/>`);
        parts.push(`<text x="${x0 + 40}" y="${ly + 4}" font-family="sans-serif" font-size="12">${escapeXml(s.algorithm)}</text>`);
    });

    parts.push('</svg>');
    return parts.join('\n') + '\n';
}
