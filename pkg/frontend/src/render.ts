import { mkdirSync, writeFileSync } from 'fs';
import { join } from 'path';

import { buildPanels, parseAggregatedCsv } from './csv';
import { renderPanelSvg } from './svg';

export type ImageFormat = 'svg' | 'png';

export interface RenderResult {
    written: string[];
    skipped: string[];
}

function toPng(svg: string): Buffer {
    // lazy import so svg-only use works even without the native rasterizer
    const { Resvg } = require('@resvg/resvg-js');
    return new Resvg(svg, { font: { loadSystemFonts: true } }).render().asPng();
}

/** Render one image per (experiment, horizon) group of the aggregated CSV. */
export function renderAggregated(csvPath: string, outDir: string, format: ImageFormat): RenderResult {
    const rows = parseAggregatedCsv(csvPath);
    const panels = buildPanels(rows);
    mkdirSync(outDir, { recursive: true });
    const result: RenderResult = { written: [], skipped: [] };
    for (const panel of panels) {
        const name = `${panel.experiment}_${panel.horizon}.${format}`;
        if (panel.series.length === 0 || panel.series.every((s) => s.t.length === 0)) {
            result.skipped.push(name);
            continue;
        }
        const svg = renderPanelSvg(panel);
        const path = join(outDir, name);
        if (format === 'svg') {
            writeFileSync(path, svg, 'utf8');
        } else {
            writeFileSync(path, toPng(svg));
        }
        result.written.push(path);
    }
    return result;
}
