import { mkdtempSync, readFileSync, readdirSync, writeFileSync } from 'fs';
import { tmpdir } from 'os';
import { join } from 'path';
import { describe, expect, it } from 'vitest';

import { buildPanels, parseAggregatedCsv } from '../src/csv';
import { renderAggregated } from '../src/render';
import { renderPanelSvg } from '../src/svg';
import { main } from '../src/cli';

const HEADER = 'experiment,horizon,algorithm,t,count,mean,std';

function syntheticCsv(dir: string): string {
    const lines = [HEADER];
    for (const horizon of [100, 200]) {
        for (const algorithm of ['Exp3+UnifK-1', 'WS-W']) {
            for (let i = 1; i <= 10; i++) {
                const t = (horizon / 10) * i;
                const mean = algorithm === 'WS-W' ? Math.sqrt(t) : 0.05 * t;
                lines.push(`exp_demo,${horizon},${algorithm},${t},10,${mean},${mean / 4}`);
            }
        }
    }
    const path = join(dir, 'agg.csv');
    writeFileSync(path, lines.join('\n') + '\n');
    return path;
}

describe('aggregated csv parsing', () => {
    it('reads rows and groups panels by experiment and horizon', () => {
        const dir = mkdtempSync(join(tmpdir(), 'plot-'));
        const rows = parseAggregatedCsv(syntheticCsv(dir));
        expect(rows).toHaveLength(40);
        const panels = buildPanels(rows);
        expect(panels).toHaveLength(2);
        expect(panels[0].series.map((s) => s.algorithm)).toEqual(['Exp3+UnifK-1', 'WS-W']);
        expect(panels[0].series[0].t).toHaveLength(10);
    });

    it('rejects a csv without the expected columns', () => {
        const dir = mkdtempSync(join(tmpdir(), 'plot-'));
        const path = join(dir, 'bad.csv');
        writeFileSync(path, 'experiment,algorithm\na,b\n');
        expect(() => parseAggregatedCsv(path)).toThrow(/missing column/);
    });
});

describe('rendering', () => {
    it('emits exactly one image per experiment/horizon with curves and bands', () => {
        const dir = mkdtempSync(join(tmpdir(), 'plot-'));
        const csv = syntheticCsv(dir);
        const out = join(dir, 'figs');
        const result = renderAggregated(csv, out, 'svg');
        expect(result.written.map((p) => p.split('/').pop()).sort()).toEqual([
            'exp_demo_100.svg',
            'exp_demo_200.svg',
        ]);
        expect(readdirSync(out)).toHaveLength(2);
        const svg = readFileSync(join(out, 'exp_demo_100.svg'), 'utf8');
        expect(svg.match(/class="mean"/g)).toHaveLength(2);
        expect(svg.match(/class="band"/g)).toHaveLength(2);
        expect(svg).toContain('Exp3+UnifK-1');
        expect(svg).toContain('WS-W');
    });

    it('is deterministic across invocations', () => {
        const dir = mkdtempSync(join(tmpdir(), 'plot-'));
        const csv = syntheticCsv(dir);
        const a = join(dir, 'a');
        const b = join(dir, 'b');
        renderAggregated(csv, a, 'svg');
        renderAggregated(csv, b, 'svg');
        const bytesA = readFileSync(join(a, 'exp_demo_100.svg'));
        const bytesB = readFileSync(join(b, 'exp_demo_100.svg'));
        expect(bytesA.equals(bytesB)).toBe(true);
    });

    it('renders negative regret without clipping', () => {
        const rows = [];
        for (let i = 1; i <= 10; i++) {
            rows.push({
                experiment: 'vn', horizon: 100, algorithm: 'VN+UnifK-1',
                t: 10 * i, count: 10, mean: -2 * i, std: 1,
            });
        }
        const [panel] = buildPanels(rows);
        const svg = renderPanelSvg(panel);
        expect(svg).toMatch(/>-\d+</);    // a negative y tick is labelled
        const points = svg.match(/class="mean" points="([^"]+)"/)![1]
            .split(' ')
            .map((pair) => Number(pair.split(',')[1]));
        // every mean vertex stays inside the drawable plot band
        for (const py of points) {
            expect(py).toBeGreaterThan(40);
            expect(py).toBeLessThan(440);
        }
    });

    it('writes png files when asked', () => {
        const dir = mkdtempSync(join(tmpdir(), 'plot-'));
        const csv = syntheticCsv(dir);
        const out = join(dir, 'figs');
        const result = renderAggregated(csv, out, 'png');
        expect(result.written).toHaveLength(2);
        const bytes = readFileSync(result.written[0]);
        expect(bytes.subarray(0, 4)).toEqual(Buffer.from([0x89, 0x50, 0x4e, 0x47]));
    });
});

describe('cli', () => {
    it('requires the input and output flags', () => {
        expect(main([])).toBe(1);
        expect(main(['--in', 'x.csv'])).toBe(1);
        expect(main(['--in', 'x.csv', '--out', 'y', '--format', 'jpg'])).toBe(1);
    });

    it('renders through the command entry point', () => {
        const dir = mkdtempSync(join(tmpdir(), 'plot-'));
        const csv = syntheticCsv(dir);
        const out = join(dir, 'cli-out');
        expect(main(['--in', csv, '--out', out, '--format', 'svg'])).toBe(0);
        expect(readdirSync(out)).toHaveLength(2);
    });

    it('fails cleanly on a missing input file', () => {
        expect(main(['--in', '/nonexistent.csv', '--out', '/tmp/zz'])).toBe(1);
    });
});
