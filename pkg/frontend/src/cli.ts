#!/usr/bin/env node
import { parseArgs } from 'util';

import { ImageFormat, renderAggregated } from './render';

function usage(): void {
    console.error('usage: duelbench-plot --in <aggregated.csv> --out <dir> [--format <svg|png>]');
}

export function main(argv: string[]): number {
    let parsed;
    try {
        parsed = parseArgs({
            args: argv,
            options: {
                in: { type: 'string' },
                out: { type: 'string' },
                format: { type: 'string', default: 'svg' },
            },
        });
    } catch (err) {
        console.error((err as Error).message);
        usage();
        return 1;
    }
    const { in: input, out, format } = parsed.values;
    if (!input || !out || (format !== 'svg' && format !== 'png')) {
        usage();
        return 1;
    }
    let result;
    try {
        result = renderAggregated(input, out, format as ImageFormat);
    } catch (err) {
        console.error(`error: ${(err as Error).message}`);
        return 1;
    }
    for (const path of result.written) {
        console.log(path);
    }
    for (const name of result.skipped) {
        console.error(`skipped empty panel ${name}`);
    }
    return 0;
}

if (require.main === module) {
    process.exit(main(process.argv.slice(2)));
}
