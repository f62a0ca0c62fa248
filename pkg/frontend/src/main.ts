#!/usr/bin/env node
/**
 * render-figures <csv-dir> <out-dir>
 *
 * Reads the nine sweep CSVs from <csv-dir> and writes one SVG per figure
 * into <out-dir>.
 */
import { RenderError, renderAll } from "./render.js";

function main(argv: string[]): number {
  if (argv.length !== 2) {
    console.error("usage: render-figures <csv-dir> <out-dir>");
    return 2;
  }
  const [csvDir, outDir] = argv;
  try {
    const written = renderAll(csvDir, outDir);
    for (const path of written) {
      console.log(`wrote ${path}`);
    }
  } catch (err) {
    if (err instanceof RenderError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
  return 0;
}

process.exit(main(process.argv.slice(2)));
