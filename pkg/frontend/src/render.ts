/**
 * Turns one sweep CSV into one SVG according to its recipe. Rendering is
 * read-only over the inputs; the CSV metadata comment is echoed into the
 * plot footer.
 */
import { readFileSync, writeFileSync, mkdirSync } from "node:fs";
import { join } from "node:path";

import { CsvTable, numericColumn, parseCsv } from "./csv.js";
import { FigureRecipe, RECIPES } from "./recipes.js";
import { Series, buildChart } from "./svg.js";

export class RenderError extends Error {}

function seriesFromRecipe(recipe: FigureRecipe, table: CsvTable): Series[] {
  const out: Series[] = [];
  if (recipe.series) {
    for (const spec of recipe.series) {
      const xs = numericColumn(table, spec.x);
      const ys = numericColumn(table, spec.y);
      out.push({ label: spec.label, points: xs.map((x, i) => ({ x, y: ys[i] })) });
    }
    return out;
  }
  if (recipe.groupBy) {
    const keys = recipe.groupBy.key.split("+");
    for (const key of keys) {
      if (!table.columns.includes(key)) {
        throw new RenderError(`column '${key}' not found in ${recipe.csv}`);
      }
    }
    const xs = numericColumn(table, recipe.groupBy.x);
    const ys = numericColumn(table, recipe.groupBy.y);
    const groups = new Map<string, { x: number; y: number }[]>();
    table.rows.forEach((row, i) => {
      const label = keys.map((key) => `${key}=${row[key]}`).join(" ");
      if (!groups.has(label)) groups.set(label, []);
      groups.get(label)!.push({ x: xs[i], y: ys[i] });
    });
    for (const [label, points] of groups) {
      out.push({ label, points });
    }
    return out;
  }
  if (!recipe.xColumn) {
    throw new RenderError(`recipe ${recipe.name} defines no series`);
  }
  const xs = numericColumn(table, recipe.xColumn);
  for (const column of table.columns) {
    if (column === recipe.xColumn) continue;
    const ys = numericColumn(table, column);
    out.push({ label: column, points: xs.map((x, i) => ({ x, y: ys[i] })) });
  }
  return out;
}

export function renderFigure(recipe: FigureRecipe, csvText: string): string {
  let table: CsvTable;
  try {
    table = parseCsv(csvText);
  } catch (err) {
    throw new RenderError(`${recipe.csv}: ${(err as Error).message}`);
  }
  let series: Series[];
  try {
    series = seriesFromRecipe(recipe, table);
  } catch (err) {
    throw new RenderError(`${recipe.csv}: ${(err as Error).message}`);
  }
  return buildChart({
    title: recipe.title,
    xLabel: recipe.xLabel,
    yLabel: recipe.yLabel,
    xLog: recipe.xLog,
    yLog: recipe.yLog,
    footer: table.meta[0],
    series,
  });
}

export function renderAll(csvDir: string, outDir: string): string[] {
  mkdirSync(outDir, { recursive: true });
  const written: string[] = [];
  for (const recipe of RECIPES) {
    const csvPath = join(csvDir, recipe.csv);
    let text: string;
    try {
      text = readFileSync(csvPath, "utf-8");
    } catch {
      throw new RenderError(`cannot read ${csvPath}`);
    }
    const svg = renderFigure(recipe, text);
    const outPath = join(outDir, `${recipe.name}.svg`);
    writeFileSync(outPath, svg, "utf-8");
    written.push(outPath);
  }
  return written;
}
