/**
 * Reader for the sweep CSVs: a header row, any number of `#` metadata
 * comment lines, then data rows. Cells are kept as strings; numeric access
 * goes through numericColumn so missing columns fail loudly.
 */

export class CsvError extends Error {}

export interface CsvTable {
  columns: string[];
  rows: Record<string, string>[];
  meta: string[];
}

export function parseCsv(text: string): CsvTable {
  const lines = text
    .split(/\r?\n/)
    .map((line) => line.trim())
    .filter((line) => line.length > 0);
  const meta: string[] = [];
  const dataLines: string[] = [];
  for (const line of lines) {
    if (line.startsWith("#")) {
      meta.push(line);
    } else {
      dataLines.push(line);
    }
  }
  if (dataLines.length === 0) {
    throw new CsvError("CSV has no header row");
  }
  const columns = dataLines[0].split(",").map((c) => c.trim());
  if (columns.some((c) => c.length === 0)) {
    throw new CsvError("CSV header contains an empty column name");
  }
  const rows: Record<string, string>[] = [];
  for (const line of dataLines.slice(1)) {
    const cells = line.split(",");
    if (cells.length !== columns.length) {
      throw new CsvError(
        `CSV row has ${cells.length} cells but the header has ${columns.length} columns: ${line}`
      );
    }
    const row: Record<string, string> = {};
    columns.forEach((column, i) => {
      row[column] = cells[i].trim();
    });
    rows.push(row);
  }
  if (rows.length === 0) {
    throw new CsvError("CSV has a header but no data rows");
  }
  return { columns, rows, meta };
}

export function numericColumn(table: CsvTable, name: string): number[] {
  if (!table.columns.includes(name)) {
    throw new CsvError(`column '${name}' not found; header has: ${table.columns.join(", ")}`);
  }
  return table.rows.map((row) => {
    const value = Number(row[name]);
    if (Number.isNaN(value)) {
      throw new CsvError(`column '${name}' has a non-numeric cell: '${row[name]}'`);
    }
    return value;
  });
}
