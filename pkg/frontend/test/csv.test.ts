import { describe, expect, it } from "vitest";

import { CsvError, numericColumn, parseCsv } from "../src/csv.js";

const SAMPLE = [
  "snr_db,cs,ce_rc0",
  "# seed=0 trials=100000 version=0.1.0",
  "0,0.1277,0.2394",
  "1,0.1458,0.2796",
].join("\n");

describe("parseCsv", () => {
  it("splits header, metadata, and rows", () => {
    const table = parseCsv(SAMPLE);
    expect(table.columns).toEqual(["snr_db", "cs", "ce_rc0"]);
    expect(table.meta).toEqual(["# seed=0 trials=100000 version=0.1.0"]);
    expect(table.rows).toHaveLength(2);
    expect(table.rows[1].cs).toBe("0.1458");
  });

  it("rejects empty input", () => {
    expect(() => parseCsv("")).toThrow(CsvError);
    expect(() => parseCsv("# only a comment\n")).toThrow(CsvError);
  });

  it("rejects a header without rows", () => {
    expect(() => parseCsv("a,b\n# meta\n")).toThrow(/no data rows/);
  });

  it("rejects ragged rows", () => {
    expect(() => parseCsv("a,b\n1,2,3\n")).toThrow(/cells/);
  });
});

describe("numericColumn", () => {
  it("parses numbers", () => {
    const table = parseCsv(SAMPLE);
    expect(numericColumn(table, "snr_db")).toEqual([0, 1]);
  });

  it("names the missing column", () => {
    const table = parseCsv(SAMPLE);
    expect(() => numericColumn(table, "outage")).toThrow(/column 'outage' not found/);
  });

  it("rejects non-numeric cells", () => {
    const table = parseCsv("a,b\n1,x\n");
    expect(() => numericColumn(table, "b")).toThrow(/non-numeric/);
  });
});
