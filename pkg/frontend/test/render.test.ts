import { mkdtempSync, readdirSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { RECIPES } from "../src/recipes.js";
import { RenderError, renderAll, renderFigure } from "../src/render.js";

const META = "# seed=0 trials=1000 version=0.1.0";

function fixture(name: string): string {
  switch (name) {
    case "fig1":
      return [
        "snr_db,cs,ce_rc0,ce_rc3,ce_rc7",
        META,
        "0,0.13,0.24,0.0001,0",
        "1,0.15,0.28,0.0005,0",
        "2,0.16,0.32,0.002,1e-6",
      ].join("\n");
    case "fig2":
      return [
        "frames_per_key,key_rate_r0_4,outage_r0_4,key_rate_r0_6,outage_r0_6,key_rate_r0_7,outage_r0_7,key_rate_r0_8,outage_r0_8",
        META,
        "1,3.9,0.99,5.6,0.985,6.1,0.97,6.2,0.94",
        "10,0.39,0.97,0.56,0.86,0.61,0.73,0.62,0.53",
        "100,0.039,0.74,0.056,0.22,0.061,0.043,0.062,0.0018",
        "1000,0.0039,0.05,0.0056,3e-7,0.0061,2e-14,0.0062,4e-28",
      ].join("\n");
    case "fig3":
      return [
        "frames_per_key,key_rate,outage_rc_3,outage_rc_4,outage_rc_5,outage_rc_7",
        META,
        "1,3.6,0.88,0.94,0.97,0.99",
        "10,0.36,0.28,0.53,0.73,0.93",
        "100,0.036,3e-6,0.0018,0.043,0.5",
        "1000,0.0036,1e-56,4e-28,2e-14,0.0009",
      ].join("\n");
    case "fig4":
      return [
        "snr_db,modulation,payload_bits,key_rate,frames_per_key",
        META,
        "0,uncoded-bpsk,240,0.0004,70",
        "0,uncoded-bpsk,480,0.0005,30",
        "5,uncoded-bpsk,240,0.0013,110",
        "5,uncoded-bpsk,480,0.0026,60",
        "0,coded-bpsk,240,0.002,43",
        "5,coded-bpsk,240,0.0018,260",
      ].join("\n");
    case "fig5":
      return [
        "n_antennas,snr_db,key_rate,stderr",
        META,
        "2,0,0.065,0.001",
        "2,10,0.165,0.001",
        "3,0,0.087,0.001",
        "3,10,0.219,0.001",
        "8,0,0.113,0.001",
        "8,10,0.283,0.001",
      ].join("\n");
    case "fig6":
    case "fig7":
    case "fig8":
      return [
        "chi_square_dof,snr_db,key_rate,stderr",
        META,
        "2,0,0.08,0.001",
        "2,10,0.21,0.001",
        "4,0,0.09,0.001",
        "4,10,0.23,0.001",
      ].join("\n");
    case "fig9":
      return [
        "alpha,key_rate,stderr,upper_bound,lower_bound",
        META,
        "0.01,0.45,0.03,0.75,0.31",
        "0.1,0.38,0.01,0.75,0.31",
        "0.5,0.32,0.005,0.75,0.31",
        "1,0.31,0.005,0.75,0.31",
      ].join("\n");
    default:
      throw new Error(`no fixture for ${name}`);
  }
}

describe("renderFigure", () => {
  it("draws one curve per non-x column in default mode", () => {
    const recipe = RECIPES.find((r) => r.name === "fig1")!;
    const svg = renderFigure(recipe, fixture("fig1"));
    expect(svg).toContain("<svg");
    expect((svg.match(/<polyline/g) ?? []).length).toBe(4);
    expect(svg).toContain("ce_rc3"); // legend from column names
  });

  it("uses a log y axis with decade ticks on the outage figures", () => {
    for (const name of ["fig2", "fig3"]) {
      const recipe = RECIPES.find((r) => r.name === name)!;
      expect(recipe.yLog).toBe(true);
      const svg = renderFigure(recipe, fixture(name));
      expect(svg).toContain("1e-2");
      expect(svg).toContain("1e-6");
    }
  });

  it("caps a log axis to a readable number of decades", () => {
    const recipe = RECIPES.find((r) => r.name === "fig3")!;
    const svg = renderFigure(recipe, fixture("fig3"));
    expect(svg).not.toContain("1e-56");
  });

  it("groups long-format rows into labeled curves", () => {
    const recipe = RECIPES.find((r) => r.name === "fig5")!;
    const svg = renderFigure(recipe, fixture("fig5"));
    expect((svg.match(/<polyline/g) ?? []).length).toBe(3);
    expect(svg).toContain("n_antennas=8");
  });

  it("echoes the metadata comment into the footer", () => {
    const recipe = RECIPES.find((r) => r.name === "fig1")!;
    const svg = renderFigure(recipe, fixture("fig1"));
    expect(svg).toContain("seed=0 trials=1000");
  });

  it("is deterministic", () => {
    const recipe = RECIPES.find((r) => r.name === "fig2")!;
    expect(renderFigure(recipe, fixture("fig2"))).toBe(renderFigure(recipe, fixture("fig2")));
  });

  it("names a missing column", () => {
    const recipe = RECIPES.find((r) => r.name === "fig3")!;
    const broken = fixture("fig3").replace("outage_rc_4", "outage_rc_x");
    expect(() => renderFigure(recipe, broken)).toThrow(/outage_rc_4/);
  });

  it("rejects malformed CSV", () => {
    const recipe = RECIPES.find((r) => r.name === "fig1")!;
    expect(() => renderFigure(recipe, "")).toThrow(RenderError);
    expect(() => renderFigure(recipe, "a,b\n1\n")).toThrow(RenderError);
  });
});

describe("renderAll", () => {
  it("writes nine SVGs from the nine CSVs", () => {
    const csvDir = mkdtempSync(join(tmpdir(), "csv-"));
    const outDir = mkdtempSync(join(tmpdir(), "svg-"));
    for (const recipe of RECIPES) {
      writeFileSync(join(csvDir, recipe.csv), fixture(recipe.name), "utf-8");
    }
    const written = renderAll(csvDir, outDir);
    expect(written).toHaveLength(9);
    const files = readdirSync(outDir).sort();
    expect(files).toEqual(
      ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"].map(
        (n) => `${n}.svg`
      )
    );
  });

  it("fails loudly when a CSV is missing", () => {
    const csvDir = mkdtempSync(join(tmpdir(), "csv-"));
    const outDir = mkdtempSync(join(tmpdir(), "svg-"));
    expect(() => renderAll(csvDir, outDir)).toThrow(/cannot read/);
  });
});
