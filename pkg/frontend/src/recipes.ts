/**
 * One recipe per sweep CSV: which columns become curves, the axis labels,
 * and where log scales apply (the outage figures span many decades).
 */

export interface SeriesSpec {
  x: string;
  y: string;
  label: string;
}

export interface GroupBySpec {
  key: string;
  x: string;
  y: string;
}

export interface FigureRecipe {
  name: string;
  csv: string;
  title: string;
  xLabel: string;
  yLabel: string;
  xLog?: boolean;
  yLog?: boolean;
  /** default mode: one curve per non-x column */
  xColumn?: string;
  /** explicit (x, y) pairs, for curves with their own abscissas */
  series?: SeriesSpec[];
  /** long-format mode: split rows by a key column, then plot x/y per group */
  groupBy?: GroupBySpec;
}

export const RECIPES: FigureRecipe[] = [
  {
    name: "fig1",
    csv: "fig1.csv",
    title: "Optimized secrecy rates vs average SNR",
    xLabel: "average SNR (dB)",
    yLabel: "rate (bits/channel use)",
    xColumn: "snr_db",
  },
  {
    name: "fig2",
    csv: "fig2.csv",
    title: "Outage probability vs key rate (side info 2, SNR 30 dB)",
    xLabel: "key rate (bits/channel use)",
    yLabel: "secrecy outage probability",
    yLog: true,
    series: [
      { x: "key_rate_r0_4", y: "outage_r0_4", label: "tx rate 4" },
      { x: "key_rate_r0_6", y: "outage_r0_6", label: "tx rate 6" },
      { x: "key_rate_r0_7", y: "outage_r0_7", label: "tx rate 7" },
      { x: "key_rate_r0_8", y: "outage_r0_8", label: "tx rate 8" },
    ],
  },
  {
    name: "fig3",
    csv: "fig3.csv",
    title: "Outage probability vs key rate (tx rate 10, SNR 30 dB)",
    xLabel: "key rate (bits/channel use)",
    yLabel: "secrecy outage probability",
    yLog: true,
    series: [
      { x: "key_rate", y: "outage_rc_3", label: "side info 3" },
      { x: "key_rate", y: "outage_rc_4", label: "side info 4" },
      { x: "key_rate", y: "outage_rc_5", label: "side info 5" },
      { x: "key_rate", y: "outage_rc_7", label: "side info 7" },
    ],
  },
  {
    name: "fig4",
    csv: "fig4.csv",
    title: "Key rate at outage 1e-10 vs SNR, finite frames",
    xLabel: "average SNR (dB)",
    yLabel: "key rate (bits/channel use)",
    groupBy: { key: "modulation+payload_bits", x: "snr_db", y: "key_rate" },
  },
  {
    name: "fig5",
    csv: "fig5.csv",
    title: "Random-phase key rates, shared exponential gains",
    xLabel: "average SNR (dB)",
    yLabel: "key rate (bits/channel use)",
    groupBy: { key: "n_antennas", x: "snr_db", y: "key_rate" },
  },
  {
    name: "fig6",
    csv: "fig6.csv",
    title: "Random-phase key rates, 3 antennas, chi-square gains",
    xLabel: "average SNR (dB)",
    yLabel: "key rate (bits/channel use)",
    groupBy: { key: "chi_square_dof", x: "snr_db", y: "key_rate" },
  },
  {
    name: "fig7",
    csv: "fig7.csv",
    title: "Random-phase key rates, 4 antennas, chi-square gains",
    xLabel: "average SNR (dB)",
    yLabel: "key rate (bits/channel use)",
    groupBy: { key: "chi_square_dof", x: "snr_db", y: "key_rate" },
  },
  {
    name: "fig8",
    csv: "fig8.csv",
    title: "Random-phase key rates, 8 antennas, chi-square gains",
    xLabel: "average SNR (dB)",
    yLabel: "key rate (bits/channel use)",
    groupBy: { key: "chi_square_dof", x: "snr_db", y: "key_rate" },
  },
  {
    name: "fig9",
    csv: "fig9.csv",
    title: "Greedy rate adaptation vs channel memory (SNR 10 dB)",
    xLabel: "memory parameter alpha",
    yLabel: "key rate (bits/channel use)",
    xLog: true,
    series: [
      { x: "alpha", y: "key_rate", label: "greedy adaptation" },
      { x: "alpha", y: "upper_bound", label: "ergodic upper bound" },
      { x: "alpha", y: "lower_bound", label: "memoryless optimum" },
    ],
  },
];
