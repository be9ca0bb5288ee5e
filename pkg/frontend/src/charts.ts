/**
 * uPlot wrapper for the result plots: one time-series chart per selected
 * factor, destroyed and rebuilt when the selection changes.
 */

import uPlot from "uplot";

import type { ResultSeries } from "./csv.js";
import { PLOT_FACTORS } from "./csv.js";

const LINE_COLORS = [
  "#2563eb",
  "#dc2626",
  "#059669",
  "#d97706",
  "#7c3aed",
  "#0891b2",
  "#4b5563",
];

export class ResultCharts {
  private plots: uPlot[] = [];

  constructor(private container: HTMLElement) {}

  render(series: ResultSeries, selectedColumns: string[]): void {
    this.clear();
    const width = Math.max(this.container.clientWidth - 16, 320);
    selectedColumns.forEach((column, index) => {
      const factor = PLOT_FACTORS.find((f) => f.column === column);
      const values = series.columns.get(column);
      if (!factor || !values) return;
      const panel = document.createElement("div");
      panel.className = "chart-panel";
      this.container.appendChild(panel);
      const options: uPlot.Options = {
        title: `${factor.label} (${factor.unit})`,
        width,
        height: 220,
        series: [
          {},
          {
            label: factor.label,
            stroke: LINE_COLORS[index % LINE_COLORS.length],
            width: 1.5,
          },
        ],
        axes: [{}, { label: factor.unit }],
      };
      this.plots.push(new uPlot(options, [series.timestamps, values], panel));
    });
  }

  clear(): void {
    for (const plot of this.plots) plot.destroy();
    this.plots = [];
    this.container.replaceChildren();
  }
}
