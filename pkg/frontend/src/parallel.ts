/** Parallel-coordinates view for runs with more than three objectives. */

import { bounds } from "./projection.js";
import { Overlay } from "./scatter.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export class ParallelView {
  private front: number[][] = [];
  private overlays: Overlay[] = [];

  constructor(private host: HTMLElement, private width = 560, private height = 380) {}

  setFront(front: number[][]): void {
    this.front = front;
    this.render();
  }

  setOverlays(overlays: Overlay[]): void {
    this.overlays = overlays;
    this.render();
  }

  private render(): void {
    this.host.textContent = "";
    if (this.front.length === 0) {
      const empty = document.createElement("p");
      empty.className = "placeholder";
      empty.textContent = "No nondominated points to display.";
      this.host.appendChild(empty);
      return;
    }
    const m = this.front[0].length;
    const all = this.front.concat(this.overlays.map((o) => o.f));
    const b = bounds(all);
    const left = 40;
    const right = this.width - 20;
    const top = 20;
    const bottom = this.height - 30;
    const axisX = (i: number) => left + (i * (right - left)) / (m - 1);
    const valueY = (v: number, i: number) =>
      bottom - ((v - b.min[i]) / (b.max[i] - b.min[i])) * (bottom - top);

    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("viewBox", `0 0 ${this.width} ${this.height}`);
    svg.setAttribute("class", "parallel");

    for (let i = 0; i < m; i++) {
      const axis = document.createElementNS(SVG_NS, "line");
      axis.setAttribute("x1", String(axisX(i)));
      axis.setAttribute("y1", String(top));
      axis.setAttribute("x2", String(axisX(i)));
      axis.setAttribute("y2", String(bottom));
      axis.setAttribute("class", "axis");
      svg.appendChild(axis);
      const label = document.createElementNS(SVG_NS, "text");
      label.setAttribute("x", String(axisX(i)));
      label.setAttribute("y", String(this.height - 10));
      label.setAttribute("text-anchor", "middle");
      label.setAttribute("class", "axis-label");
      label.textContent = `f${i + 1}`;
      svg.appendChild(label);
    }

    const polyline = (f: number[], cls: string) => {
      const line = document.createElementNS(SVG_NS, "polyline");
      line.setAttribute(
        "points",
        f.map((v, i) => `${axisX(i)},${valueY(v, i)}`).join(" ")
      );
      line.setAttribute("class", cls);
      return line;
    };

    for (const f of this.front) {
      svg.appendChild(polyline(f, "front-line"));
    }
    for (const overlay of this.overlays) {
      svg.appendChild(polyline(overlay.f, `overlay-line overlay-${overlay.kind}`));
    }
    this.host.appendChild(svg);
  }
}
