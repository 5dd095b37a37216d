/** SVG scatter of the nondominated front for 2 or 3 objectives. */

import { bounds, normalizePoint, project3, Bounds } from "./projection.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface Overlay {
  f: number[];
  kind: "predicted" | "evaluated";
  errLow?: number[];
  errHigh?: number[];
}

export class ScatterView {
  private yaw = 0.7;
  private pitch = 0.5;
  private front: number[][] = [];
  private overlays: Overlay[] = [];
  private b: Bounds | null = null;

  constructor(private host: HTMLElement, private size = 420) {}

  setFront(front: number[][]): void {
    this.front = front;
    const all = front.concat(this.overlays.map((o) => o.f));
    this.b = all.length ? bounds(all) : null;
    this.render();
  }

  setOverlays(overlays: Overlay[]): void {
    this.overlays = overlays;
    const all = this.front.concat(overlays.map((o) => o.f));
    this.b = all.length ? bounds(all) : null;
    this.render();
  }

  setAngles(yaw: number, pitch: number): void {
    this.yaw = yaw;
    this.pitch = pitch;
    this.render();
  }

  private toScreen(p: number[]): [number, number] {
    const u = normalizePoint(p, this.b!);
    if (p.length === 2) {
      return [
        40 + u[0] * (this.size - 80),
        this.size - 40 - u[1] * (this.size - 80),
      ];
    }
    const [px, py] = project3(u, this.yaw, this.pitch);
    return [
      this.size / 2 + px * (this.size / 2 - 40),
      this.size / 2 - py * (this.size / 2 - 40),
    ];
  }

  private render(): void {
    this.host.textContent = "";
    if (!this.b || this.front.length === 0) {
      const empty = document.createElement("p");
      empty.className = "placeholder";
      empty.textContent = "No nondominated points to display.";
      this.host.appendChild(empty);
      return;
    }
    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("viewBox", `0 0 ${this.size} ${this.size}`);
    svg.setAttribute("class", "scatter");

    const m = this.front[0].length;
    if (m === 3) {
      // unit-cube edges give depth context
      const corners: number[][] = [];
      for (let i = 0; i < 8; i++) {
        corners.push([i & 1, (i >> 1) & 1, (i >> 2) & 1]);
      }
      for (let i = 0; i < 8; i++) {
        for (let j = i + 1; j < 8; j++) {
          const diff =
            Math.abs(corners[i][0] - corners[j][0]) +
            Math.abs(corners[i][1] - corners[j][1]) +
            Math.abs(corners[i][2] - corners[j][2]);
          if (diff !== 1) continue;
          const a = this.edgePoint(corners[i]);
          const c = this.edgePoint(corners[j]);
          const line = document.createElementNS(SVG_NS, "line");
          line.setAttribute("x1", String(a[0]));
          line.setAttribute("y1", String(a[1]));
          line.setAttribute("x2", String(c[0]));
          line.setAttribute("y2", String(c[1]));
          line.setAttribute("class", "cube-edge");
          svg.appendChild(line);
        }
      }
    }

    for (const p of this.front) {
      const [cx, cy] = this.toScreen(p);
      const dot = document.createElementNS(SVG_NS, "circle");
      dot.setAttribute("cx", String(cx));
      dot.setAttribute("cy", String(cy));
      dot.setAttribute("r", "4");
      dot.setAttribute("class", "front-point");
      const tip = document.createElementNS(SVG_NS, "title");
      tip.textContent = `f = [${p.map((v) => v.toFixed(3)).join(", ")}]`;
      dot.appendChild(tip);
      svg.appendChild(dot);
    }

    for (const overlay of this.overlays) {
      const [cx, cy] = this.toScreen(overlay.f);
      if (overlay.errLow && overlay.errHigh) {
        for (let i = 0; i < overlay.f.length; i++) {
          const lo = overlay.f.slice();
          const hi = overlay.f.slice();
          lo[i] = overlay.errLow[i];
          hi[i] = overlay.errHigh[i];
          const [x1, y1] = this.toScreen(lo);
          const [x2, y2] = this.toScreen(hi);
          const bar = document.createElementNS(SVG_NS, "line");
          bar.setAttribute("x1", String(x1));
          bar.setAttribute("y1", String(y1));
          bar.setAttribute("x2", String(x2));
          bar.setAttribute("y2", String(y2));
          bar.setAttribute("class", "error-bar");
          svg.appendChild(bar);
        }
      }
      const mark = document.createElementNS(SVG_NS, overlay.kind === "evaluated" ? "rect" : "circle");
      if (overlay.kind === "evaluated") {
        mark.setAttribute("x", String(cx - 5));
        mark.setAttribute("y", String(cy - 5));
        mark.setAttribute("width", "10");
        mark.setAttribute("height", "10");
      } else {
        mark.setAttribute("cx", String(cx));
        mark.setAttribute("cy", String(cy));
        mark.setAttribute("r", "6");
      }
      mark.setAttribute("class", `overlay-${overlay.kind}`);
      svg.appendChild(mark);
    }
    this.host.appendChild(svg);
  }

  private edgePoint(corner: number[]): [number, number] {
    const [px, py] = project3(corner, this.yaw, this.pitch);
    return [
      this.size / 2 + px * (this.size / 2 - 40),
      this.size / 2 - py * (this.size / 2 - 40),
    ];
  }
}
