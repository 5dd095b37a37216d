/** Preference sliders with locking, numeric entry, and vertex snaps. */

import { finalize, renormalize, snapToVertex } from "./simplex.js";

export class PreferenceControls {
  values: number[];
  locked: boolean[];
  private rows: {
    slider: HTMLInputElement;
    number: HTMLInputElement;
    lock: HTMLInputElement;
    error: HTMLElement;
  }[] = [];

  constructor(
    private host: HTMLElement,
    private m: number,
    private onChange: () => void
  ) {
    this.values = new Array(m).fill(1 / m);
    this.locked = new Array(m).fill(false);
    this.build();
  }

  current(): number[] {
    return finalize(this.values);
  }

  set(values: number[]): void {
    this.values = finalize(values);
    this.sync();
    this.onChange();
  }

  showError(message: string, component?: number): void {
    this.rows.forEach((row, i) => {
      row.error.textContent =
        component === undefined || component === i ? message : "";
    });
  }

  clearErrors(): void {
    this.rows.forEach((row) => (row.error.textContent = ""));
  }

  private applyEdit(index: number, value: number): void {
    this.values = renormalize(this.values, this.locked, index, value);
    this.sync();
    this.onChange();
  }

  private build(): void {
    this.host.textContent = "";
    const snapBar = document.createElement("div");
    snapBar.className = "snap-bar";
    for (let i = 0; i < this.m; i++) {
      const snap = document.createElement("button");
      snap.type = "button";
      snap.textContent = `f${i + 1} only`;
      snap.addEventListener("click", () => this.set(snapToVertex(this.m, i)));
      snapBar.appendChild(snap);
    }
    this.host.appendChild(snapBar);

    for (let i = 0; i < this.m; i++) {
      const row = document.createElement("div");
      row.className = "slider-row";

      const label = document.createElement("label");
      label.textContent = `w${i + 1}`;

      const slider = document.createElement("input");
      slider.type = "range";
      slider.min = "0";
      slider.max = "1";
      slider.step = "0.001";
      slider.addEventListener("input", () =>
        this.applyEdit(i, Number(slider.value))
      );

      const number = document.createElement("input");
      number.type = "number";
      number.min = "0";
      number.max = "1";
      number.step = "0.001";
      number.addEventListener("change", () =>
        this.applyEdit(i, Number(number.value))
      );

      const lock = document.createElement("input");
      lock.type = "checkbox";
      lock.title = "lock this component";
      lock.addEventListener("change", () => {
        this.locked[i] = lock.checked;
      });

      const error = document.createElement("span");
      error.className = "slider-error";

      row.append(label, slider, number, lock, error);
      this.host.appendChild(row);
      this.rows.push({ slider, number, lock, error });
    }
    this.sync();
  }

  private sync(): void {
    this.rows.forEach((row, i) => {
      row.slider.value = this.values[i].toFixed(3);
      row.number.value = this.values[i].toFixed(3);
      row.lock.checked = this.locked[i];
    });
  }
}
