/** Session history: past queries, restorable into the sliders. */

import { QueryResponse } from "./api.js";

export interface HistoryEntry {
  w: number[];
  response: QueryResponse;
  f?: number[];
}

export class HistoryPanel {
  private entries: HistoryEntry[] = [];

  constructor(
    private host: HTMLElement,
    private onRestore: (entry: HistoryEntry) => void
  ) {}

  get length(): number {
    return this.entries.length;
  }

  add(entry: HistoryEntry): void {
    this.entries.push(entry);
    this.render();
  }

  attachEvaluation(index: number, f: number[]): void {
    if (this.entries[index]) {
      this.entries[index].f = f;
      this.render();
    }
  }

  private render(): void {
    this.host.textContent = "";
    const list = document.createElement("ol");
    list.className = "history-list";
    this.entries.forEach((entry, index) => {
      const item = document.createElement("li");
      const button = document.createElement("button");
      button.type = "button";
      button.textContent = `w = [${entry.w.map((v) => v.toFixed(3)).join(", ")}]`;
      button.addEventListener("click", () => this.onRestore(entry));
      item.appendChild(button);
      if (entry.f) {
        const note = document.createElement("span");
        note.className = "history-eval";
        note.textContent = ` f = [${entry.f.map((v) => v.toFixed(3)).join(", ")}]`;
        item.appendChild(note);
      }
      list.appendChild(item);
    });
    this.host.appendChild(list);
  }
}
