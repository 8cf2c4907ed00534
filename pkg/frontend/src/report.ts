/** Session report rendering: accuracy headline plus a 26x26 confusion
 * heatmap (rows = letter written, columns = letter answered).  Cell shading
 * scales with the off-diagonal maximum so sparse confusions stay visible
 * next to a strong diagonal.
 */

import type { SessionReport } from "./api.js";

export const ALPHABET = "abcdefghijklmnopqrstuvwxyz";

function cellColor(count: number, maxCount: number, diagonal: boolean): string {
  if (count === 0) return "transparent";
  const f = Math.min(1, count / Math.max(maxCount, 1));
  return diagonal
    ? `rgba(46, 125, 50, ${0.15 + 0.6 * f})`
    : `rgba(198, 40, 40, ${0.2 + 0.6 * f})`;
}

export function renderReport(container: HTMLElement, report: SessionReport): void {
  container.textContent = "";
  const doc = container.ownerDocument;

  const headline = doc.createElement("p");
  headline.className = "report-accuracy";
  headline.textContent = `accuracy ${report.accuracy.toFixed(2)}% over ${report.records.length} trials`;
  container.appendChild(headline);

  let offDiagMax = 0;
  let diagMax = 0;
  for (let i = 0; i < 26; i++) {
    for (let j = 0; j < 26; j++) {
      const c = report.matrix[i][j];
      if (i === j) diagMax = Math.max(diagMax, c);
      else offDiagMax = Math.max(offDiagMax, c);
    }
  }

  const table = doc.createElement("table");
  table.className = "confusion";
  const head = doc.createElement("tr");
  head.appendChild(doc.createElement("th"));
  for (const letter of ALPHABET) {
    const th = doc.createElement("th");
    th.textContent = letter;
    head.appendChild(th);
  }
  table.appendChild(head);

  for (let i = 0; i < 26; i++) {
    const tr = doc.createElement("tr");
    const rowLabel = doc.createElement("th");
    rowLabel.textContent = ALPHABET[i];
    tr.appendChild(rowLabel);
    for (let j = 0; j < 26; j++) {
      const td = doc.createElement("td");
      const count = report.matrix[i][j];
      td.style.backgroundColor = cellColor(count, i === j ? diagMax : offDiagMax, i === j);
      if (count > 0) {
        td.textContent = String(count);
        td.title = `wrote '${ALPHABET[i]}', read '${ALPHABET[j]}': ${count}`;
      }
      tr.appendChild(td);
    }
    table.appendChild(tr);
  }
  container.appendChild(table);

  const worst: Array<[number, string]> = [];
  for (let i = 0; i < 26; i++) {
    for (let j = 0; j < 26; j++) {
      if (i !== j && report.matrix[i][j] > 0) {
        worst.push([report.matrix[i][j], `'${ALPHABET[i]}' read as '${ALPHABET[j]}'`]);
      }
    }
  }
  if (worst.length) {
    worst.sort((a, b) => b[0] - a[0]);
    const list = doc.createElement("ul");
    list.className = "confused-pairs";
    for (const [count, label] of worst.slice(0, 5)) {
      const li = doc.createElement("li");
      li.textContent = `${label}: ${count}x`;
      list.appendChild(li);
    }
    container.appendChild(list);
  }
}
