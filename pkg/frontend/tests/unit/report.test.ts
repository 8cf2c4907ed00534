import { describe, expect, it } from "vitest";
import { ALPHABET, renderReport } from "../../src/report.js";
import type { SessionReport } from "../../src/api.js";

function makeReport(): SessionReport {
  const matrix = Array.from({ length: 26 }, () => Array(26).fill(0));
  for (let i = 0; i < 26; i++) matrix[i][i] = 2;
  matrix[0][0] = 1; // one 'a' misread ...
  matrix[0][3] = 1; // ... as 'd'
  matrix[21][12] = 3; // plus a strong v -> m confusion
  return { matrix, accuracy: 94.23, records: new Array(52).fill(null) as never };
}

describe("renderReport", () => {
  it("renders the accuracy line and a labeled 26x26 heatmap", () => {
    const box = document.createElement("div");
    document.body.appendChild(box);
    renderReport(box, makeReport());

    expect(box.querySelector(".report-accuracy")!.textContent).toBe(
      "accuracy 94.23% over 52 trials",
    );

    const rows = box.querySelectorAll("table.confusion tr");
    expect(rows).toHaveLength(27); // header + 26 letter rows
    const headerCells = rows[0].querySelectorAll("th");
    expect(headerCells).toHaveLength(27);
    expect([...headerCells].slice(1).map((c) => c.textContent).join("")).toBe(ALPHABET);

    const rowA = rows[1].querySelectorAll("td");
    expect(rowA[0].textContent).toBe("1");
    expect(rowA[3].textContent).toBe("1");
    expect(rowA[3].title).toBe("wrote 'a', read 'd': 1");
    expect(rowA[1].textContent).toBe(""); // zero cells stay blank

    // every cell with ink has a background, empties are transparent
    expect(rowA[0].style.backgroundColor).not.toBe("transparent");
    expect(rowA[1].style.backgroundColor).toBe("transparent");
  });

  it("lists the worst confusions, biggest first", () => {
    const box = document.createElement("div");
    renderReport(box, makeReport());
    const items = [...box.querySelectorAll("ul.confused-pairs li")].map((li) => li.textContent);
    expect(items[0]).toBe("'v' read as 'm': 3x");
    expect(items).toContain("'a' read as 'd': 1x");
  });

  it("replaces earlier content on re-render", () => {
    const box = document.createElement("div");
    renderReport(box, makeReport());
    renderReport(box, makeReport());
    expect(box.querySelectorAll("table.confusion")).toHaveLength(1);
  });
});
