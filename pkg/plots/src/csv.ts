/** Tiny CSV reader for the fixed schemas the simulator emits. */

export interface Table {
  header: string[];
  rows: number[][];
}

export class CsvError extends Error {}

/** Parse numeric CSV text; "inf" literals become Infinity. */
export function parseCsv(text: string): Table {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new CsvError("empty CSV");
  }
  const header = lines[0].split(",").map((h) => h.trim());
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new CsvError(`row ${i + 1} has ${cells.length} cells, expected ${header.length}`);
    }
    return cells.map((c) => {
      const t = c.trim();
      if (t === "inf") return Infinity;
      if (t === "-inf") return -Infinity;
      if (t === "") return NaN;
      const v = Number(t);
      if (Number.isNaN(v)) throw new CsvError(`non-numeric cell ${JSON.stringify(t)} in row ${i + 1}`);
      return v;
    });
  });
  if (rows.length === 0) {
    throw new CsvError("CSV has a header but no data rows");
  }
  return { header, rows };
}

/** Column by name; throws CsvError when the header lacks it. */
export function column(table: Table, name: string): number[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new CsvError(`missing column ${JSON.stringify(name)} (have: ${table.header.join(", ")})`);
  }
  return table.rows.map((r) => r[idx]);
}
