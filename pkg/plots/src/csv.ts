import { readFileSync } from "node:fs";

export interface Table {
  header: string[];
  /** raw cell text, row-major */
  cells: string[][];
}

export function readCsv(path: string): Table {
  const text = readFileSync(path, "utf8");
  const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0);
  if (lines.length < 2) {
    throw new Error(`${path}: expected a header row and at least one data row`);
  }
  const header = lines[0].split(",").map((s) => s.trim());
  const cells = lines.slice(1).map((l) => l.split(",").map((s) => s.trim()));
  for (const [i, row] of cells.entries()) {
    if (row.length !== header.length) {
      throw new Error(`${path}: row ${i + 2} has ${row.length} cells, header has ${header.length}`);
    }
  }
  return { header, cells };
}

export function column(table: Table, name: string): number[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new Error(`missing column '${name}' (have: ${table.header.join(", ")})`);
  }
  return table.cells.map((row) => {
    const v = Number(row[idx]);
    if (Number.isNaN(v)) {
      throw new Error(`column '${name}' holds non-numeric value '${row[idx]}'`);
    }
    return v;
  });
}

export function textColumn(table: Table, name: string): string[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new Error(`missing column '${name}' (have: ${table.header.join(", ")})`);
  }
  return table.cells.map((row) => row[idx]);
}

export function hasColumn(table: Table, name: string): boolean {
  return table.header.includes(name);
}
