// Parser for the service's plot CSVs. Those files never quote cells (every
// value is a repr'd float or a bare axis name), so a plain comma split is
// exact.

export interface CsvTable {
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string): CsvTable {
  const lines = text.split('\n').filter((l) => l.length > 0);
  if (lines.length === 0) throw new Error('empty CSV');
  const header = lines[0].split(',');
  const rows = lines.slice(1).map((l) => l.split(','));
  for (const r of rows) {
    if (r.length !== header.length) {
      throw new Error(`CSV row has ${r.length} cells, header has ${header.length}`);
    }
  }
  return { header, rows };
}

export function column(table: CsvTable, name: string): string[] {
  const j = table.header.indexOf(name);
  if (j < 0) throw new Error(`no CSV column ${name}; have ${table.header.join(',')}`);
  return table.rows.map((r) => r[j]);
}

export function numericColumn(table: CsvTable, name: string): number[] {
  return column(table, name).map(Number);
}
