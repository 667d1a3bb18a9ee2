/** Line-level LCS diff for the side-by-side view panes. */

export type RowKind = "same" | "add" | "del" | "change";

export interface DiffRow {
  kind: RowKind;
  left: string | null; // null = filler on that side
  right: string | null;
  leftNo: number | null; // 1-indexed line numbers
  rightNo: number | null;
}

function lcsTable(a: string[], b: string[]): number[][] {
  const table: number[][] = Array.from({ length: a.length + 1 }, () =>
    new Array<number>(b.length + 1).fill(0),
  );
  for (let i = a.length - 1; i >= 0; i--) {
    for (let j = b.length - 1; j >= 0; j--) {
      table[i][j] =
        a[i] === b[j]
          ? table[i + 1][j + 1] + 1
          : Math.max(table[i + 1][j], table[i][j + 1]);
    }
  }
  return table;
}

/**
 * Align two texts line by line. Identical inputs produce only "same" rows;
 * paired del/add runs collapse into "change" rows so renames read across.
 */
export function diffLines(leftText: string, rightText: string): DiffRow[] {
  const a = leftText.split("\n");
  const b = rightText.split("\n");
  const table = lcsTable(a, b);
  const rows: DiffRow[] = [];
  let i = 0;
  let j = 0;
  let pendingDel: Array<{ line: string; no: number }> = [];
  let pendingAdd: Array<{ line: string; no: number }> = [];

  const flush = () => {
    const n = Math.max(pendingDel.length, pendingAdd.length);
    for (let k = 0; k < n; k++) {
      const del = pendingDel[k];
      const add = pendingAdd[k];
      rows.push({
        kind: del && add ? "change" : del ? "del" : "add",
        left: del ? del.line : null,
        right: add ? add.line : null,
        leftNo: del ? del.no : null,
        rightNo: add ? add.no : null,
      });
    }
    pendingDel = [];
    pendingAdd = [];
  };

  while (i < a.length && j < b.length) {
    if (a[i] === b[j]) {
      flush();
      rows.push({ kind: "same", left: a[i], right: b[j], leftNo: i + 1, rightNo: j + 1 });
      i++;
      j++;
    } else if (table[i + 1][j] >= table[i][j + 1]) {
      pendingDel.push({ line: a[i], no: i + 1 });
      i++;
    } else {
      pendingAdd.push({ line: b[j], no: j + 1 });
      j++;
    }
  }
  while (i < a.length) pendingDel.push({ line: a[i], no: ++i });
  while (j < b.length) pendingAdd.push({ line: b[j], no: ++j });
  flush();
  return rows;
}

export function changedRowCount(rows: DiffRow[]): number {
  return rows.filter((r) => r.kind !== "same").length;
}
