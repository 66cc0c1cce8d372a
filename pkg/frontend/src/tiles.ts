/**
 * Tile alphabet shared with the service's map text format: a map is 12
 * rows of 12 glyphs.  Clicking a cell in the editor advances its glyph
 * one step through TILE_CYCLE, wrapping at the end.
 */

export const GRID_SIZE = 12;

export const TILE_CYCLE = ["#", ".", "T", "E", "S", "X"] as const;

export type TileGlyph = (typeof TILE_CYCLE)[number];

export const TILE_NAME: Record<TileGlyph, string> = {
  "#": "wall",
  ".": "floor",
  T: "treasure",
  E: "enemy",
  S: "entrance",
  X: "exit",
};

export function isTileGlyph(ch: string): ch is TileGlyph {
  return (TILE_CYCLE as readonly string[]).includes(ch);
}

export function nextGlyph(glyph: TileGlyph): TileGlyph {
  const at = TILE_CYCLE.indexOf(glyph);
  return TILE_CYCLE[(at + 1) % TILE_CYCLE.length] as TileGlyph;
}

/** A map as the API carries it: 12 strings of 12 glyphs. */
export type MapRows = string[];

export function blankRows(): MapRows {
  return Array.from({ length: GRID_SIZE }, () => "#".repeat(GRID_SIZE));
}

export function cloneRows(rows: MapRows): MapRows {
  return rows.slice();
}

export function glyphAt(rows: MapRows, r: number, c: number): TileGlyph {
  const row = rows[r];
  if (row === undefined) throw new Error(`row ${r} out of range`);
  const ch = row[c];
  if (ch === undefined || !isTileGlyph(ch)) throw new Error(`bad glyph at ${r},${c}`);
  return ch;
}

export function withGlyph(rows: MapRows, r: number, c: number, glyph: TileGlyph): MapRows {
  const next = rows.slice();
  const row = next[r];
  if (row === undefined) throw new Error(`row ${r} out of range`);
  next[r] = row.slice(0, c) + glyph + row.slice(c + 1);
  return next;
}

/** Number of cells whose glyphs differ; the badge each card shows. */
export function editCount(a: MapRows, b: MapRows): number {
  let count = 0;
  for (let r = 0; r < GRID_SIZE; r++) {
    const ra = a[r] ?? "";
    const rb = b[r] ?? "";
    for (let c = 0; c < GRID_SIZE; c++) if (ra[c] !== rb[c]) count++;
  }
  return count;
}

/**
 * Local structural check mirroring what the service enforces on liked,
 * kept and blank designs: exactly one entrance, exactly one exit, and a
 * 4-connected path between them over non-wall cells.  Used only to
 * point at the offending card when the service rejects a round; the
 * service remains the authority.
 */
export function localProblem(rows: MapRows): string | null {
  let entrance: [number, number] | null = null;
  let exits = 0;
  let entrances = 0;
  for (let r = 0; r < GRID_SIZE; r++) {
    for (let c = 0; c < GRID_SIZE; c++) {
      const g = glyphAt(rows, r, c);
      if (g === "S") {
        entrances++;
        entrance = [r, c];
      } else if (g === "X") {
        exits++;
      }
    }
  }
  if (entrances !== 1) return `needs exactly one entrance (has ${entrances})`;
  if (exits !== 1) return `needs exactly one exit (has ${exits})`;
  const seen = new Set<number>();
  const queue: [number, number][] = [entrance as [number, number]];
  seen.add(entrance![0] * GRID_SIZE + entrance![1]);
  while (queue.length > 0) {
    const [r, c] = queue.pop() as [number, number];
    if (glyphAt(rows, r, c) === "X") return null;
    for (const [dr, dc] of [[1, 0], [-1, 0], [0, 1], [0, -1]] as const) {
      const nr = r + dr;
      const nc = c + dc;
      if (nr < 0 || nr >= GRID_SIZE || nc < 0 || nc >= GRID_SIZE) continue;
      const key = nr * GRID_SIZE + nc;
      if (seen.has(key) || glyphAt(rows, nr, nc) === "#") continue;
      seen.add(key);
      queue.push([nr, nc]);
    }
  }
  return "no passable path from entrance to exit";
}
