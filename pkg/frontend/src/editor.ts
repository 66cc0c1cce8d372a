/**
 * The 12x12 tile grid, in two flavours: an interactive editor whose
 * cells cycle wall -> floor -> treasure -> enemy -> entrance -> exit ->
 * wall on click, and a read-only view for kept and final levels.  Edits
 * stay local to one editor instance; nothing is sent anywhere until the
 * surrounding screen submits.
 */

import {
  GRID_SIZE,
  glyphAt,
  nextGlyph,
  TILE_NAME,
  withGlyph,
  type MapRows,
  type TileGlyph,
} from "./tiles.js";

export interface Editor {
  element: HTMLElement;
  getRows(): MapRows;
  setRows(rows: MapRows): void;
  setDisabled(disabled: boolean): void;
}

function paintCell(cell: HTMLElement, glyph: TileGlyph): void {
  cell.dataset["tile"] = glyph;
  cell.className = `tile tile-${TILE_NAME[glyph]}`;
  cell.textContent = glyph;
  cell.title = TILE_NAME[glyph];
}

export function createEditor(
  doc: Document,
  initial: MapRows,
  onChange?: (rows: MapRows) => void,
): Editor {
  let rows = initial.slice();
  let disabled = false;
  const element = doc.createElement("div");
  element.className = "tile-grid";
  const cells: HTMLButtonElement[] = [];
  for (let r = 0; r < GRID_SIZE; r++) {
    for (let c = 0; c < GRID_SIZE; c++) {
      const cell = doc.createElement("button");
      cell.type = "button";
      cell.dataset["r"] = String(r);
      cell.dataset["c"] = String(c);
      paintCell(cell, glyphAt(rows, r, c));
      cell.addEventListener("click", () => {
        if (disabled) return;
        const glyph = nextGlyph(glyphAt(rows, r, c));
        rows = withGlyph(rows, r, c, glyph);
        paintCell(cell, glyph);
        onChange?.(rows.slice());
      });
      cells.push(cell);
      element.appendChild(cell);
    }
  }
  return {
    element,
    getRows: () => rows.slice(),
    setRows(next: MapRows): void {
      rows = next.slice();
      for (let r = 0; r < GRID_SIZE; r++)
        for (let c = 0; c < GRID_SIZE; c++) {
          const cell = cells[r * GRID_SIZE + c];
          if (cell) paintCell(cell, glyphAt(rows, r, c));
        }
    },
    setDisabled(next: boolean): void {
      disabled = next;
      for (const cell of cells) cell.disabled = next;
    },
  };
}

/** Static rendering for the kept strip and the completion screen. */
export function createMapView(doc: Document, rows: MapRows): HTMLElement {
  const element = doc.createElement("div");
  element.className = "tile-grid tile-grid-static";
  for (let r = 0; r < GRID_SIZE; r++)
    for (let c = 0; c < GRID_SIZE; c++) {
      const cell = doc.createElement("span");
      paintCell(cell, glyphAt(rows, r, c));
      element.appendChild(cell);
    }
  return element;
}
