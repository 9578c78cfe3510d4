import type { AppState } from './state.js';

export interface GridHandlers {
  thumbUrl(id: string, edge: number): string;
  onToggleSelect(id: string): void;
  onOpen(id: string): void;
}

/**
 * Lay the grid response out row-major with exactly N columns. Cell order is
 * the server's cells array verbatim; tail blanks render as empty tiles. A
 * thumbnail that fails to load becomes a placeholder tile but keeps its id
 * and stays selectable.
 */
export function renderGrid(
  container: HTMLElement,
  state: AppState,
  handlers: GridHandlers,
  cellEdge = 160,
): HTMLElement[] {
  const { grid, selection } = state;
  container.textContent = '';
  container.classList.add('grid');
  container.style.gridTemplateColumns = `repeat(${Math.max(grid.n, 1)}, 1fr)`;

  const tiles: HTMLElement[] = [];
  for (const cell of grid.cells) {
    const tile = document.createElement('div');
    tile.className = 'tile';
    if (cell === null) {
      tile.classList.add('blank');
    } else {
      tile.dataset.id = cell;
      if (selection.includes(cell)) tile.classList.add('selected');
      const img = document.createElement('img');
      img.loading = 'lazy';
      img.alt = '';
      img.src = handlers.thumbUrl(cell, cellEdge);
      img.addEventListener('error', () => tile.classList.add('broken'));
      tile.appendChild(img);
      tile.addEventListener('click', () => handlers.onToggleSelect(cell));
      tile.addEventListener('dblclick', () => handlers.onOpen(cell));
    }
    container.appendChild(tile);
    tiles.push(tile);
  }
  return tiles;
}

/** Tile ids in DOM order (null for blanks); used to verify round-trips. */
export function renderedOrder(container: HTMLElement): (string | null)[] {
  return Array.from(container.children).map((el) => (el as HTMLElement).dataset.id ?? null);
}
