import type { GridResponse, ProgressResponse, SearchResponse, SortMode } from './types.js';

export type Listener = () => void;

const EMPTY_GRID: GridResponse = { n: 0, m: 0, k: 0, mode: 'name', revision: 0, cells: [] };

/**
 * Single source of truth for the page. The grid cells always mirror the last
 * accepted /grid response unmodified; the selection is an ordered id list
 * that survives mode and folder changes (unresolved ids included).
 */
export class AppState {
  grid: GridResponse = EMPTY_GRID;
  selection: string[] = [];
  results: SearchResponse | null = null;
  progress: ProgressResponse | null = null;
  roots: string[] = [];
  columns = 8;
  mode: SortMode = 'visual';

  private listeners: Listener[] = [];

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  /** Accepts a grid response unless it belongs to a superseded revision. */
  applyGrid(response: GridResponse): boolean {
    if (response.revision < this.grid.revision) return false;
    this.grid = response;
    this.notify();
    return true;
  }

  applyResults(response: SearchResponse): void {
    this.results = response;
    this.notify();
  }

  applyProgress(progress: ProgressResponse): void {
    this.progress = progress;
    this.notify();
  }

  toggleSelect(id: string): void {
    const at = this.selection.indexOf(id);
    if (at >= 0) {
      this.selection.splice(at, 1);
    } else {
      this.selection.push(id);
    }
    this.notify();
  }

  addToSelection(id: string): void {
    if (!this.selection.includes(id)) {
      this.selection.push(id);
      this.notify();
    }
  }

  clearSelection(): void {
    if (this.selection.length) {
      this.selection = [];
      this.notify();
    }
  }

  /** Occupied cells in server order; the viewer traverses exactly this. */
  gridOrder(): string[] {
    return this.grid.cells.filter((cell): cell is string => cell !== null);
  }
}
