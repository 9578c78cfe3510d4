import type { ApiClient } from './api.js';
import type { AppState } from './state.js';

export interface ResultHandlers {
  thumbUrl(id: string, edge: number): string;
  onAdd(id: string): void;
  onOpen(id: string): void;
}

/**
 * Iterative similarity search: the posted query always carries the full
 * accumulated selection, so picking a good result and re-searching narrows
 * in instead of starting over.
 */
export class SearchFlow {
  constructor(
    private readonly client: ApiClient,
    private readonly state: AppState,
  ) {}

  async run(scopeIds?: string[]): Promise<void> {
    if (this.state.selection.length === 0) {
      throw new Error('select at least one query image first');
    }
    const response = await this.client.search([...this.state.selection], scopeIds);
    this.state.applyResults(response);
  }

  async addAndRerun(id: string, scopeIds?: string[]): Promise<void> {
    this.state.addToSelection(id);
    await this.run(scopeIds);
  }
}

export function renderResults(
  container: HTMLElement,
  state: AppState,
  handlers: ResultHandlers,
  cellEdge = 120,
): void {
  container.textContent = '';
  const results = state.results;
  if (!results) return;

  // unresolved query ids are badged, never silently dropped
  for (const id of results.unresolved) {
    const badge = document.createElement('span');
    badge.className = 'badge unresolved';
    badge.dataset.id = id;
    badge.textContent = `unresolved: ${id.slice(0, 8)}…`;
    container.appendChild(badge);
  }

  for (const result of results.results) {
    const tile = document.createElement('div');
    tile.className = 'result';
    tile.dataset.id = result.id;

    const img = document.createElement('img');
    img.loading = 'lazy';
    img.alt = '';
    img.src = handlers.thumbUrl(result.id, cellEdge);
    img.addEventListener('dblclick', () => handlers.onOpen(result.id));
    tile.appendChild(img);

    const caption = document.createElement('span');
    caption.className = 'distance';
    caption.textContent = result.distance.toFixed(4);
    tile.appendChild(caption);

    const add = document.createElement('button');
    add.className = 'add-query';
    add.textContent = '+';
    add.title = 'add to query and search again';
    add.addEventListener('click', () => handlers.onAdd(result.id));
    tile.appendChild(add);

    container.appendChild(tile);
  }
}
