import type { ApiClient } from './api.js';
import type { AppState } from './state.js';
import type { RootsResponse, SortMode } from './types.js';

function parentPath(path: string): string {
  const trimmed = path.replace(/\/+$/, '');
  const at = trimmed.lastIndexOf('/');
  if (at <= 0) return '/';
  return trimmed.slice(0, at);
}

/**
 * UI actions in terms of API calls. Layout authority stays on the server:
 * a column or mode change always issues a new /grid request, nothing is
 * reordered client-side.
 */
export class Controller {
  constructor(
    readonly client: ApiClient,
    readonly state: AppState,
  ) {}

  async loadRoots(roots: string[], recursive = false): Promise<RootsResponse> {
    const summary = await this.client.setRoots(roots, recursive);
    this.state.roots = [...roots];
    await this.refreshGrid();
    return summary;
  }

  async refreshGrid(cols?: number, mode?: SortMode): Promise<boolean> {
    if (cols !== undefined) this.state.columns = cols;
    if (mode !== undefined) this.state.mode = mode;
    const response = await this.client.grid(this.state.columns, this.state.mode);
    return this.state.applyGrid(response);
  }

  /**
   * Re-root the session at the parents of the current roots (recursive), so
   * search results may come from anywhere under them. The selection is kept;
   * ids that fall out of scope surface as unresolved on the next search.
   */
  async widenScopeToParents(): Promise<RootsResponse> {
    const parents = [...new Set(this.state.roots.map(parentPath))];
    const summary = await this.client.setRoots(parents, true);
    this.state.roots = parents;
    await this.refreshGrid();
    return summary;
  }
}
