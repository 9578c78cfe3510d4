import type {
  FilterBody,
  GridResponse,
  ProgressResponse,
  RootsResponse,
  SearchResponse,
  SortMode,
} from './types.js';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, init);
  if (!response.ok) {
    let code = 'error';
    let message = `request failed with status ${response.status}`;
    try {
      const body = (await response.json()) as { code?: string; message?: string };
      code = body.code ?? code;
      message = body.message ?? message;
    } catch {
      // non-JSON error body; keep defaults
    }
    throw new ApiError(response.status, code, message);
  }
  return (await response.json()) as T;
}

const JSON_HEADERS = { 'Content-Type': 'application/json' };

export class ApiClient {
  constructor(readonly baseUrl: string = '') {}

  setRoots(roots: string[], recursive = false, filter: FilterBody = {}): Promise<RootsResponse> {
    return request(`${this.baseUrl}/session/roots`, {
      method: 'POST',
      headers: JSON_HEADERS,
      body: JSON.stringify({ roots, recursive, filter }),
    });
  }

  grid(cols?: number, mode?: SortMode): Promise<GridResponse> {
    const params = new URLSearchParams();
    if (cols !== undefined) params.set('cols', String(cols));
    if (mode !== undefined) params.set('mode', mode);
    const query = params.toString();
    return request(`${this.baseUrl}/grid${query ? `?${query}` : ''}`);
  }

  search(queryIds: string[], scopeIds?: string[]): Promise<SearchResponse> {
    return request(`${this.baseUrl}/search`, {
      method: 'POST',
      headers: JSON_HEADERS,
      body: JSON.stringify({ query_ids: queryIds, scope_ids: scopeIds ?? null }),
    });
  }

  progress(): Promise<ProgressResponse> {
    return request(`${this.baseUrl}/progress`);
  }

  thumbUrl(id: string, edge: number): string {
    return `${this.baseUrl}/thumb/${id}?edge=${edge}`;
  }

  imageUrl(id: string): string {
    return `${this.baseUrl}/image/${id}`;
  }
}
