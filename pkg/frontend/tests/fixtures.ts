import { vi } from 'vitest';
import type { GridResponse, SearchResponse } from '../src/types.js';

/** The 28-images-on-5x6 fixture grid: 28 ids then 2 tail blanks. */
export function fig3Grid(revision = 1): GridResponse {
  const cells: (string | null)[] = [];
  for (let i = 0; i < 28; i++) cells.push(`id${String(i).padStart(3, '0')}`);
  cells.push(null, null);
  return { n: 5, m: 6, k: 28, mode: 'visual', revision, cells };
}

export function gridOf(ids: (string | null)[], n: number, revision = 1): GridResponse {
  const k = ids.filter((c) => c !== null).length;
  return { n, m: Math.ceil(ids.length / n), k, mode: 'visual', revision, cells: ids };
}

interface RouteLog {
  url: string;
  method: string;
  body: unknown;
}

/**
 * Installs a fetch stub that answers the engine endpoints from fixtures and
 * records every request. Returns the request log.
 */
export function mockEngine(options: {
  grid?: GridResponse | ((cols: number | null, mode: string | null) => GridResponse);
  search?: SearchResponse | ((body: { query_ids: string[] }) => SearchResponse);
  progress?: () => unknown;
}): RouteLog[] {
  const log: RouteLog[] = [];

  const stub = vi.fn(async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    const method = init?.method ?? 'GET';
    const body = init?.body ? JSON.parse(String(init.body)) : null;
    log.push({ url, method, body });

    const respond = (data: unknown) => ({
      ok: true,
      status: 200,
      statusText: 'OK',
      json: async () => data,
    });

    if (url.includes('/session/roots')) {
      return respond({ revision: 1, count: 28, roots: [] });
    }
    if (url.includes('/grid')) {
      const parsed = new URL(url, 'http://local');
      const cols = parsed.searchParams.get('cols');
      const grid =
        typeof options.grid === 'function'
          ? options.grid(cols ? Number(cols) : null, parsed.searchParams.get('mode'))
          : (options.grid ?? fig3Grid());
      return respond(grid);
    }
    if (url.includes('/search')) {
      const search =
        typeof options.search === 'function'
          ? options.search(body as { query_ids: string[] })
          : (options.search ?? { results: [], unresolved: [] });
      return respond(search);
    }
    if (url.includes('/progress')) {
      return respond(
        options.progress?.() ?? {
          revision: 1,
          index: { kind: 'index', state: 'done', done: 0, total: 0, fraction: 1, error: null },
          sort: { kind: 'sort', state: 'done', done: 0, total: 0, fraction: 1, error: null },
        },
      );
    }
    return { ok: false, status: 404, statusText: 'not found', json: async () => ({}) };
  });

  globalThis.fetch = stub as unknown as typeof fetch;
  return log;
}
