// Wire types for the local engine API.

export type SortMode = 'visual' | 'name' | 'mtime' | 'ctime' | 'size';

export interface GridResponse {
  n: number;
  m: number;
  k: number;
  mode: string;
  revision: number;
  cells: (string | null)[];
}

export interface SearchResult {
  id: string;
  distance: number;
}

export interface SearchResponse {
  results: SearchResult[];
  unresolved: string[];
}

export interface JobProgress {
  kind: string;
  state: 'idle' | 'running' | 'done' | 'error';
  done: number;
  total: number;
  fraction: number;
  error: string | null;
}

export interface ProgressResponse {
  revision: number;
  index: JobProgress;
  sort: JobProgress;
}

export interface RootSummary {
  path: string;
  count: number;
  error: string | null;
}

export interface RootsResponse {
  revision: number;
  count: number;
  roots: RootSummary[];
}

export interface FilterBody {
  name_substring?: string | null;
  mtime_range?: [number, number] | null;
  ctime_range?: [number, number] | null;
  size_range?: [number, number] | null;
}
