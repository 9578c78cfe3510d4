import { ApiClient } from './api.js';
import { Controller } from './controller.js';
import { renderGrid } from './grid.js';
import { ProgressPoller } from './progress.js';
import { renderResults, SearchFlow } from './search.js';
import { AppState } from './state.js';
import { Viewer } from './viewer.js';
import type { SortMode } from './types.js';

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

const client = new ApiClient('');
const state = new AppState();
const controller = new Controller(client, state);
const flow = new SearchFlow(client, state);
const poller = new ProgressPoller(client, state);
const viewer = new Viewer((id) => client.imageUrl(id));

const gridEl = byId<HTMLDivElement>('grid');
const resultsEl = byId<HTMLDivElement>('results');
const statusEl = byId<HTMLSpanElement>('status');
const selectionEl = byId<HTMLSpanElement>('selection-count');
const columnsEl = byId<HTMLInputElement>('columns');
const columnsLabel = byId<HTMLSpanElement>('columns-label');
const modeEl = byId<HTMLSelectElement>('mode');
const rootsEl = byId<HTMLInputElement>('roots');
const recursiveEl = byId<HTMLInputElement>('recursive');

const gridHandlers = {
  thumbUrl: (id: string, edge: number) => client.thumbUrl(id, edge),
  onToggleSelect: (id: string) => state.toggleSelect(id),
  onOpen: (id: string) => viewer.open(id, state.gridOrder()),
};

const resultHandlers = {
  thumbUrl: (id: string, edge: number) => client.thumbUrl(id, edge),
  onAdd: (id: string) => void runSearch(() => flow.addAndRerun(id)),
  onOpen: (id: string) => viewer.open(id, state.gridOrder()),
};

function render(): void {
  renderGrid(gridEl, state, gridHandlers);
  renderResults(resultsEl, state, resultHandlers);
  selectionEl.textContent = String(state.selection.length);
  const progress = state.progress;
  if (progress && progress.index.state === 'running') {
    statusEl.textContent = `indexing ${progress.index.done}/${progress.index.total}`;
  } else if (progress && progress.sort.state === 'running') {
    statusEl.textContent = 'sorting…';
  } else {
    statusEl.textContent = `${state.grid.k} images`;
  }
}

state.subscribe(render);

async function runSearch(action: () => Promise<void>): Promise<void> {
  try {
    await action();
  } catch (err) {
    statusEl.textContent = err instanceof Error ? err.message : String(err);
  }
}

byId<HTMLButtonElement>('load').addEventListener('click', () => {
  const roots = rootsEl.value
    .split(';')
    .map((part) => part.trim())
    .filter(Boolean);
  if (!roots.length) return;
  void runSearch(async () => {
    await controller.loadRoots(roots, recursiveEl.checked);
    poller.start();
  });
});

columnsEl.addEventListener('change', () => {
  columnsLabel.textContent = columnsEl.value;
  // server owns the layout: a column change is a new /grid request
  void runSearch(() => controller.refreshGrid(Number(columnsEl.value)).then(() => undefined));
});

modeEl.addEventListener('change', () => {
  void runSearch(() =>
    controller.refreshGrid(undefined, modeEl.value as SortMode).then(() => undefined),
  );
});

byId<HTMLButtonElement>('search').addEventListener('click', () => {
  void runSearch(() => flow.run());
});

byId<HTMLButtonElement>('widen').addEventListener('click', () => {
  void runSearch(async () => {
    await controller.widenScopeToParents();
    poller.start();
    if (state.selection.length) await flow.run();
  });
});

byId<HTMLButtonElement>('clear').addEventListener('click', () => {
  state.clearSelection();
});

byId<HTMLButtonElement>('slideshow').addEventListener('click', () => {
  const order = state.gridOrder();
  if (!order.length) return;
  const first = order[0];
  if (first === undefined) return;
  viewer.open(first, order);
  let step = 0;
  const timer = setInterval(() => {
    step += 1;
    if (step >= order.length || !viewer.isOpen() || !viewer.next()) {
      clearInterval(timer);
    }
  }, 1500);
});

render();
