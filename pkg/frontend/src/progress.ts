import type { ApiClient } from './api.js';
import type { AppState } from './state.js';

/** Polls /progress every 500 ms while a job runs, then goes quiet. */
export class ProgressPoller {
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly client: ApiClient,
    private readonly state: AppState,
    readonly intervalMs = 500,
  ) {}

  start(): void {
    if (this.timer !== null) return;
    this.timer = setInterval(() => void this.tick(), this.intervalMs);
    void this.tick();
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  running(): boolean {
    return this.timer !== null;
  }

  private async tick(): Promise<void> {
    let progress;
    try {
      progress = await this.client.progress();
    } catch {
      return; // transient failure; next tick retries
    }
    this.state.applyProgress(progress);
    if (progress.index.state !== 'running' && progress.sort.state !== 'running') {
      this.stop();
    }
  }
}
