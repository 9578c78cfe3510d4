/**
 * Single-image overlay: arrow keys walk the current grid order (stopping at
 * the ends by default), Escape returns to the grid, and the slideshow visits
 * every image exactly once. A failed load shows a toast and keeps the viewer
 * open on the current image.
 */
export class Viewer {
  readonly root: HTMLElement;
  private readonly img: HTMLImageElement;
  private readonly toast: HTMLElement;
  private order: string[] = [];
  private index = -1;
  wrap = false;

  constructor(
    private readonly imageUrl: (id: string) => string,
    parent: HTMLElement = document.body,
  ) {
    this.root = document.createElement('div');
    this.root.className = 'viewer hidden';

    this.img = document.createElement('img');
    this.img.className = 'viewer-image';
    this.img.addEventListener('error', () => {
      if (this.isOpen()) this.showToast('failed to load image');
    });
    this.root.appendChild(this.img);

    this.toast = document.createElement('div');
    this.toast.className = 'toast hidden';
    this.root.appendChild(this.toast);

    parent.appendChild(this.root);
    document.addEventListener('keydown', (event) => this.onKey(event));
  }

  isOpen(): boolean {
    return !this.root.classList.contains('hidden');
  }

  current(): string | null {
    return this.index >= 0 ? (this.order[this.index] ?? null) : null;
  }

  open(id: string, order: string[]): void {
    const at = order.indexOf(id);
    if (at < 0) return;
    this.order = [...order];
    this.index = at;
    this.root.classList.remove('hidden');
    this.show();
  }

  close(): void {
    this.root.classList.add('hidden');
    this.index = -1;
    this.order = [];
  }

  /** Advance; returns false (and stays put) at the last image unless wrapping. */
  next(): boolean {
    if (!this.isOpen()) return false;
    if (this.index + 1 >= this.order.length) {
      if (!this.wrap) return false;
      this.index = 0;
    } else {
      this.index += 1;
    }
    this.show();
    return true;
  }

  prev(): boolean {
    if (!this.isOpen()) return false;
    if (this.index === 0) {
      if (!this.wrap) return false;
      this.index = this.order.length - 1;
    } else {
      this.index -= 1;
    }
    this.show();
    return true;
  }

  /**
   * Visit all K images once, in grid order, starting from the first; the
   * caller paces the traversal (timers, user input). Returns the visited ids.
   */
  runSlideshow(onShow?: (id: string) => void): string[] {
    if (this.order.length === 0) return [];
    const visited: string[] = [];
    this.index = 0;
    this.show();
    for (;;) {
      const id = this.current();
      if (id === null) break;
      visited.push(id);
      onShow?.(id);
      if (this.index + 1 >= this.order.length) break;
      this.index += 1;
      this.show();
    }
    return visited;
  }

  private show(): void {
    const id = this.current();
    if (id !== null) {
      this.hideToast();
      this.img.src = this.imageUrl(id);
    }
  }

  private onKey(event: KeyboardEvent): void {
    if (!this.isOpen()) return;
    if (event.key === 'Escape') {
      this.close();
    } else if (event.key === 'ArrowRight') {
      this.next();
    } else if (event.key === 'ArrowLeft') {
      this.prev();
    }
  }

  private showToast(message: string): void {
    this.toast.textContent = message;
    this.toast.classList.remove('hidden');
  }

  private hideToast(): void {
    this.toast.classList.add('hidden');
  }
}
