/**
 * Client-side bead field: the welcome frame seeds the nonzero cells, state
 * frames patch changed cells with absolute heights.  Patches are
 * idempotent by construction (re-applying a diff changes nothing).
 */

import type { BeadCell, GridMeta } from "./protocol.js";

export class BeadStrip {
  readonly grid: GridMeta;
  private cells: Map<number, number> = new Map();

  constructor(grid: GridMeta, initial: BeadCell[] = []) {
    this.grid = grid;
    this.applyPatch(initial);
  }

  private key(i: number, j: number): number {
    return i * this.grid.nv + j;
  }

  applyPatch(patch: BeadCell[]): void {
    for (const [i, j, h] of patch) {
      if (i < 0 || i >= this.grid.nu || j < 0 || j >= this.grid.nv) continue;
      if (h <= 0) {
        this.cells.delete(this.key(i, j));
      } else {
        this.cells.set(this.key(i, j), h);
      }
    }
  }

  heightAt(i: number, j: number): number {
    return this.cells.get(this.key(i, j)) ?? 0;
  }

  /** Bead profile along u at the grid row nearest to v (for the 2-D view). */
  profileAt(v: number): Float64Array {
    const j = Math.min(
      this.grid.nv - 1,
      Math.max(0, Math.round((v - this.grid.v_min) / this.grid.pitch)),
    );
    const out = new Float64Array(this.grid.nu);
    for (let i = 0; i < this.grid.nu; i++) out[i] = this.heightAt(i, j);
    return out;
  }

  uOfIndex(i: number): number {
    return this.grid.u_min + i * this.grid.pitch;
  }

  nonzeroCount(): number {
    return this.cells.size;
  }

  /** Stable snapshot for equality checks (sorted by cell index). */
  snapshot(): BeadCell[] {
    const keys = [...this.cells.keys()].sort((a, b) => a - b);
    return keys.map((k) => [
      Math.floor(k / this.grid.nv),
      k % this.grid.nv,
      this.cells.get(k)!,
    ]);
  }
}
