/* tslint:disable */
/* eslint-disable */

/**
 * Leak-only fidelity along one offset axis, the other two held at zero.
 * Returns `{"param", "x": [...], "fidelity": [...], "leakage": [...]}`.
 */
export function offset_sweep(name: string, param: string, lo: number, hi: number, n: number): string;

/**
 * Leak-only offset optimisation. Returns the tuned offsets in display units
 * with the fidelity before and after.
 */
export function optimize(name: string, seed_grid: number): string;

/**
 * Level populations over the pulse at the given offsets, sampled every
 * `stride` steps. Returns `{"labels", "t_ns": [...], "populations": [[...]]}`.
 */
export function population_trajectory(name: string, amp: number, det_mhz: number, phase_pi: number, stride: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly offset_sweep: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly optimize: (a: number, b: number, c: number) => [number, number, number, number];
    readonly population_trajectory: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
