/* tslint:disable */
/* eslint-disable */

/**
 * A field on `(-1, 1)` and its discrete fractional Laplacian.
 */
export class Applied {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    au(): Float64Array;
    u(): Float64Array;
    x(): Float64Array;
}

/**
 * `g_{1-α}`, `g_{1-α,m}` and `h_m` sampled at `t_1, …, t_M` on `(0, T]`.
 */
export class KernelCurves {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    density(): Float64Array;
    power(): Float64Array;
    regularized(): Float64Array;
    t(): Float64Array;
}

/**
 * Solution of one problem on `(-1, 1)` reduced to what the page plots.
 */
export class Profile {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    initial(): Float64Array;
    /**
     * `min_n u(x_i, t_n)` at every node.
     */
    lowest(): Float64Array;
    min(): number;
    /**
     * Time index of the global minimum.
     */
    min_step(): number;
    /**
     * `u(·, T)`.
     */
    terminal(): Float64Array;
    x(): Float64Array;
}

export function fraclap_apply(beta: number, n: number, u: string): Applied;

export function kernel_curves(alpha: number, m: number, t_end: number, samples: number, family: string): KernelCurves;

export function solve_profile(alpha: number, beta: number, n: number, steps: number, t_end: number, u0: string, f: string): Profile;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_applied_free: (a: number, b: number) => void;
    readonly __wbg_kernelcurves_free: (a: number, b: number) => void;
    readonly __wbg_profile_free: (a: number, b: number) => void;
    readonly applied_au: (a: number) => [number, number];
    readonly applied_u: (a: number) => [number, number];
    readonly applied_x: (a: number) => [number, number];
    readonly fraclap_apply: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly kernel_curves: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly kernelcurves_density: (a: number) => [number, number];
    readonly kernelcurves_power: (a: number) => [number, number];
    readonly kernelcurves_regularized: (a: number) => [number, number];
    readonly kernelcurves_t: (a: number) => [number, number];
    readonly profile_initial: (a: number) => [number, number];
    readonly profile_lowest: (a: number) => [number, number];
    readonly profile_min: (a: number) => number;
    readonly profile_min_step: (a: number) => number;
    readonly profile_terminal: (a: number) => [number, number];
    readonly profile_x: (a: number) => [number, number];
    readonly solve_profile: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
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
