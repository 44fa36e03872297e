/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_applied_free: (a: number, b: number) => void;
export const __wbg_kernelcurves_free: (a: number, b: number) => void;
export const __wbg_profile_free: (a: number, b: number) => void;
export const applied_au: (a: number) => [number, number];
export const applied_u: (a: number) => [number, number];
export const applied_x: (a: number) => [number, number];
export const fraclap_apply: (a: number, b: number, c: number, d: number) => [number, number, number];
export const kernel_curves: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const kernelcurves_density: (a: number) => [number, number];
export const kernelcurves_power: (a: number) => [number, number];
export const kernelcurves_regularized: (a: number) => [number, number];
export const kernelcurves_t: (a: number) => [number, number];
export const profile_initial: (a: number) => [number, number];
export const profile_lowest: (a: number) => [number, number];
export const profile_min: (a: number) => number;
export const profile_min_step: (a: number) => number;
export const profile_terminal: (a: number) => [number, number];
export const profile_x: (a: number) => [number, number];
export const solve_profile: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
