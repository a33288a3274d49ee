/* tslint:disable */
/* eslint-disable */

/**
 * Kobayashi (Poincaré) distance between two points of the disk.
 */
export function distance(ax: number, ay: number, bx: number, by: number): number;

/**
 * The geodesic arc from `a` to `b` sampled at `n + 1` points.
 *
 * The automorphism sending `a` to 0 straightens the arc into a segment.
 */
export function geodesic(ax: number, ay: number, bx: number, by: number, n: number): Float64Array;

/**
 * `[cx, cy, radius]` of the Euclidean disk equal to the Kobayashi ball
 * `B(z0, r)`.
 */
export function kobayashi_ball(x: number, y: number, r: number): Float64Array;

/**
 * `identity`, `elliptic`, `parabolic` or `hyperbolic`.
 */
export function map_kind(ax: number, ay: number): string;

/**
 * Orbit of `z` under `(z + a) / (1 + conj(a) z)`, `steps + 1` points.
 */
export function orbit(ax: number, ay: number, zx: number, zy: number, steps: number): Float64Array;

/**
 * The Wolff point of `(z + a) / (1 + conj(a) z)`: the boundary fixed point
 * where the derivative has modulus at most 1. Empty when `a = 0`.
 */
export function wolff_point(ax: number, ay: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly distance: (a: number, b: number, c: number, d: number) => number;
    readonly geodesic: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly kobayashi_ball: (a: number, b: number, c: number) => [number, number];
    readonly map_kind: (a: number, b: number) => [number, number];
    readonly orbit: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly wolff_point: (a: number, b: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
