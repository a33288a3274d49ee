/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const distance: (a: number, b: number, c: number, d: number) => number;
export const geodesic: (a: number, b: number, c: number, d: number, e: number) => [number, number];
export const kobayashi_ball: (a: number, b: number, c: number) => [number, number];
export const map_kind: (a: number, b: number) => [number, number];
export const orbit: (a: number, b: number, c: number, d: number, e: number) => [number, number];
export const wolff_point: (a: number, b: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
