/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_layerstack_free: (a: number, b: number) => void;
export const decompose_rgba: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
export const evaluate_stacks: (a: number, b: number, c: number) => [number, number, number, number];
export const layerstack_composite_rgba: (a: number) => [number, number];
export const layerstack_height: (a: number) => number;
export const layerstack_is_empty: (a: number) => number;
export const layerstack_layer_rgba: (a: number, b: number) => [number, number, number, number];
export const layerstack_len: (a: number) => number;
export const layerstack_width: (a: number) => number;
export const synth_design: (a: bigint, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
