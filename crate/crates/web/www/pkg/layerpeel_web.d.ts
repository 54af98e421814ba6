/* tslint:disable */
/* eslint-disable */

/**
 * A back-to-front layer stack handed to JavaScript.
 */
export class LayerStack {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * The rendered stack as opaque RGBA8.
     */
    composite_rgba(): Uint8Array;
    height(): number;
    is_empty(): boolean;
    /**
     * Straight (non-premultiplied) RGBA8 pixels of layer `index`.
     */
    layer_rgba(index: number): Uint8Array;
    len(): number;
    width(): number;
}

/**
 * Peels an RGBA8 canvas into layers with heuristic matting and harmonic
 * completion. The canvas alpha channel is ignored.
 */
export function decompose_rgba(rgba: Uint8Array, width: number, height: number, max_iterations: number, refine_foreground: boolean, refine_background: boolean, quantization_step: number): LayerStack;

/**
 * Scores `pred` against `gt` for edit budgets `0..=max_edits`; returns the
 * report as JSON.
 */
export function evaluate_stacks(pred: LayerStack, gt: LayerStack, max_edits: number): string;

/**
 * Generates a seeded synthetic design. Layer counts include the background.
 */
export function synth_design(seed: bigint, width: number, height: number, min_layers: number, max_layers: number, overlap: string, antialias: boolean): LayerStack;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_layerstack_free: (a: number, b: number) => void;
    readonly decompose_rgba: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
    readonly evaluate_stacks: (a: number, b: number, c: number) => [number, number, number, number];
    readonly layerstack_composite_rgba: (a: number) => [number, number];
    readonly layerstack_height: (a: number) => number;
    readonly layerstack_is_empty: (a: number) => number;
    readonly layerstack_layer_rgba: (a: number, b: number) => [number, number, number, number];
    readonly layerstack_len: (a: number) => number;
    readonly layerstack_width: (a: number) => number;
    readonly synth_design: (a: bigint, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
