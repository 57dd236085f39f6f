// Thin-client behavior against a mocked fetch: request shaping, error
// surfacing, single-in-flight cancellation, and byte-exact .cube passthrough.

import { describe, expect, it, vi } from "vitest";

import { ApiClient, ServiceError } from "../src/api.js";
import { initialState, toConfig } from "../src/config.js";

const PNG = new Blob([new Uint8Array([1, 2, 3])], { type: "image/png" });

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("transfer", () => {
  it("posts multipart fields src, tgt and config JSON", async () => {
    const fetchFn = vi.fn(async (_url: any, init?: any) => {
      const form = init!.body as FormData;
      expect(form.get("src")).toBeInstanceOf(File);
      expect(form.get("tgt")).toBeInstanceOf(File);
      const cfg = JSON.parse(form.get("config") as string);
      expect(cfg.orders_i).toBe(4);
      expect(cfg.spectral).toBe(false);
      return jsonResponse({ image: "aGVsbG8=", recipe: { v: 1 } });
    });
    const api = new ApiClient("", fetchFn as unknown as typeof fetch);
    const res = await api.transfer(PNG, PNG, toConfig(initialState()));
    expect(res.recipe).toEqual({ v: 1 });
    expect(fetchFn).toHaveBeenCalledOnce();
    expect(fetchFn.mock.calls[0][0]).toBe("/api/transfer");
  });

  it("surfaces the service's stage diagnostics on 422", async () => {
    const fetchFn = vi.fn(async () =>
      jsonResponse({ detail: "variance is zero [stage=moments channel=I]" }, 422));
    const api = new ApiClient("", fetchFn as unknown as typeof fetch);
    await expect(api.transfer(PNG, PNG, toConfig(initialState())))
      .rejects.toThrowError(/stage=moments channel=I/);
    await expect(api.transfer(PNG, PNG, toConfig(initialState())))
      .rejects.toBeInstanceOf(ServiceError);
  });

  it("aborts the pending preview when a new one starts", async () => {
    let firstSignal: AbortSignal | undefined;
    let calls = 0;
    const fetchFn = vi.fn(async (_url: any, init?: any) => {
      calls += 1;
      if (calls === 1) {
        firstSignal = init!.signal as AbortSignal;
        return new Promise<Response>((_resolve, reject) => {
          (init!.signal as AbortSignal).addEventListener("abort", () =>
            reject(new DOMException("aborted", "AbortError")));
        });
      }
      return jsonResponse({ image: "", recipe: null });
    });
    const api = new ApiClient("", fetchFn as unknown as typeof fetch);
    const pending = api.transfer(PNG, PNG, toConfig(initialState()));
    const second = api.transfer(PNG, PNG, toConfig(initialState()));
    await expect(pending).rejects.toHaveProperty("name", "AbortError");
    await second;
    expect(firstSignal?.aborted).toBe(true);
  });
});

describe("exportLut", () => {
  it("passes the service's cube bytes through untouched", async () => {
    // byte-identity with the CLI's writer reduces to this passthrough,
    // since the service and CLI share one serializer
    const cube = new TextEncoder().encode(
      'TITLE "look"\nLUT_3D_SIZE 2\n0.000000 0.000000 0.000000\n');
    const fetchFn = vi.fn(async (url: any, init?: any) => {
      expect(String(url)).toBe("/api/lut?size=33");
      expect(JSON.parse(init!.body as string)).toEqual({ v: 1, channels: {} });
      return new Response(cube, { status: 200 });
    });
    const api = new ApiClient("", fetchFn as unknown as typeof fetch);
    const got = await api.exportLut({ v: 1, channels: {} });
    expect(Array.from(got)).toEqual(Array.from(cube));
  });

  it("maps failures to ServiceError with the detail", async () => {
    const fetchFn = vi.fn(async () => jsonResponse({ detail: "recipe: bad" }, 400));
    const api = new ApiClient("", fetchFn as unknown as typeof fetch);
    await expect(api.exportLut({})).rejects.toMatchObject({
      status: 400,
      message: "recipe: bad",
    });
  });
});
