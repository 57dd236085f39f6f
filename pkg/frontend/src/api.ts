// Thin client over the local service. Every UI action maps to exactly one
// of these calls; the browser holds no pixel math.

import type { TransferConfig } from "./config.js";

export interface TransferResponse {
  image: string; // base64-encoded 16-bit PNG
  recipe: unknown;
}

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
  }
}

async function detailOf(res: Response): Promise<string> {
  try {
    const body = await res.json();
    return typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
  } catch {
    return res.statusText;
  }
}

export class ApiClient {
  private inFlight: AbortController | null = null;

  constructor(
    private readonly base: string = "",
    private readonly fetchFn: typeof fetch = fetch.bind(globalThis),
  ) {}

  async health(): Promise<boolean> {
    try {
      const res = await this.fetchFn(`${this.base}/api/health`);
      return res.ok;
    } catch {
      return false;
    }
  }

  // One preview at a time: starting a new transfer aborts a pending one.
  async transfer(
    source: File | Blob,
    target: File | Blob,
    config: TransferConfig,
  ): Promise<TransferResponse> {
    this.inFlight?.abort();
    const controller = new AbortController();
    this.inFlight = controller;
    const form = new FormData();
    form.append("src", source, "src.png");
    form.append("tgt", target, "tgt.png");
    form.append("config", JSON.stringify(config));
    try {
      const res = await this.fetchFn(`${this.base}/api/transfer`, {
        method: "POST",
        body: form,
        signal: controller.signal,
      });
      if (!res.ok) {
        throw new ServiceError(res.status, await detailOf(res));
      }
      return (await res.json()) as TransferResponse;
    } finally {
      if (this.inFlight === controller) {
        this.inFlight = null;
      }
    }
  }

  // The .cube bytes come back verbatim from the service, which is what
  // keeps UI exports byte-identical to the CLI's.
  async exportLut(recipe: unknown, size = 33): Promise<Uint8Array> {
    const res = await this.fetchFn(`${this.base}/api/lut?size=${size}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(recipe),
    });
    if (!res.ok) {
      throw new ServiceError(res.status, await detailOf(res));
    }
    return new Uint8Array(await res.arrayBuffer());
  }

  cancelPending(): void {
    this.inFlight?.abort();
    this.inFlight = null;
  }
}

export function pngDataUrl(base64Png: string): string {
  return `data:image/png;base64,${base64Png}`;
}
