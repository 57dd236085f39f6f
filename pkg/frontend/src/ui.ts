// DOM wiring for the interactive workflow: pick images, drag statistics
// crops, toggle per-channel orders and spectral transfer, preview with an
// A/B swipe, export the frozen look as a .cube LUT.

import { ApiClient, pngDataUrl, ServiceError } from "./api.js";
import {
  type ChannelOrders,
  type SessionState,
  initialState,
  toConfig,
} from "./config.js";
import { type DragBox, cropToDisplay, dragToCrop } from "./crop.js";

const PREVIEW_MAX = 480; // display downscale only; statistics use full res

interface Slot {
  canvas: HTMLCanvasElement;
  image: HTMLImageElement | null;
  drag: DragBox | null;
}

const state: SessionState = initialState();
const api = new ApiClient();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setStatus(text: string, isError = false): void {
  const status = el<HTMLDivElement>("status");
  status.textContent = text;
  status.className = isError ? "status error" : "status";
}

function drawSlot(slot: Slot, crop: ReturnType<typeof dragToCrop>): void {
  const ctx = slot.canvas.getContext("2d");
  if (!ctx || !slot.image) return;
  const img = slot.image;
  const scale = Math.min(1, PREVIEW_MAX / Math.max(img.width, img.height));
  slot.canvas.width = Math.round(img.width * scale);
  slot.canvas.height = Math.round(img.height * scale);
  ctx.drawImage(img, 0, 0, slot.canvas.width, slot.canvas.height);
  if (crop) {
    const box = cropToDisplay(crop, slot.canvas.width, slot.canvas.height,
      img.width, img.height);
    ctx.strokeStyle = "#6ee26e";
    ctx.lineWidth = 2;
    ctx.strokeRect(box.x0, box.y0, box.x1 - box.x0, box.y1 - box.y0);
  }
}

function wireSlot(which: "src" | "tgt"): Slot {
  const slot: Slot = { canvas: el(`${which}-canvas`), image: null, drag: null };
  const input = el<HTMLInputElement>(`${which}-file`);

  input.addEventListener("change", () => {
    const file = input.files?.[0] ?? null;
    if (which === "src") state.source = file;
    else state.target = file;
    if (!file) return;
    const image = new Image();
    image.onload = () => {
      slot.image = image;
      drawSlot(slot, null);
      schedulePreview();
    };
    image.src = URL.createObjectURL(file);
  });

  const pos = (ev: PointerEvent) => {
    const rect = slot.canvas.getBoundingClientRect();
    return { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
  };
  slot.canvas.addEventListener("pointerdown", (ev) => {
    const p = pos(ev);
    slot.drag = { x0: p.x, y0: p.y, x1: p.x, y1: p.y };
    slot.canvas.setPointerCapture(ev.pointerId);
  });
  slot.canvas.addEventListener("pointermove", (ev) => {
    if (!slot.drag || !slot.image) return;
    const p = pos(ev);
    slot.drag.x1 = p.x;
    slot.drag.y1 = p.y;
    drawSlot(slot, dragToCrop(slot.drag, slot.canvas.width, slot.canvas.height,
      slot.image.width, slot.image.height));
  });
  slot.canvas.addEventListener("pointerup", () => {
    if (!slot.drag || !slot.image) return;
    const crop = dragToCrop(slot.drag, slot.canvas.width, slot.canvas.height,
      slot.image.width, slot.image.height);
    if (which === "src") state.srcCrop = crop;
    else state.tgtCrop = crop;
    slot.drag = null;
    drawSlot(slot, crop);
    schedulePreview();
  });
  slot.canvas.addEventListener("dblclick", () => {
    if (which === "src") state.srcCrop = null;
    else state.tgtCrop = null;
    drawSlot(slot, null);
    schedulePreview();
  });
  return slot;
}

let previewTimer: number | undefined;

function schedulePreview(): void {
  window.clearTimeout(previewTimer);
  previewTimer = window.setTimeout(() => void runPreview(), 150);
}

async function runPreview(): Promise<void> {
  if (!state.source || !state.target) return;
  setStatus("transferring…");
  try {
    const res = await api.transfer(state.source, state.target, toConfig(state));
    state.lastRecipe = res.recipe;
    state.lastResultUrl = pngDataUrl(res.image);
    el<HTMLImageElement>("result-img").src = state.lastResultUrl;
    el<HTMLImageElement>("swipe-under").src = URL.createObjectURL(state.source);
    el<HTMLButtonElement>("export-lut").disabled = false;
    setStatus("done");
  } catch (err) {
    if (err instanceof DOMException && err.name === "AbortError") return;
    state.lastRecipe = null;
    el<HTMLButtonElement>("export-lut").disabled = true;
    const detail = err instanceof ServiceError
      ? `service ${err.status}: ${err.message}`
      : String(err);
    setStatus(detail, true);
  }
}

function wireControls(): void {
  for (const [id, key] of [
    ["orders-i", "ordersI"],
    ["orders-p", "ordersP"],
    ["orders-t", "ordersT"],
  ] as const) {
    const select = el<HTMLSelectElement>(id);
    select.value = String(state[key]);
    select.addEventListener("change", () => {
      state[key] = Number(select.value) as ChannelOrders;
      schedulePreview();
    });
  }
  for (const [id, key] of [["spectral", "spectral"], ["clamp", "clamp"]] as const) {
    const box = el<HTMLInputElement>(id);
    box.checked = state[key];
    box.addEventListener("change", () => {
      state[key] = box.checked;
      schedulePreview();
    });
  }
  el<HTMLInputElement>("swipe").addEventListener("input", (ev) => {
    const pct = Number((ev.target as HTMLInputElement).value);
    el<HTMLImageElement>("result-img").style.clipPath =
      `inset(0 ${100 - pct}% 0 0)`;
  });
  el<HTMLButtonElement>("export-lut").addEventListener("click", () => {
    void exportLut();
  });
}

async function exportLut(): Promise<void> {
  if (!state.lastRecipe) return;
  try {
    const bytes = await api.exportLut(state.lastRecipe);
    const blob = new Blob([bytes.buffer as ArrayBuffer], { type: "text/plain" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "look.cube";
    a.click();
    URL.revokeObjectURL(a.href);
  } catch (err) {
    setStatus(err instanceof ServiceError
      ? `export failed (${err.status}): ${err.message}`
      : String(err), true);
  }
}

export function boot(): void {
  wireSlot("src");
  wireSlot("tgt");
  wireControls();
  el<HTMLButtonElement>("export-lut").disabled = true;
  void api.health().then((ok) => {
    setStatus(ok ? "service connected" : "service unreachable — run `decostyle serve`", !ok);
  });
}

boot();
