// Crop-rectangle drawing math. A drag happens in display (canvas)
// coordinates on a possibly-downscaled preview; statistics crops are in
// native image pixels, so positions are rescaled and snapped to integers
// before they ever reach the service.

import type { CropRect } from "./config.js";

export const MIN_CROP_SIDE = 8;

export interface DragBox {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

// Convert a drag in display space to an integer-snapped native-pixel crop.
// Returns null when the box collapses below the minimum usable size.
export function dragToCrop(
  drag: DragBox,
  displayWidth: number,
  displayHeight: number,
  imageWidth: number,
  imageHeight: number,
): CropRect | null {
  const sx = imageWidth / displayWidth;
  const sy = imageHeight / displayHeight;
  let x = Math.round(Math.min(drag.x0, drag.x1) * sx);
  let y = Math.round(Math.min(drag.y0, drag.y1) * sy);
  let w = Math.round(Math.abs(drag.x1 - drag.x0) * sx);
  let h = Math.round(Math.abs(drag.y1 - drag.y0) * sy);
  x = Math.max(0, Math.min(x, imageWidth - 1));
  y = Math.max(0, Math.min(y, imageHeight - 1));
  w = Math.min(w, imageWidth - x);
  h = Math.min(h, imageHeight - y);
  if (w < MIN_CROP_SIDE || h < MIN_CROP_SIDE) {
    return null;
  }
  return { x, y, w, h };
}

// Native-pixel crop back to display space, for drawing the overlay.
export function cropToDisplay(
  crop: CropRect,
  displayWidth: number,
  displayHeight: number,
  imageWidth: number,
  imageHeight: number,
): DragBox {
  const sx = displayWidth / imageWidth;
  const sy = displayHeight / imageHeight;
  return {
    x0: crop.x * sx,
    y0: crop.y * sy,
    x1: (crop.x + crop.w) * sx,
    y1: (crop.y + crop.h) * sy,
  };
}
